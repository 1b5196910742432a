"""Exit criteria for the package. Each test records a one-line verdict that
is printed in the "acceptance criteria" section of the pytest summary."""

import math
import subprocess
import sys
import time
from itertools import permutations

import numpy as np
import pytest

import oracle
from multiphoton.hilbert import AtomLevel, BasisLabel, fidelity, site
from multiphoton.optics import beamsplitter_50_50, dft_multiport, identity, leak_all
from multiphoton.protocol import (
    ProtocolConfig,
    enumerate_outcomes,
    monte_carlo_repeat,
    photonic_singlet,
    prepare_phi0,
    run_mapping,
    singlet_reference,
    w_state_reference,
)
from multiphoton.stirap import LAMBDA_BASIS, build_lambda_hamiltonian, dark_state, stirap_single_photon

W3_DFT_PHASES = [0.0, 0.0, 0.0]
NETWORKS = [(1, identity(1)), (2, identity(2)), (2, beamsplitter_50_50()), (2, dft_multiport(2)),
            (3, identity(3)), (3, dft_multiport(3))]
ADIABATIC_TIMES = (50.0, 100.0, 200.0, 400.0)


def atomic(config):
    return BasisLabel(tuple(site("u+" if c == "+" else "u-") for c in config))


@pytest.fixture(scope="module")
def stirap_runs():
    t0 = time.perf_counter()
    runs = {t: stirap_single_photon(10.0, 1.0, t) for t in ADIABATIC_TIMES}
    return runs, time.perf_counter() - t0


def test_c1_same_polarisation_null(criterion):
    t0 = time.perf_counter()
    table = enumerate_outcomes(ProtocolConfig(2, "bs5050"))
    elapsed = time.perf_counter() - t0
    pp, mm = table["++"].probability, table["--"].probability
    ok = pp <= 1e-12 and mm <= 1e-12 and pp == mm and elapsed < 1
    criterion("C1 same-polarisation null", ok, f"P(++)={pp:.1e} P(--)={mm:.1e} in {elapsed:.3f}s")
    assert ok


def test_c2_singlet_conditioning(criterion):
    t0 = time.perf_counter()
    table = enumerate_outcomes(ProtocolConfig(2, "bs5050"))
    fids = [fidelity(table[p].conditional_state, singlet_reference()) for p in ("+-", "-+")]
    elapsed = time.perf_counter() - t0
    ok = min(fids) >= 1 - 1e-10 and elapsed < 1
    criterion("C2 singlet conditioning", ok, f"F(+-)={fids[0]:.15f} F(-+)={fids[1]:.15f}")
    assert ok


def test_c3_oracle_equivalence(criterion):
    t0 = time.perf_counter()
    worst = 0.0
    for n, u in NETWORKS:
        table = enumerate_outcomes(ProtocolConfig(n, u))
        expected = oracle.outcomes(u.matrix)
        for o in table.outcomes:
            prob, cond = expected[str(o.pattern)]
            worst = max(worst, abs(o.probability - prob))
            if prob == 0:
                assert o.conditional_state is None
                continue
            assert len(o.conditional_state) == len(cond)
            for cfg, a in cond.items():
                worst = max(worst, abs(o.conditional_state.amplitude(atomic(cfg)) - a))
    cfg = ProtocolConfig(2, "bs5050", "singlet")
    p_accept = enumerate_outcomes(cfg).acceptance_probability(cfg)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and abs(p_accept - 0.25) <= 1e-12 and elapsed < 10
    criterion("C3 oracle equivalence", ok,
              f"max deviation {worst:.1e}; N=2 singlet acceptance p={p_accept:.15f} (exact 1/4)")
    assert ok


def test_c4_mapping(criterion):
    t0 = time.perf_counter()
    out = run_mapping(singlet_reference())
    f = fidelity(out, photonic_singlet())
    atoms_ground = all(s == site(AtomLevel.V) for lab in out for s in lab.sites)
    elapsed = time.perf_counter() - t0
    ok = f >= 1 - 1e-12 and atoms_ground and elapsed < 1
    criterion("C4 mapping correctness", ok, f"F={f:.15f}, atoms all in v: {atoms_ground}")
    assert ok


def test_c5_w_state(criterion):
    t0 = time.perf_counter()
    cond = enumerate_outcomes(ProtocolConfig(3, "dft"))["+--"].conditional_state
    support = set(cond)
    mags = [abs(a) for _, a in cond.items()]
    f = fidelity(cond, w_state_reference(3, W3_DFT_PHASES))
    elapsed = time.perf_counter() - t0
    ok = (support == {atomic("+--"), atomic("-+-"), atomic("--+")}
          and max(abs(m - 1 / math.sqrt(3)) for m in mags) <= 1e-10
          and f >= 1 - 1e-10 and elapsed < 10)
    criterion("C5 W-state preparation", ok, f"|amp| = {mags}, F={f:.15f}")
    assert ok


def test_c6a_stirap_final_fidelity(criterion, stirap_runs):
    runs, elapsed = stirap_runs
    fid = runs[200.0].final_population(LAMBDA_BASIS[2])
    ok = fid >= 0.99 and elapsed < 30
    criterion("C6a STIRAP fidelity >= 0.99 (Omega_max/g=10, g*T=200)", ok,
              f"F={fid:.6f}; adiabatic ceiling sin^2(atan(5)) = {25 / 26:.6f}")
    assert ok


def test_c6b_stirap_excited_population(criterion, stirap_runs):
    runs, elapsed = stirap_runs
    pf = runs[200.0].max_f_population
    ok = pf <= 0.01 and elapsed < 30
    criterion("C6b STIRAP max |f> population <= 0.01", ok, f"max P_f={pf:.2e}, 4 runs in {elapsed:.2f}s")
    assert ok


def test_c6c_stirap_monotone_in_duration(criterion, stirap_runs):
    runs, _ = stirap_runs
    fids = [runs[t].final_population(LAMBDA_BASIS[2]) for t in ADIABATIC_TIMES]
    ok = all(b >= a for a, b in zip(fids, fids[1:]))
    criterion("C6c STIRAP fidelity non-decreasing in T", ok,
              "F(T=50,100,200,400) = " + ", ".join(f"{x:.6f}" for x in fids))
    assert ok


def test_c7_conservation(criterion, stirap_runs):
    rng = np.random.default_rng(2024)
    residual = 0.0
    for omega, g in zip(rng.uniform(0, 20, 100), rng.uniform(0.05, 5, 100)):
        d = dark_state(omega, g)
        v = np.array([d.amplitude(BasisLabel((s,))) for s in LAMBDA_BASIS])
        residual = max(residual, float(np.max(np.abs(build_lambda_hamiltonian(omega, g) @ v))))

    runs, _ = stirap_runs
    drift = max(float(np.max(np.abs(r.norms - 1))) for r in runs.values())

    prob_err = 0.0
    for n, u in NETWORKS:
        table = enumerate_outcomes(ProtocolConfig(n, u), verbose=True)
        prob_err = max(prob_err, abs(table.success_probability + sum(table.failures.values()) - 1))

    exact = True
    for n, u in [(2, beamsplitter_50_50()), (3, dft_multiport(3))]:
        psi = prepare_phi0(n)
        ref = leak_all(u, psi)
        for order in permutations(range(1, n + 1)):
            other = leak_all(u, psi, order=order)
            exact &= set(other) == set(ref) and all(
                abs(other.amplitude(k) - ref.amplitude(k)) <= 1e-15 for k in ref)

    ok = residual <= 1e-12 and drift <= 1e-8 and prob_err <= 1e-10 and exact
    criterion("C7 conservation suite", ok,
              f"dark residual {residual:.1e}, norm drift {drift:.1e}, "
              f"prob sum error {prob_err:.1e}, leakage order-exact {exact}")
    assert ok


def test_c8_monte_carlo(criterion):
    t0 = time.perf_counter()
    cfg = ProtocolConfig(2, "bs5050", "singlet", seed=20240601, trials=10_000)
    mc = monte_carlo_repeat(cfg)
    elapsed = time.perf_counter() - t0
    target = 1 / mc.acceptance_probability
    z = abs(mc.mean_attempts - target) / mc.std_error
    ok = z <= 3 and mc.accepted_trials == 10_000 and elapsed < 10
    criterion("C8 Monte Carlo consistency", ok,
              f"mean attempts {mc.mean_attempts:.4f} vs 1/p={target:.4f} ({z:.2f} SE) in {elapsed:.2f}s")
    assert ok


def test_c9_determinism(criterion, tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        subprocess.run([sys.executable, "-m", "multiphoton", "full", "--n", "2", "--network", "bs5050",
                        "--accept", "singlet", "--seed", "7", "--out", str(path)],
                       check=True, capture_output=True)
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    criterion("C9 determinism of `full`", ok, f"{len(outs[0])} bytes, identical: {outs[0] == outs[1]}")
    assert ok
