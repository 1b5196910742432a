import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from conftest import one_photon_per_cavity_states
from multiphoton.errors import DimensionError, DomainError, NonUnitaryError
from multiphoton.hilbert import (
    BasisLabel,
    ModeKind,
    StateVector,
    external_mode,
    fidelity,
    make_product_state,
    port_mode,
    project_onto_external_pattern,
    site,
)
from multiphoton.optics import (
    ScatteringMatrix,
    beamsplitter_50_50,
    dft_multiport,
    identity,
    leak_all,
    leak_cavity_direct,
    leak_cavity_through_network,
    network_by_name,
    unitarity_residual,
)

R2 = 1 / math.sqrt(2)


def relabel_ports_as_external(psi):
    out = {}
    for label, a in psi.items():
        modes = tuple(((ModeKind.EXTERNAL, m.index, m.pol), n) for m, n in label.modes)
        out[BasisLabel(label.sites, modes)] = a
    return StateVector(out, n_sites=psi.n_sites)


class TestMatrices:
    def test_beamsplitter_entries(self):
        bs = beamsplitter_50_50()
        assert bs.entry(1, 1) == R2
        assert bs.entry(1, 2) == R2
        assert bs.entry(2, 1) == R2
        assert bs.entry(2, 2) == -R2
        assert unitarity_residual(bs.matrix) <= 1e-12

    def test_dft_two(self):
        assert np.allclose(dft_multiport(2).matrix, np.array([[1, 1], [1, -1]]) * R2, atol=1e-15)

    def test_dft_three_entry(self):
        assert dft_multiport(3).entry(2, 3) == pytest.approx(np.exp(4j * np.pi / 3) / math.sqrt(3), abs=1e-15)

    @pytest.mark.parametrize("n", range(3, 7))
    def test_dft_unitary(self, n):
        assert unitarity_residual(dft_multiport(n).matrix) <= 1e-12

    def test_dft_too_small(self):
        with pytest.raises(ValueError):
            dft_multiport(1)

    def test_non_unitary_rejected_with_residual(self):
        with pytest.raises(NonUnitaryError, match=r"1\.000e\+00"):
            ScatteringMatrix(np.array([[1, 1], [0, 1]]))

    def test_immutable(self):
        with pytest.raises(ValueError):
            beamsplitter_50_50().matrix[0, 0] = 0

    def test_config_round_trip(self):
        u = dft_multiport(3)
        back = ScatteringMatrix.from_config(u.to_config())
        assert np.array_equal(back.matrix, u.matrix)

    def test_config_flat_pairs(self):
        flat = [[R2, 0], [R2, 0], [R2, 0], [-R2, 0]]
        assert np.array_equal(ScatteringMatrix.from_config(flat).matrix, beamsplitter_50_50().matrix)

    def test_named(self):
        assert network_by_name("bs5050", 2).name == "bs5050"
        with pytest.raises(DimensionError):
            network_by_name("bs5050", 3)
        with pytest.raises(ValueError):
            network_by_name("tritter", 3)


class TestDirectLeakage:
    def test_single_photon(self):
        out = leak_cavity_direct(1, make_product_state([("u+", 1, 0)]))
        expected = StateVector({BasisLabel((site("u+"),), ((external_mode(1, "+"), 1),)): 1.0})
        assert out.allclose(expected, atol=0)

    def test_superposition_keeps_polarisation(self):
        psi = R2 * make_product_state([("u+", 1, 0)]) + R2 * make_product_state([("u-", 0, 1)])
        out = leak_cavity_direct(1, psi)
        expected = StateVector({
            BasisLabel((site("u+"),), ((external_mode(1, "+"), 1),)): R2,
            BasisLabel((site("u-"),), ((external_mode(1, "-"), 1),)): R2,
        })
        assert out.allclose(expected, atol=1e-15)
        assert all(s.cavity_plus == s.cavity_minus == 0 for lab in out for s in lab.sites)

    def test_vacuum(self):
        assert leak_cavity_direct(1, make_product_state([("v", 0, 0)])).is_zero()


class TestNetworkLeakage:
    def test_beamsplitter_single_photon(self):
        psi = make_product_state([("u+", 1, 0), ("v", 0, 0)])
        out = leak_cavity_through_network(1, beamsplitter_50_50(), psi)
        sites = (site("u+"), site("v"))
        expected = StateVector({
            BasisLabel(sites, ((port_mode(1, "+"), 1),)): R2,
            BasisLabel(sites, ((port_mode(2, "+"), 1),)): R2,
        })
        assert out.allclose(expected, atol=1e-15)

    def test_identity_matches_direct(self):
        psi = make_product_state([("u+", 1, 0), ("u-", 0, 1)])
        via = leak_all(identity(2), psi)
        direct = leak_all(None, psi)
        assert relabel_ports_as_external(via).allclose(direct, atol=0)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            leak_cavity_through_network(1, dft_multiport(3), make_product_state([("u+", 1, 0)] * 2))

    @pytest.mark.parametrize("pol", ["+", "-"])
    def test_hong_ou_mandel(self, pol):
        cav = ("u+", 1, 0) if pol == "+" else ("u-", 0, 1)
        out = leak_all(beamsplitter_50_50(), make_product_state([cav, cav]))
        coincidence = {port_mode(1, pol): 1, port_mode(2, pol): 1}
        prob, cond = project_onto_external_pattern(out, coincidence)
        assert prob <= 1e-12 and cond is None
        assert abs(oracle.hom_coincidence_amplitude(oracle.BS5050, pol, pol)) <= 1e-15
        # bunched outcomes carry everything: |2,0> and |0,2> with probability 1/2 each
        bunched = [project_onto_external_pattern(out, {port_mode(j, pol): 2})[0] for j in (1, 2)]
        assert bunched == pytest.approx([0.5, 0.5], abs=1e-15)

    def test_leak_all_requires_one_photon(self):
        with pytest.raises(DomainError, match="site 2"):
            leak_all(None, make_product_state([("u+", 1, 0), ("v", 0, 0)]))

    def test_leak_all_bad_order(self):
        with pytest.raises(ValueError):
            leak_all(None, make_product_state([("u+", 1, 0)] * 2), order=[1, 1])

    @pytest.mark.parametrize("n,u", [(2, beamsplitter_50_50()), (3, dft_multiport(3)), (3, identity(3))])
    def test_order_independence_exact(self, n, u):
        from itertools import permutations

        from multiphoton.protocol import prepare_phi0

        psi = prepare_phi0(n)
        ref = leak_all(u, psi)
        for order in permutations(range(1, n + 1)):
            other = leak_all(u, psi, order=order)
            assert set(other) == set(ref)
            assert max(abs(other.amplitude(k) - ref.amplitude(k)) for k in ref) <= 1e-15

    @settings(max_examples=30, deadline=None)
    @given(st.data())
    def test_random_states_commute_and_preserve_norm(self, data):
        n = data.draw(st.integers(2, 3))
        psi = data.draw(one_photon_per_cavity_states(n))
        u = dft_multiport(n)
        a = leak_all(u, psi, order=list(range(1, n + 1)))
        b = leak_all(u, psi, order=list(range(n, 0, -1)))
        assert a.allclose(b, atol=1e-14)
        assert a.norm() == pytest.approx(1, abs=1e-12)
        assert leak_all(None, psi).norm() == pytest.approx(1, abs=1e-12)

    def test_probability_conservation_over_port_patterns(self):
        from multiphoton.protocol import prepare_phi0

        out = leak_all(dft_multiport(3), prepare_phi0(3))
        total = sum(project_onto_external_pattern(out, dict(p))[0] for p in {lab.modes for lab in out})
        assert total == pytest.approx(1, abs=1e-10)

    def test_direct_leak_of_mapped_singlet(self):
        from multiphoton.protocol import photonic_singlet

        pre = StateVector({
            BasisLabel((site("v", 0, 1), site("v", 1, 0))): R2,
            BasisLabel((site("v", 1, 0), site("v", 0, 1))): -R2,
        })
        assert fidelity(leak_all(None, pre), photonic_singlet()) == pytest.approx(1, abs=1e-15)
