"""STIRAP in a single atom-cavity system.

Two levels of description live here:

* ideal partial isometries that replace a whole adiabatic passage by its end
  result (emission into a polarisation superposition, atom-to-photon mapping,
  and the three-level single-photon map), and
* Hamiltonian builders plus a fixed-step RK4 integrator that run the actual
  pulse and show how closely the ideal maps are approached.

Units: hbar = 1, all rates in one frequency unit (usually g = 1). The laser
enters every Hamiltonian as (Omega/2)|ground><excited| + h.c. and the cavity
as g a^dag |ground><excited| + h.c.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Literal, Mapping

import numpy as np

from .errors import DimensionError, DomainError, NormalizationError, StepTooCoarseError
from .hilbert import (
    U_OF,
    AtomLevel,
    BasisLabel,
    Pol,
    SiteLabel,
    StateVector,
    apply_linear,
    site,
)

A = AtomLevel
WEAK_COUPLING_RATIO = 10.0
MIN_SAMPLES = 100
DRIFT_LIMIT = 1e-6
# RK4 step is chosen so that step * (largest Hamiltonian frequency) <= this
DEFAULT_STEP_PHASE = 0.1
EXCITED = (A.F, A.E_PLUS, A.E_MINUS)


class WeakCouplingWarning(UserWarning):
    pass


class NonAdiabaticWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LambdaParams:
    g: float
    kappa: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if not self.g > 0:
            raise ValueError(f"g must be positive, got {self.g}")
        if self.kappa < 0 or self.gamma < 0:
            raise ValueError("decay rates must be non-negative")


def strong_coupling_ratio(p: LambdaParams) -> float:
    """g^2 / (kappa * gamma). Warns when the ratio is below 10."""
    if p.kappa == 0 or p.gamma == 0:
        raise ValueError("strong-coupling ratio undefined with a zero decay rate")
    ratio = p.g ** 2 / (p.kappa * p.gamma)
    if ratio < WEAK_COUPLING_RATIO:
        warnings.warn(f"g^2/(kappa*gamma) = {ratio:.3g} is not in the strong coupling regime",
                      WeakCouplingWarning, stacklevel=2)
    return ratio


# --- three-level picture -------------------------------------------------
# |u,1> is represented by the "+" branch: atom in u+, one "+" cavity photon.
LAMBDA_BASIS = (site(A.V), site(A.F), site(A.U_PLUS, 1, 0))


def build_lambda_hamiltonian(omega: float, g: float) -> np.ndarray:
    """3x3 Hamiltonian on (|v,0>, |f,0>, |u,1>): <f,0|H|v,0> = Omega/2,
    <f,0|H|u,1> = g."""
    if not g > 0:
        raise ValueError(f"g must be positive, got {g}")
    h = np.zeros((3, 3), dtype=complex)
    h[0, 1] = omega / 2
    h[1, 2] = g
    return h + h.conj().T


def dark_state(omega: float, g: float) -> StateVector:
    """Zero-energy eigenvector cos(t)|v,0> - sin(t)|u,1>, tan(t) = Omega/(2g).

    The Omega/2 laser convention of :func:`build_lambda_hamiltonian` fixes the
    mixing angle; for Omega = 2g it is pi/4.
    """
    if omega == 0 and g == 0:
        raise ValueError("mixing angle undefined for omega = g = 0")
    theta = math.atan2(omega / 2, g)
    v, _, u = LAMBDA_BASIS
    return StateVector({BasisLabel((v,)): math.cos(theta), BasisLabel((u,)): -math.sin(theta)})


# --- ideal maps ----------------------------------------------------------

def _site_map(site_index: int, psi: StateVector, table: Mapping[SiteLabel, list], strict: bool,
              what: str) -> StateVector:
    if not 1 <= site_index <= psi.n_sites:
        raise DimensionError(f"site {site_index} outside 1..{psi.n_sites}")
    if strict:
        for label in psi:
            if label.sites[site_index - 1] not in table:
                raise DomainError(f"{what}: site {site_index} of {label} is outside the domain")

    def act(label):
        for new, c in table.get(label.sites[site_index - 1], ()):
            yield label.with_site(site_index, new), c

    return apply_linear(psi, act)


_R2 = 1 / math.sqrt(2)
_EMIT = {site(A.V): [(site(A.U_PLUS, 1, 0), _R2), (site(A.U_MINUS, 0, 1), _R2)]}
# cross-mapping: u+ is read out as a "-" photon and u- as a "+" photon
_MAP = {
    site(A.U_PLUS): [(site(A.V, 0, 1), 1.0)],
    site(A.U_MINUS): [(site(A.V, 1, 0), 1.0)],
}


def ideal_emit_superposition(site_index: int, psi: StateVector, strict: bool = True) -> StateVector:
    """|v,0> -> (|u+,1+> + |u-,1->)/sqrt(2) at one site.

    With ``strict=False`` amplitudes outside the domain are discarded, which
    loses norm.
    """
    return _site_map(site_index, psi, _EMIT, strict, "emission STIRAP")


def ideal_map_to_photon(site_index: int, psi: StateVector, strict: bool = True) -> StateVector:
    """|u+,0> -> |v,1->, |u-,0> -> |v,1+> at one site."""
    return _site_map(site_index, psi, _MAP, strict, "mapping STIRAP")


def ideal_single_map(site_index: int, psi: StateVector, pol: Pol | str = Pol.PLUS,
                     strict: bool = True) -> StateVector:
    """Three-level map |v,0> -> |u,1>, with |u,1> taken in polarisation ``pol``."""
    pol = Pol(pol)
    target = site(U_OF[pol]).with_cavity(pol, 1)
    return _site_map(site_index, psi, {site(A.V): [(target, 1.0)]}, strict, "single-photon STIRAP")


# --- pulses and Hamiltonians ---------------------------------------------

def _sin2(x: float) -> float:
    return math.sin(math.pi * x / 2) ** 2


def _linear(x: float) -> float:
    return x


SHAPES: dict[str, Callable[[float], float]] = {"sin2": _sin2, "linear": _linear}


@dataclass(frozen=True)
class PulseProfile:
    """Rabi-frequency ramp Omega(t) = omega_max * shape(t / t_total).

    ``samples=None`` lets :func:`evolve_pulse` pick a step from the
    Hamiltonian's largest frequency.
    """

    omega_max: float
    t_total: float
    samples: int | None = None
    shape: str = "sin2"

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValueError(f"unknown pulse shape {self.shape!r}; choose from {sorted(SHAPES)}")
        if self.omega_max < 0:
            raise ValueError("omega_max must be non-negative")
        if not self.t_total > 0:
            raise ValueError("t_total must be positive")

    def envelope(self, t: float) -> float:
        x = min(max(t / self.t_total, 0.0), 1.0)
        return SHAPES[self.shape](x)

    def omega(self, t: float) -> float:
        return self.omega_max * self.envelope(t)


LASER_LEVELS = {A.V: A.F, A.U_PLUS: A.E_MINUS, A.U_MINUS: A.E_PLUS}
# g_x keyed by x -> (excited level, ground level, photon polarisation)
CAVITY_LEVELS = {
    A.U_PLUS: (A.F, A.U_PLUS, Pol.PLUS),
    A.U_MINUS: (A.F, A.U_MINUS, Pol.MINUS),
    A.E_PLUS: (A.E_PLUS, A.V, Pol.PLUS),
    A.E_MINUS: (A.E_MINUS, A.V, Pol.MINUS),
}
STAGES = {
    "ini": ({A.V}, {A.U_PLUS, A.U_MINUS}),
    "map": ({A.U_PLUS, A.U_MINUS}, {A.E_PLUS, A.E_MINUS}),
    "full": (set(LASER_LEVELS), set(CAVITY_LEVELS)),
}


@dataclass(frozen=True)
class SiteCouplings:
    """Peak Rabi frequencies keyed by the driven ground level (v, u+, u-) and
    cavity couplings keyed by the level carrying the subscript in g_x
    (u+, u- for f <-> u transitions; e+, e- for e <-> v transitions)."""

    rabi: Mapping[AtomLevel, complex] = field(default_factory=dict)
    cavity: Mapping[AtomLevel, float] = field(default_factory=dict)

    def __post_init__(self):
        rabi = {AtomLevel(k): complex(v) for k, v in self.rabi.items()}
        cav = {AtomLevel(k): complex(v) for k, v in self.cavity.items()}
        bad = [k.value for k in rabi if k not in LASER_LEVELS]
        bad += [k.value for k in cav if k not in CAVITY_LEVELS]
        if bad:
            raise DomainError(f"no laser/cavity transition is defined for level(s) {bad}")
        object.__setattr__(self, "rabi", rabi)
        object.__setattr__(self, "cavity", cav)


def site_basis(cutoff: int = 1) -> tuple[SiteLabel, ...]:
    return tuple(site(a, p, m) for a in AtomLevel for p in range(cutoff + 1) for m in range(cutoff + 1))


@dataclass(frozen=True, eq=False)
class SiteHamiltonian:
    """H(t) = static + envelope(t) * drive on a fixed one-site basis."""

    basis: tuple[SiteLabel, ...]
    static: np.ndarray
    drive: np.ndarray
    profile: PulseProfile

    def __call__(self, t: float) -> np.ndarray:
        return self.static + self.profile.envelope(t) * self.drive

    def index(self, s: SiteLabel) -> int:
        return self.basis.index(s)

    def max_frequency(self) -> float:
        return float(np.linalg.norm(self.static, 2) + np.linalg.norm(self.drive, 2))


def build_site_hamiltonian(
    stage: Literal["ini", "map", "full"], couplings: SiteCouplings, profile: PulseProfile
) -> SiteHamiltonian:
    """Laser and cavity terms of one site for the initialisation ("ini"),
    mapping ("map") or complete ("full") level scheme.

    Raises :class:`DomainError` if ``couplings`` name a transition that does
    not take part in ``stage``.
    """
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}")
    laser_ok, cavity_ok = STAGES[stage]
    extra = [k.value for k in couplings.rabi if k not in laser_ok]
    extra += [k.value for k in couplings.cavity if k not in cavity_ok]
    if extra:
        raise DomainError(f"stage {stage!r} has no transition for level(s) {extra}")

    basis = site_basis()
    idx = {s: i for i, s in enumerate(basis)}
    dim = len(basis)
    drive = np.zeros((dim, dim), dtype=complex)
    static = np.zeros((dim, dim), dtype=complex)
    for s in basis:
        # laser: (Omega_x/2) |x><excited|
        for ground, excited in LASER_LEVELS.items():
            om = couplings.rabi.get(ground, 0)
            if om and s.atom is excited:
                drive[idx[s.with_atom(ground)], idx[s]] += om / 2
        # cavity: g a_pol^dag |ground><excited|
        for key, (excited, ground, pol) in CAVITY_LEVELS.items():
            g = couplings.cavity.get(key, 0)
            if g and s.atom is excited and s.cavity(pol) < 1:
                n = s.cavity(pol)
                target = s.with_atom(ground).with_cavity(pol, n + 1)
                static[idx[target], idx[s]] += g * math.sqrt(n + 1)
    drive = drive + drive.conj().T
    static = static + static.conj().T
    return SiteHamiltonian(basis, static, drive, profile)


def lambda_hamiltonian(g: float, profile: PulseProfile) -> SiteHamiltonian:
    """Time-dependent three-level Hamiltonian with Omega(t) from ``profile``."""
    return SiteHamiltonian(
        LAMBDA_BASIS,
        static=build_lambda_hamiltonian(0.0, g),
        drive=build_lambda_hamiltonian(profile.omega_max, g) - build_lambda_hamiltonian(0.0, g),
        profile=profile,
    )


# --- integration ---------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled populations of every basis state of one site.

    ``norms`` is the state norm at each sample; ``emitted`` the accumulated
    decay probability, which equals ``1 - norms**2`` up to quadrature error.
    """

    times: np.ndarray
    basis: tuple[SiteLabel, ...]
    pop_matrix: np.ndarray
    norms: np.ndarray
    emitted: np.ndarray
    final_state: StateVector
    max_f_population: float
    max_excited_population: float

    @property
    def populations(self) -> dict[str, np.ndarray]:
        return {s.to_string(): self.pop_matrix[:, i] for i, s in enumerate(self.basis)}

    def population(self, s: SiteLabel) -> np.ndarray:
        return self.pop_matrix[:, self.basis.index(s)]

    def final_population(self, s: SiteLabel) -> float:
        return float(self.population(s)[-1])

    def to_csv(self, path) -> None:
        header = ["time"] + ["pop_" + "_".join(map(str, (s.atom.value, s.cavity_plus, s.cavity_minus)))
                             for s in self.basis] + ["norm"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for k, t in enumerate(self.times):
                row = [t, *self.pop_matrix[k], self.norms[k]]
                w.writerow([format(float(x), ".17g") for x in row])


def _decay_operator(basis, decay: LambdaParams | None) -> np.ndarray:
    """Diagonal rates kappa * (photon number) + gamma * P_excited."""
    if decay is None:
        return np.zeros(len(basis))
    return np.array([decay.kappa * (s.cavity_plus + s.cavity_minus)
                     + (decay.gamma if s.atom in EXCITED else 0.0) for s in basis])


def evolve_pulse(
    h: SiteHamiltonian,
    psi0: StateVector,
    profile: PulseProfile | None = None,
    decay: LambdaParams | None = None,
) -> Trajectory:
    """Integrate i d/dt psi = (H(t) - i R/2) psi with classical RK4.

    ``R`` holds the no-jump damping rates from ``decay`` (kappa per cavity
    photon, gamma on f, e+ and e-). The step is ``t_total / samples``. With
    decay off, a norm drift above 1e-6 raises :class:`StepTooCoarseError`.
    """
    profile = profile or h.profile
    if psi0.n_sites != 1:
        raise DimensionError("evolve_pulse acts on a single site")
    if abs(psi0.norm() - 1) > 1e-9:
        raise NormalizationError("initial state must be normalized")
    y = np.zeros(len(h.basis), dtype=complex)
    for label, amp in psi0.items():
        if label.modes or label.sites[0] not in h.basis:
            raise DomainError(f"{label} is outside the Hamiltonian's basis")
        y[h.index(label.sites[0])] = amp

    rates = _decay_operator(h.basis, decay)
    damping = -0.5 * np.diag(rates)
    samples = profile.samples
    if samples is None:
        freq = h.max_frequency() + rates.max(initial=0.0) / 2
        samples = max(1000, math.ceil(profile.t_total * freq / DEFAULT_STEP_PHASE))
    if samples < MIN_SAMPLES:
        raise StepTooCoarseError(f"{samples} samples is too coarse; use at least {MIN_SAMPLES}")
    dt = profile.t_total / samples

    def gen(t):
        return -1j * (h.static + profile.envelope(t) * h.drive) + damping

    times = np.linspace(0.0, profile.t_total, samples + 1)
    pops = np.empty((samples + 1, len(y)))
    pops[0] = np.abs(y) ** 2
    for k in range(samples):
        t = times[k]
        m0, mh, m1 = gen(t), gen(t + dt / 2), gen(t + dt)
        k1 = m0 @ y
        k2 = mh @ (y + dt / 2 * k1)
        k3 = mh @ (y + dt / 2 * k2)
        k4 = m1 @ (y + dt * k3)
        y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        pops[k + 1] = np.abs(y) ** 2

    norm_sq = pops.sum(axis=1)
    norms = np.sqrt(norm_sq)
    rate_t = pops @ rates
    emitted = np.concatenate([[0.0], np.cumsum((rate_t[1:] + rate_t[:-1]) * dt / 2)])
    if decay is None or not rates.any():
        drift = float(np.max(np.abs(norms - 1)))
        if drift > DRIFT_LIMIT:
            raise StepTooCoarseError(
                f"norm drifted by {drift:.2e} with {samples} samples; increase samples")

    f_cols = [i for i, s in enumerate(h.basis) if s.atom is A.F]
    exc_cols = [i for i, s in enumerate(h.basis) if s.atom in EXCITED]
    final = StateVector({BasisLabel((s,)): a for s, a in zip(h.basis, y)}, n_sites=1)
    return Trajectory(
        times=times,
        basis=h.basis,
        pop_matrix=pops,
        norms=norms,
        emitted=emitted,
        final_state=final,
        max_f_population=float(pops[:, f_cols].sum(axis=1).max()) if f_cols else 0.0,
        max_excited_population=float(pops[:, exc_cols].sum(axis=1).max()) if exc_cols else 0.0,
    )


def stirap_single_photon(
    omega_max: float, g: float, t_total: float, samples: int | None = None,
    decay: LambdaParams | None = None, shape: str = "sin2",
) -> Trajectory:
    """Three-level run from |v,0> under the counterintuitive ramp."""
    profile = PulseProfile(omega_max, t_total, samples, shape)
    if g * t_total < 10:
        warnings.warn(f"g*t_total = {g * t_total:.3g} is far from adiabatic", NonAdiabaticWarning,
                      stacklevel=2)
    psi0 = StateVector({BasisLabel((LAMBDA_BASIS[0],)): 1.0})
    return evolve_pulse(lambda_hamiltonian(g, profile), psi0, profile, decay)
