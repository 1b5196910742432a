"""Post-selective initialisation and push-button mapping.

The initialisation drives every site through the emission STIRAP, leaks all
cavity photons through the network and keeps the runs in which each output
port registers exactly one photon. The surviving atomic state is then read
out by the mapping STIRAP, one photon per site.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DimensionError, DomainError, EmptyAcceptanceError, ProtocolError
from .hilbert import (
    POLS,
    AtomLevel,
    BasisLabel,
    ModeId,
    ModeKind,
    Pol,
    StateVector,
    make_product_state,
    project_onto_external_pattern,
    site,
)
from .optics import ScatteringMatrix, leak_all, leak_cavity_direct, network_by_name
from .stirap import ideal_emit_superposition, ideal_map_to_photon

FAILURE = "fail"


@dataclass(frozen=True)
class DetectionPattern:
    """Polarisation of the single photon seen at each output port."""

    per_port: tuple[Pol, ...]

    def __post_init__(self):
        object.__setattr__(self, "per_port", tuple(Pol(p) for p in self.per_port))
        if not self.per_port:
            raise ValueError("empty detection pattern")

    @classmethod
    def parse(cls, text: str) -> "DetectionPattern":
        return cls(tuple(text))

    @property
    def n(self) -> int:
        return len(self.per_port)

    def modes(self) -> dict[ModeId, int]:
        return {ModeId(ModeKind.PORT, j, p): 1 for j, p in enumerate(self.per_port, 1)}

    def __str__(self) -> str:
        return "".join(p.value for p in self.per_port)


def all_patterns(n: int) -> list[DetectionPattern]:
    return [DetectionPattern(p) for p in itertools.product(POLS, repeat=n)]


def _preset(name: str, n: int) -> Callable[[DetectionPattern], bool]:
    if name == "all":
        return lambda p: True
    if name == "singlet":
        if n != 2:
            raise DimensionError("the 'singlet' acceptance preset needs n_sites = 2")
        return lambda p: str(p) in {"+-", "-+"}
    if name == "one-plus":
        return lambda p: str(p).count("+") == 1
    raise ValueError(f"unknown acceptance preset {name!r}; use all, singlet, one-plus "
                     "or a comma-separated list of patterns")


ACCEPT_PRESETS = ("all", "singlet", "one-plus")


@dataclass
class ProtocolConfig:
    """Everything needed to run the protocol reproducibly.

    ``network`` is a :class:`ScatteringMatrix` or a built-in name. ``accept``
    is a preset name, an iterable of pattern strings such as ``"+-"``, or a
    predicate on :class:`DetectionPattern`.
    """

    n_sites: int
    network: ScatteringMatrix | str = "dft"
    accept: str | Iterable[str] | Callable[[DetectionPattern], bool] = "all"
    seed: int = 0
    max_attempts: int = 10_000
    trials: int = 1

    def __post_init__(self):
        if self.n_sites < 1:
            raise ValueError("n_sites must be >= 1")
        if isinstance(self.network, str):
            name = self.network
            if name == "dft" and self.n_sites == 1:
                name = "identity"
            self.network = network_by_name(name, self.n_sites)
        if self.network.n != self.n_sites:
            raise DimensionError(f"network has {self.network.n} ports, n_sites is {self.n_sites}")
        if self.max_attempts < 1 or self.trials < 1:
            raise ValueError("max_attempts and trials must be >= 1")
        if isinstance(self.accept, str) and self.accept in ACCEPT_PRESETS:
            self._predicate = _preset(self.accept, self.n_sites)
        elif callable(self.accept):
            self._predicate = self.accept
        else:
            wanted = [self.accept] if isinstance(self.accept, str) else list(self.accept)
            wanted = {w.strip() for item in wanted for w in item.split(",") if w.strip()}
            for w in wanted:
                if len(w) != self.n_sites or set(w) - {"+", "-"}:
                    raise ValueError(f"pattern {w!r} is not {self.n_sites} characters from +/-")
            self._predicate = lambda p: str(p) in wanted

    def accepts(self, pattern: DetectionPattern) -> bool:
        return bool(self._predicate(pattern))

    def describe(self) -> dict:
        accept = self.accept if isinstance(self.accept, str) else (
            sorted(self.accept) if not callable(self.accept) else "<predicate>")
        return {
            "n_sites": self.n_sites,
            "network": self.network.name,
            "matrix": self.network.to_config(),
            "accept": accept,
            "seed": self.seed,
            "max_attempts": self.max_attempts,
            "trials": self.trials,
        }


@dataclass(frozen=True)
class InitOutcome:
    pattern: DetectionPattern
    probability: float
    conditional_state: StateVector | None


@dataclass(frozen=True)
class OutcomeTable:
    outcomes: list[InitOutcome]
    failure_probability: float
    failures: dict[str, float] | None = None

    def __getitem__(self, pattern: str | DetectionPattern) -> InitOutcome:
        key = str(pattern)
        for o in self.outcomes:
            if str(o.pattern) == key:
                return o
        raise KeyError(key)

    @property
    def success_probability(self) -> float:
        return sum(o.probability for o in self.outcomes)

    def acceptance_probability(self, cfg: ProtocolConfig) -> float:
        return sum(o.probability for o in self.outcomes if cfg.accepts(o.pattern))


def prepare_phi0(n: int) -> StateVector:
    """All sites through the emission STIRAP: prod_i (|u+,1+> + |u-,1->)/sqrt(2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    psi = make_product_state([site(AtomLevel.V)] * n)
    for i in range(1, n + 1):
        psi = ideal_emit_superposition(i, psi)
    return psi


def _port_occupancy_patterns(n: int) -> Iterable[dict[ModeId, int]]:
    modes = [ModeId(ModeKind.PORT, j, p) for j in range(1, n + 1) for p in POLS]
    for counts in itertools.product(range(n + 1), repeat=len(modes)):
        if sum(counts) == n:
            yield {m: c for m, c in zip(modes, counts) if c}


def _pattern_key(pattern: dict[ModeId, int]) -> str:
    return ";".join(f"port{m.index}{m.pol.value}={c}" for m, c in sorted(pattern.items()))


def enumerate_outcomes(cfg: ProtocolConfig, verbose: bool = False,
                       order: Sequence[int] | None = None) -> OutcomeTable:
    """Probability and conditional atomic state for every one-per-port pattern.

    Everything else is lumped into ``failure_probability``; with ``verbose``
    (n_sites <= 3) each failing port-occupancy pattern is listed too.
    """
    n = cfg.n_sites
    emitted = leak_all(cfg.network, prepare_phi0(n), order=order)
    outcomes = []
    for pattern in all_patterns(n):
        prob, cond = project_onto_external_pattern(emitted, pattern.modes())
        outcomes.append(InitOutcome(pattern, prob, cond))
    failure = max(0.0, 1.0 - sum(o.probability for o in outcomes))
    failures = None
    if verbose:
        if n > 3:
            raise ValueError("verbose failure enumeration is limited to n_sites <= 3")
        failures = {}
        for occ in _port_occupancy_patterns(n):
            if all(c == 1 for c in occ.values()) and len({m.index for m in occ}) == n:
                continue
            prob, _ = project_onto_external_pattern(emitted, occ)
            failures[_pattern_key(occ)] = prob
    return OutcomeTable(outcomes, failure, failures)


def singlet_reference() -> StateVector:
    """(|u+,0>|u-,0> - |u-,0>|u+,0>)/sqrt(2)."""
    up, um = site(AtomLevel.U_PLUS), site(AtomLevel.U_MINUS)
    r = 1 / math.sqrt(2)
    return StateVector({BasisLabel((up, um)): r, BasisLabel((um, up)): -r})


def w_state_reference(n: int, phases: Sequence[float] | None = None) -> StateVector:
    """Equal-weight superposition of the n states with one atom in u+.

    ``phases[k]`` (radians) multiplies the term with site ``k+1`` in u+.
    """
    if n < 2:
        raise ValueError("W state needs n >= 2")
    phases = np.zeros(n) if phases is None else np.asarray(phases, dtype=float)
    if phases.shape != (n,):
        raise DimensionError(f"need {n} phases, got {phases.shape}")
    amps = {}
    for k in range(n):
        sites = tuple(site(AtomLevel.U_PLUS if i == k else AtomLevel.U_MINUS) for i in range(n))
        amps[BasisLabel(sites)] = np.exp(1j * phases[k]) / math.sqrt(n)
    return StateVector(amps, n_sites=n)


def photonic_singlet() -> StateVector:
    """|v,0>|v,0> (x) (|1+>_1 |1->_2 - |1->_1 |1+>_2)/sqrt(2) in free-space modes."""
    v = site(AtomLevel.V)
    r = 1 / math.sqrt(2)
    ext = lambda a, b: ((ModeId(ModeKind.EXTERNAL, 1, a), 1), (ModeId(ModeKind.EXTERNAL, 2, b), 1))
    return StateVector({
        BasisLabel((v, v), ext(Pol.PLUS, Pol.MINUS)): r,
        BasisLabel((v, v), ext(Pol.MINUS, Pol.PLUS)): -r,
    })


_ATOMIC_DOMAIN = {site(AtomLevel.U_PLUS), site(AtomLevel.U_MINUS)}


def run_mapping(atomic_state: StateVector) -> StateVector:
    """Map an atomic ground-state superposition onto one photon per site.

    Every site must be in u+ or u- with an empty cavity and no photons
    elsewhere. Atoms end in v; u+ becomes a "-" photon and u- a "+" photon in
    the site's own free-space mode.
    """
    for label in atomic_state:
        if label.modes or any(s not in _ATOMIC_DOMAIN for s in label.sites):
            raise DomainError(f"{label} is not an atomic u+/u- state with empty modes")
    psi = atomic_state
    for i in range(1, psi.n_sites + 1):
        psi = ideal_map_to_photon(i, psi)
    for i in range(1, psi.n_sites + 1):
        psi = leak_cavity_direct(i, psi)
    return psi


@dataclass
class TrialLog:
    attempts: int
    accepted_pattern: str | None
    per_attempt_patterns: list[str] = field(default_factory=list)

    @property
    def accepted(self) -> bool:
        return self.accepted_pattern is not None


@dataclass
class MonteCarloSummary:
    logs: list[TrialLog]
    acceptance_probability: float
    trials: int
    accepted_trials: int
    mean_attempts: float
    std_error: float
    acceptance_rate: float

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "accepted_trials": self.accepted_trials,
            "mean_attempts": self.mean_attempts,
            "std_error": self.std_error,
            "acceptance_rate": self.acceptance_rate,
            "acceptance_probability": self.acceptance_probability,
        }


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent stream for trial ``trial``; any worker can rebuild it."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


def _sampler(table: OutcomeTable, cfg: ProtocolConfig):
    labels = [str(o.pattern) for o in table.outcomes] + [FAILURE]
    probs = np.array([o.probability for o in table.outcomes] + [table.failure_probability])
    cdf = np.cumsum(probs / probs.sum())
    cdf[-1] = 1.0
    accepted = np.array([cfg.accepts(o.pattern) and o.probability > 0 for o in table.outcomes]
                        + [False])
    return labels, cdf, accepted


def _run_trial(rng, labels, cdf, accepted, max_attempts: int, chunk: int = 16) -> TrialLog:
    seen: list[str] = []
    while len(seen) < max_attempts:
        draws = np.searchsorted(cdf, rng.random(chunk), side="right")
        for k in draws:
            seen.append(labels[k])
            if accepted[k]:
                return TrialLog(len(seen), labels[k], seen)
            if len(seen) == max_attempts:
                break
    return TrialLog(len(seen), None, seen)


def monte_carlo_repeat(cfg: ProtocolConfig, trials: int | None = None,
                       table: OutcomeTable | None = None) -> MonteCarloSummary:
    """Repeat the initialisation until an accepted pattern appears.

    Attempts are drawn from the exact outcome distribution (including the
    failure aggregate). Trial ``k`` uses :func:`trial_rng(cfg.seed, k)`.
    """
    trials = cfg.trials if trials is None else trials
    table = table or enumerate_outcomes(cfg)
    p = table.acceptance_probability(cfg)
    if p <= 0:
        raise EmptyAcceptanceError("no accepted detection pattern has nonzero probability")
    labels, cdf, accepted = _sampler(table, cfg)
    logs = [_run_trial(trial_rng(cfg.seed, k), labels, cdf, accepted, cfg.max_attempts)
            for k in range(trials)]
    attempts = np.array([log.attempts for log in logs], dtype=float)
    n_acc = sum(log.accepted for log in logs)
    std_err = float(attempts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("nan")
    return MonteCarloSummary(
        logs=logs,
        acceptance_probability=p,
        trials=trials,
        accepted_trials=n_acc,
        mean_attempts=float(attempts.mean()),
        std_error=std_err,
        acceptance_rate=n_acc / float(attempts.sum()),
    )


def run_full_protocol(cfg: ProtocolConfig) -> tuple[StateVector, TrialLog]:
    """Initialise by repeat-until-success (trial 0 of the seeded stream),
    then map the conditional atomic state onto photons."""
    table = enumerate_outcomes(cfg)
    log = monte_carlo_repeat(cfg, trials=1, table=table).logs[0]
    if not log.accepted:
        raise ProtocolError(f"no accepted pattern within {cfg.max_attempts} attempts")
    atomic = table[log.accepted_pattern].conditional_state
    return run_mapping(atomic), log


def outcome_report(cfg: ProtocolConfig, table: OutcomeTable,
                   mc: MonteCarloSummary | None = None) -> dict:
    """JSON-ready report of an outcome enumeration."""
    report = {
        "config": cfg.describe(),
        "outcomes": [
            {
                "pattern": str(o.pattern),
                "probability": o.probability,
                "accepted": cfg.accepts(o.pattern),
                "state": o.conditional_state.to_dict() if o.conditional_state is not None else None,
            }
            for o in table.outcomes
        ],
        "failure_probability": table.failure_probability,
    }
    if mc is not None:
        report["monte_carlo"] = mc.to_dict()
    return report


__all__ = [
    "DetectionPattern", "InitOutcome", "OutcomeTable", "ProtocolConfig", "TrialLog",
    "MonteCarloSummary", "all_patterns", "prepare_phi0", "enumerate_outcomes", "run_mapping",
    "singlet_reference", "w_state_reference", "photonic_singlet", "monte_carlo_repeat",
    "run_full_protocol", "outcome_report", "trial_rng",
]
