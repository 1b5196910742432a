"""Sparse labeled Fock-space states.

A basis label is one classical configuration of the whole setup: the level of
every atom, the photon number in both polarisation modes of every cavity, and
the occupation of every free-space (``ext``) and beamsplitter-output (``port``)
mode. A :class:`StateVector` maps labels to complex amplitudes and stores only
the nonzero ones.

Sites, external modes and ports are indexed from 1, matching the labels used
in serialized states (``site1``, ``port1``, ...).
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple

from .errors import CutoffError, DimensionError, NormalizationError

DEFAULT_CUTOFF = 1
DEFAULT_PRUNE_EPSILON = 1e-14
ATOL = 1e-10
NORM_TOL = 1e-9


class AtomLevel(str, Enum):
    V = "v"
    F = "f"
    U_PLUS = "u+"
    U_MINUS = "u-"
    E_PLUS = "e+"
    E_MINUS = "e-"


class Pol(str, Enum):
    PLUS = "+"
    MINUS = "-"

    @property
    def flipped(self) -> "Pol":
        return Pol.MINUS if self is Pol.PLUS else Pol.PLUS


class ModeKind(str, Enum):
    CAVITY = "cavity"
    EXTERNAL = "ext"
    PORT = "port"


POLS = (Pol.PLUS, Pol.MINUS)
# the ground level u_lambda reached by emitting a lambda photon on f -> u_lambda
U_OF = {Pol.PLUS: AtomLevel.U_PLUS, Pol.MINUS: AtomLevel.U_MINUS}


class ModeId(NamedTuple):
    """One bosonic mode. Tuple order gives the canonical ordering."""

    kind: ModeKind
    index: int
    pol: Pol


def cavity_mode(site: int, pol: Pol | str) -> ModeId:
    return ModeId(ModeKind.CAVITY, site, Pol(pol))


def external_mode(site: int, pol: Pol | str) -> ModeId:
    return ModeId(ModeKind.EXTERNAL, site, Pol(pol))


def port_mode(port: int, pol: Pol | str) -> ModeId:
    return ModeId(ModeKind.PORT, port, Pol(pol))


class SiteLabel(NamedTuple):
    atom: AtomLevel
    cavity_plus: int = 0
    cavity_minus: int = 0

    def cavity(self, pol: Pol) -> int:
        return self.cavity_plus if pol is Pol.PLUS else self.cavity_minus

    def with_cavity(self, pol: Pol, n: int) -> "SiteLabel":
        if pol is Pol.PLUS:
            return self._replace(cavity_plus=n)
        return self._replace(cavity_minus=n)

    def with_atom(self, atom: AtomLevel) -> "SiteLabel":
        return self._replace(atom=atom)

    def to_string(self) -> str:
        return f"({self.atom.value},{self.cavity_plus},{self.cavity_minus})"


def site(atom: AtomLevel | str, cavity_plus: int = 0, cavity_minus: int = 0) -> SiteLabel:
    """Build a :class:`SiteLabel`, accepting level names such as ``"u+"``."""
    return SiteLabel(AtomLevel(atom), int(cavity_plus), int(cavity_minus))


_SITE_RE = re.compile(r"^site(\d+)=\(([a-z][+-]?),(\d+),(\d+)\)$")
_MODE_RE = re.compile(r"^(ext|port)(\d+)=\((\d+),(\d+)\)$")


@dataclass(frozen=True)
class BasisLabel:
    """Site configurations plus the nonzero external/port occupancies.

    ``modes`` is kept canonical: zero entries dropped, sorted by
    (kind, index, polarisation) with ``ext`` before ``port`` and ``+``
    before ``-``.
    """

    sites: tuple[SiteLabel, ...]
    modes: tuple[tuple[ModeId, int], ...] = ()

    def __post_init__(self):
        sites = tuple(s if isinstance(s, SiteLabel) and isinstance(s.atom, AtomLevel) else site(*s)
                      for s in self.sites)
        merged: dict[ModeId, int] = {}
        for mode, n in self.modes:
            mode = ModeId(ModeKind(mode[0]), int(mode[1]), Pol(mode[2]))
            if mode.kind is ModeKind.CAVITY:
                raise ValueError("cavity occupancies live in the site labels")
            merged[mode] = merged.get(mode, 0) + int(n)
        if any(n < 0 for n in merged.values()):
            raise ValueError("negative mode occupancy")
        modes = tuple(sorted((m, n) for m, n in merged.items() if n))
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "modes", modes)

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def occupancy(self, mode: ModeId) -> int:
        if mode.kind is ModeKind.CAVITY:
            return self.sites[mode.index - 1].cavity(mode.pol)
        for m, n in self.modes:
            if m == mode:
                return n
        return 0

    def with_occupancy(self, mode: ModeId, n: int) -> "BasisLabel":
        if mode.kind is ModeKind.CAVITY:
            i = mode.index - 1
            s = self.sites[i].with_cavity(mode.pol, n)
            return BasisLabel(self.sites[:i] + (s,) + self.sites[i + 1:], self.modes)
        rest = tuple((m, k) for m, k in self.modes if m != mode)
        return BasisLabel(self.sites, rest + ((mode, n),))

    def with_site(self, index: int, new: SiteLabel) -> "BasisLabel":
        i = index - 1
        return BasisLabel(self.sites[:i] + (new,) + self.sites[i + 1:], self.modes)

    def without_modes(self) -> "BasisLabel":
        return BasisLabel(self.sites)

    @property
    def photons(self) -> int:
        return sum(s.cavity_plus + s.cavity_minus for s in self.sites) + sum(n for _, n in self.modes)

    def to_string(self) -> str:
        text = ";".join(f"site{i}={s.to_string()}" for i, s in enumerate(self.sites, 1))
        if not self.modes:
            return text
        occ = dict(self.modes)
        groups = []
        for kind in (ModeKind.EXTERNAL, ModeKind.PORT):
            if not any(m.kind is kind for m in occ):
                continue
            top = max(self.n_sites, max(m.index for m in occ if m.kind is kind))
            for j in range(1, top + 1):
                plus = occ.get(ModeId(kind, j, Pol.PLUS), 0)
                minus = occ.get(ModeId(kind, j, Pol.MINUS), 0)
                groups.append(f"{kind.value}{j}=({plus},{minus})")
        return text + "|" + ";".join(groups)

    @classmethod
    def from_string(cls, text: str) -> "BasisLabel":
        site_part, _, mode_part = text.partition("|")
        sites = []
        for i, token in enumerate(site_part.split(";"), 1):
            m = _SITE_RE.match(token)
            if m is None or int(m.group(1)) != i:
                raise ValueError(f"bad site token {token!r} in label {text!r}")
            sites.append(site(m.group(2), int(m.group(3)), int(m.group(4))))
        modes = []
        if mode_part:
            for token in mode_part.split(";"):
                m = _MODE_RE.match(token)
                if m is None:
                    raise ValueError(f"bad mode token {token!r} in label {text!r}")
                kind, j = ModeKind(m.group(1)), int(m.group(2))
                modes.append((ModeId(kind, j, Pol.PLUS), int(m.group(3))))
                modes.append((ModeId(kind, j, Pol.MINUS), int(m.group(4))))
        return cls(tuple(sites), tuple(modes))

    def __str__(self) -> str:
        return self.to_string()


class StateVector:
    """Immutable sparse state vector over :class:`BasisLabel`.

    Amplitudes with magnitude below ``prune_epsilon`` are dropped on
    construction, so exact cancellations leave no residue. The zero vector
    is a legal (unnormalized) value.
    """

    __slots__ = ("_amps", "n_sites", "cutoff", "prune_epsilon")

    def __init__(
        self,
        amplitudes: Mapping[BasisLabel, complex] | Iterable[tuple[BasisLabel, complex]],
        n_sites: int | None = None,
        cutoff: int = DEFAULT_CUTOFF,
        prune_epsilon: float = DEFAULT_PRUNE_EPSILON,
    ):
        items = amplitudes.items() if isinstance(amplitudes, Mapping) else amplitudes
        amps: dict[BasisLabel, complex] = {}
        for label, a in items:
            amps[label] = amps.get(label, 0j) + complex(a)
        if n_sites is None:
            if not amps:
                raise DimensionError("n_sites is required for an empty state")
            n_sites = next(iter(amps)).n_sites
        if prune_epsilon < 0:
            raise ValueError("prune_epsilon must be non-negative")
        for label in amps:
            if label.n_sites != n_sites:
                raise DimensionError(f"label {label} has {label.n_sites} sites, expected {n_sites}")
            for s in label.sites:
                if max(s.cavity_plus, s.cavity_minus) > cutoff:
                    raise CutoffError(f"cavity occupancy above cutoff {cutoff} in {label}")
        self._amps = {k: v for k, v in amps.items() if abs(v) >= prune_epsilon and v != 0}
        self.n_sites = n_sites
        self.cutoff = cutoff
        self.prune_epsilon = prune_epsilon

    @classmethod
    def zero(cls, n_sites: int, cutoff: int = DEFAULT_CUTOFF) -> "StateVector":
        return cls({}, n_sites=n_sites, cutoff=cutoff)

    def _like(self, amps) -> "StateVector":
        return StateVector(amps, self.n_sites, self.cutoff, self.prune_epsilon)

    @property
    def amplitudes(self) -> Mapping[BasisLabel, complex]:
        return MappingProxyType(self._amps)

    def amplitude(self, label: BasisLabel) -> complex:
        return self._amps.get(label, 0j)

    def items(self):
        return self._amps.items()

    def labels(self) -> list[BasisLabel]:
        return sorted(self._amps, key=BasisLabel.to_string)

    def __len__(self) -> int:
        return len(self._amps)

    def __iter__(self) -> Iterator[BasisLabel]:
        return iter(self._amps)

    def is_zero(self) -> bool:
        return not self._amps

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._amps.values()))

    def normalize(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0:
            raise NormalizationError("cannot normalize the zero vector")
        return self._like({k: v / nrm for k, v in self._amps.items()})

    def _check_compatible(self, other: "StateVector") -> None:
        if self.n_sites != other.n_sites:
            raise DimensionError(f"states have {self.n_sites} and {other.n_sites} sites")

    def __add__(self, other: "StateVector") -> "StateVector":
        self._check_compatible(other)
        return self._like(list(self._amps.items()) + list(other._amps.items()))

    def __sub__(self, other: "StateVector") -> "StateVector":
        return self + (-1) * other

    def __mul__(self, scalar: complex) -> "StateVector":
        return self._like({k: v * scalar for k, v in self._amps.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "StateVector":
        return self * (1 / scalar)

    def __neg__(self) -> "StateVector":
        return self * -1

    def allclose(self, other: "StateVector", atol: float = ATOL) -> bool:
        self._check_compatible(other)
        keys = set(self._amps) | set(other._amps)
        return all(abs(self.amplitude(k) - other.amplitude(k)) <= atol for k in keys)

    def __repr__(self) -> str:
        terms = [f"({a.real:+.6g}{a.imag:+.6g}j)|{lab}>" for lab, a in
                 ((lab, self._amps[lab]) for lab in self.labels()[:8])]
        more = "" if len(self) <= 8 else f" + ... ({len(self)} terms)"
        return "StateVector(" + (" + ".join(terms) or "0") + more + ")"

    def to_dict(self) -> dict:
        return {
            "n_sites": self.n_sites,
            "amplitudes": [
                {"label": lab.to_string(), "re": self._amps[lab].real, "im": self._amps[lab].imag}
                for lab in self.labels()
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: Mapping, cutoff: int = DEFAULT_CUTOFF) -> "StateVector":
        amps = [(BasisLabel.from_string(e["label"]), complex(e["re"], e["im"]))
                for e in data["amplitudes"]]
        return cls(amps, n_sites=int(data["n_sites"]), cutoff=cutoff, prune_epsilon=0.0)

    @classmethod
    def from_json(cls, text: str, cutoff: int = DEFAULT_CUTOFF) -> "StateVector":
        return cls.from_dict(json.loads(text), cutoff=cutoff)


def apply_linear(
    psi: StateVector, action: Callable[[BasisLabel], Iterable[tuple[BasisLabel, complex]]]
) -> StateVector:
    """Extend a label-wise action linearly over ``psi``."""
    out: dict[BasisLabel, complex] = {}
    for label, amp in psi.items():
        for new, coeff in action(label):
            out[new] = out.get(new, 0j) + amp * coeff
    return psi._like(out)


def make_product_state(site_states: Iterable, cutoff: int = DEFAULT_CUTOFF) -> StateVector:
    """Single-label state with amplitude 1.

    >>> make_product_state([("v", 0, 0), ("v", 0, 0)]).labels()[0].to_string()
    'site1=(v,0,0);site2=(v,0,0)'
    """
    sites = tuple(s if isinstance(s, SiteLabel) else site(*s) for s in site_states)
    if not sites:
        raise DimensionError("need at least one site")
    return StateVector({BasisLabel(sites): 1.0}, n_sites=len(sites), cutoff=cutoff)


def _check_mode(mode: ModeId, psi: StateVector) -> None:
    if mode.kind is ModeKind.CAVITY and not 1 <= mode.index <= psi.n_sites:
        raise DimensionError(f"cavity index {mode.index} outside 1..{psi.n_sites}")
    if mode.index < 1:
        raise DimensionError(f"mode index {mode.index} must be >= 1")


def apply_creation(mode: ModeId, psi: StateVector) -> StateVector:
    """Bosonic creation operator: |n> -> sqrt(n+1) |n+1>."""
    _check_mode(mode, psi)

    def act(label):
        n = label.occupancy(mode)
        if mode.kind is ModeKind.CAVITY and n + 1 > psi.cutoff:
            raise CutoffError(f"creating a photon in {mode} exceeds cutoff {psi.cutoff}")
        yield label.with_occupancy(mode, n + 1), math.sqrt(n + 1)

    return apply_linear(psi, act)


def apply_annihilation(mode: ModeId, psi: StateVector) -> StateVector:
    """Bosonic annihilation operator: |n> -> sqrt(n) |n-1>, vacuum -> 0."""
    _check_mode(mode, psi)

    def act(label):
        n = label.occupancy(mode)
        if n:
            yield label.with_occupancy(mode, n - 1), math.sqrt(n)

    return apply_linear(psi, act)


def inner_product(psi: StateVector, phi: StateVector) -> complex:
    """<psi|phi>, antilinear in ``psi``."""
    psi._check_compatible(phi)
    small, big = (psi, phi) if len(psi) <= len(phi) else (phi, psi)
    total = 0j
    for label in small:
        if label in big.amplitudes:
            total += psi.amplitude(label).conjugate() * phi.amplitude(label)
    return total


def _require_normalized(psi: StateVector, name: str) -> None:
    if abs(psi.norm() - 1) > NORM_TOL:
        raise NormalizationError(f"{name} has norm {psi.norm():.12g}, expected 1")


def fidelity(psi: StateVector, reference: StateVector) -> float:
    """|<reference|psi>|^2 for normalized pure states."""
    _require_normalized(psi, "psi")
    _require_normalized(reference, "reference")
    return min(1.0, abs(inner_product(reference, psi)) ** 2)


def _canonical_pattern(pattern: Mapping[ModeId, int]) -> tuple[tuple[ModeId, int], ...]:
    # reuse BasisLabel canonicalisation for the occupancy tuple
    return BasisLabel((), tuple(pattern.items())).modes


def project_onto_external_pattern(
    psi: StateVector, pattern: Mapping[ModeId, int]
) -> tuple[float, StateVector | None]:
    """Condition on every external/port mode having the given occupancy.

    Modes missing from ``pattern`` must be empty. The detected photons are
    absorbed, so the conditional state carries no external occupancy. Returns
    ``(probability, conditional)``, with ``conditional`` set to ``None`` when
    the probability vanishes.
    """
    _require_normalized(psi, "psi")
    target = _canonical_pattern(pattern)
    kept = {label.without_modes(): amp for label, amp in psi.items() if label.modes == target}
    prob = sum(abs(a) ** 2 for a in kept.values())
    if prob <= psi.prune_epsilon ** 2 or not kept:
        return 0.0, None
    return prob, psi._like(kept).normalize()
