import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

from multiphoton.hilbert import POLS, AtomLevel, BasisLabel, ModeId, ModeKind, StateVector, site

sys.path.insert(0, str(Path(__file__).parent))

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record a one-line pass/fail verdict for an acceptance criterion."""

    def record(name: str, ok: bool, detail: str) -> bool:
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


# --- hypothesis strategies ------------------------------------------------

def site_labels(cutoff=1):
    return st.builds(site, st.sampled_from(list(AtomLevel)),
                     st.integers(0, cutoff), st.integers(0, cutoff))


def mode_ids(n_sites):
    return st.builds(ModeId, st.sampled_from([ModeKind.EXTERNAL, ModeKind.PORT]),
                     st.integers(1, n_sites), st.sampled_from(POLS))


def basis_labels(n_sites, max_external=3):
    return st.builds(
        BasisLabel,
        st.tuples(*[site_labels() for _ in range(n_sites)]),
        st.lists(st.tuples(mode_ids(n_sites), st.integers(1, 2)), max_size=2).map(tuple),
    ).filter(lambda lab: sum(n for _, n in lab.modes) <= max_external)


amplitudes = st.complex_numbers(max_magnitude=2.0, allow_nan=False, allow_infinity=False).filter(
    lambda z: abs(z) > 1e-3)


@st.composite
def states(draw, n_sites=None, max_terms=5):
    n = draw(st.integers(1, 3)) if n_sites is None else n_sites
    labels = draw(st.lists(basis_labels(n), min_size=1, max_size=max_terms, unique=True))
    return StateVector({lab: draw(amplitudes) for lab in labels}, n_sites=n)


@st.composite
def one_photon_per_cavity_states(draw, n_sites):
    """Random superpositions with u+/u- atoms and exactly one photon per cavity."""
    choices = [site(AtomLevel.U_PLUS, 1, 0), site(AtomLevel.U_MINUS, 0, 1),
               site(AtomLevel.U_PLUS, 0, 1), site(AtomLevel.V, 1, 0)]
    labels = draw(st.lists(st.tuples(*[st.sampled_from(choices) for _ in range(n_sites)]),
                           min_size=1, max_size=6, unique=True))
    psi = StateVector({BasisLabel(s): draw(amplitudes) for s in labels}, n_sites=n_sites)
    return psi.normalize()
