"""State-vector simulation of on-demand polarisation-entangled multiphoton
generation from N atom-cavity systems.

Modules: :mod:`~multiphoton.hilbert` (sparse Fock states),
:mod:`~multiphoton.stirap` (ideal maps, Hamiltonians, pulse integrator),
:mod:`~multiphoton.optics` (networks and leakage),
:mod:`~multiphoton.protocol` (initialisation, mapping, repeat-until-success)
and :mod:`~multiphoton.cli`.
"""

from .hilbert import (
    AtomLevel,
    BasisLabel,
    ModeId,
    Pol,
    SiteLabel,
    StateVector,
    apply_annihilation,
    apply_creation,
    cavity_mode,
    external_mode,
    fidelity,
    inner_product,
    make_product_state,
    port_mode,
    project_onto_external_pattern,
    site,
)
from .optics import (
    ScatteringMatrix,
    beamsplitter_50_50,
    dft_multiport,
    identity,
    leak_all,
    leak_cavity_direct,
    leak_cavity_through_network,
)
from .protocol import (
    DetectionPattern,
    ProtocolConfig,
    enumerate_outcomes,
    monte_carlo_repeat,
    prepare_phi0,
    run_full_protocol,
    run_mapping,
    singlet_reference,
    w_state_reference,
)
from .stirap import (
    LambdaParams,
    PulseProfile,
    SiteCouplings,
    build_lambda_hamiltonian,
    build_site_hamiltonian,
    dark_state,
    evolve_pulse,
    ideal_emit_superposition,
    ideal_map_to_photon,
    ideal_single_map,
    strong_coupling_ratio,
)

__all__ = [
    "AtomLevel",
    "BasisLabel",
    "ModeId",
    "Pol",
    "SiteLabel",
    "StateVector",
    "apply_annihilation",
    "apply_creation",
    "cavity_mode",
    "external_mode",
    "fidelity",
    "inner_product",
    "make_product_state",
    "port_mode",
    "project_onto_external_pattern",
    "site",
    "ScatteringMatrix",
    "beamsplitter_50_50",
    "dft_multiport",
    "identity",
    "leak_all",
    "leak_cavity_direct",
    "leak_cavity_through_network",
    "DetectionPattern",
    "ProtocolConfig",
    "enumerate_outcomes",
    "monte_carlo_repeat",
    "prepare_phi0",
    "run_full_protocol",
    "run_mapping",
    "singlet_reference",
    "w_state_reference",
    "LambdaParams",
    "PulseProfile",
    "SiteCouplings",
    "build_lambda_hamiltonian",
    "build_site_hamiltonian",
    "dark_state",
    "evolve_pulse",
    "ideal_emit_superposition",
    "ideal_map_to_photon",
    "ideal_single_map",
    "strong_coupling_ratio",
]

__version__ = "0.1.0"
