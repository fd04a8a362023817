"""Two-qubit-per-node quantum repeater simulator.

Library layout:

- :mod:`qrepeater.bell` -- Bell-diagonal states and the exact density-matrix form
- :mod:`qrepeater.ops` -- purification and swapping recurrences under noise
- :mod:`qrepeater.exact` -- brute-force 16x16 oracle for the same primitives
- :mod:`qrepeater.channel` -- lossy-link success probability, fidelity and timing
- :mod:`qrepeater.protocol` -- the nested pumping protocol and its time models
- :mod:`qrepeater.analysis` -- fixed points, asymptotes and parameter sweeps
- :mod:`qrepeater.cli` -- the ``qrepeater`` command-line front end
"""

from .bell import (
    BELL_VECTORS,
    BellDiagonalState,
    DensityMatrix,
    bell_project,
    fidelity,
    from_fidelity,
    to_density,
)
from .channel import (
    LinkParams,
    PhotonOracleResult,
    channel_efficiency,
    entangle_success_prob,
    expected_link_time,
    initial_fidelity,
    link_state,
    p_em_for_fidelity,
    photon_mode_oracle,
)
from .ops import NoiseParams, PurifyOutcome, connect_chain, purify, swap
from .protocol import (
    PairRecord,
    ProtocolConfig,
    ProtocolError,
    ProtocolResult,
    TimeDistribution,
    build_b_pair,
    build_c_pair,
    default_schedule,
    elementary_pair,
    monte_carlo_time,
    pump,
    round_span_up,
    run_protocol,
)
from .analysis import (
    FixedPointResult,
    SweepTable,
    asymptotic_fidelity,
    fixed_point_at_distance,
    sweep,
)

__all__ = [
    "BELL_VECTORS",
    "BellDiagonalState",
    "DensityMatrix",
    "FixedPointResult",
    "LinkParams",
    "NoiseParams",
    "PairRecord",
    "PhotonOracleResult",
    "ProtocolConfig",
    "ProtocolError",
    "ProtocolResult",
    "PurifyOutcome",
    "SweepTable",
    "TimeDistribution",
    "asymptotic_fidelity",
    "bell_project",
    "build_b_pair",
    "build_c_pair",
    "channel_efficiency",
    "connect_chain",
    "default_schedule",
    "elementary_pair",
    "entangle_success_prob",
    "expected_link_time",
    "fidelity",
    "fixed_point_at_distance",
    "from_fidelity",
    "initial_fidelity",
    "link_state",
    "monte_carlo_time",
    "p_em_for_fidelity",
    "photon_mode_oracle",
    "pump",
    "purify",
    "round_span_up",
    "run_protocol",
    "swap",
    "sweep",
    "to_density",
]

__version__ = "0.1.0"
