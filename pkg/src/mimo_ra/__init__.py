"""Monte Carlo simulator for pilot-based random access in a crowded
massive MIMO cell: strongest-user collision resolution (SUCRe), access class
barring with uplink power control (ACBPC), and a retransmission-only baseline.
"""

__version__ = "0.1.0"

from .geometry import (
    CellLayout,
    ChannelVector,
    LargeScaleGain,
    UePosition,
    draw_channel,
    large_scale_gain,
    perturb_beta,
    place_ue,
    spawn_interferers,
)
from .protocols import (
    Decision,
    PowerPolicy,
    acbpc_decide,
    baseline_decide,
    cell_edge_tx_power,
    p_res_bound,
    sucre_bias,
    sucre_decide,
    tx_power,
)
from .signal_model import (
    AlphaEstimate,
    DecisionInput,
    PilotObservation,
    downlink_observation,
    estimate_alpha,
    estimate_contenders,
    estimate_omega_bar,
    gamma_ratio_sq,
    uplink_observation,
)
from .config import (
    PRESET_NAMES,
    ExperimentPreset,
    format_config,
    get_preset,
    load_config,
    parse_config_text,
)
from .metrics import MetricsTable
from .results import RunRecord, make_out_dir, write_results
from .simulator import (
    RunContext,
    SimParams,
    SweepAxis,
    UeEpisode,
    build_context,
    derive_seed,
    resolve_pilot,
    run,
    run_sharded,
    sweep,
)

__all__ = [
    "__version__",
    "CellLayout",
    "UePosition",
    "LargeScaleGain",
    "ChannelVector",
    "PilotObservation",
    "DecisionInput",
    "AlphaEstimate",
    "PowerPolicy",
    "Decision",
    "place_ue",
    "large_scale_gain",
    "perturb_beta",
    "draw_channel",
    "spawn_interferers",
    "uplink_observation",
    "downlink_observation",
    "gamma_ratio_sq",
    "estimate_alpha",
    "estimate_contenders",
    "estimate_omega_bar",
    "cell_edge_tx_power",
    "tx_power",
    "sucre_bias",
    "sucre_decide",
    "acbpc_decide",
    "baseline_decide",
    "p_res_bound",
    "MetricsTable",
    "PRESET_NAMES",
    "ExperimentPreset",
    "RunRecord",
    "parse_config_text",
    "format_config",
    "load_config",
    "get_preset",
    "make_out_dir",
    "write_results",
    "SimParams",
    "RunContext",
    "UeEpisode",
    "SweepAxis",
    "build_context",
    "derive_seed",
    "resolve_pilot",
    "run",
    "run_sharded",
    "sweep",
]
