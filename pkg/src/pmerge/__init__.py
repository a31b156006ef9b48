"""Constant-period merging comparator networks: constructions, simulation and
checks of their merging and sorting behaviour."""

from .constructions import NetworkParams, ParameterError, build_cw, build_m, build_p, params
from .network import Comparator, Network, NetworkError, Stage, apply_network, apply_stage, compact_form, delay, restrict
from .simulator import RunTrace, VerificationFailure, merge, run_periodic, sort_until_done

__all__ = [
    "Comparator",
    "Network",
    "NetworkError",
    "NetworkParams",
    "ParameterError",
    "RunTrace",
    "Stage",
    "VerificationFailure",
    "apply_network",
    "apply_stage",
    "build_cw",
    "build_m",
    "build_p",
    "compact_form",
    "delay",
    "merge",
    "params",
    "restrict",
    "run_periodic",
    "sort_until_done",
]
