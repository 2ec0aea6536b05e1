"""Entanglement swapping of partially entangled qudit pairs assisted by
minimum-error, maximum-confidence and sequential maximum-confidence
discrimination, with a statevector oracle for verification."""

from .channels import SchmidtChannel, SetProfile, make_channel, maximally_entangled, set_profile
from .protocol import (
    Objective,
    StagePolicy,
    Strategy,
    SwapOutcome,
    adaptive_stage_policy,
    average_me,
    average_smc,
    failed_terminal_me,
    local_correction,
    mc_swap,
    me_swap,
    postselected_average,
    smc_swap,
    strategy_tree,
)

__version__ = "0.1.0"
