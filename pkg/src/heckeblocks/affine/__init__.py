"""Affine sl2 at level k: modes, (twisted) vacuum modules, Sugawara operators."""

from .lemmas import (
    LemmaReport,
    PresentationReport,
    StateCheck,
    check_currents,
    check_virasoro,
    conjugation_coweight_residual,
    conjugation_nilpotent_residual,
    current_residual,
    sweep_conjugation_coweight,
    sweep_conjugation_nilpotent,
    verify_conjugation_coweight,
    verify_conjugation_nilpotent,
    verify_minuscule_presentation,
    virasoro_residual,
)
from .lie import K, TABLE, LieData, ModeElement, ad_loop, bracket_modes, correction_mode, spectral_flow
from .modules import (
    VACUUM,
    CyclicVector,
    ModuleState,
    TruncationError,
    annihilates,
    apply_mode,
    induced,
    scaled_sugawara_apply,
    states_up_to_depth,
    sugawara_apply,
    vacuum_basis,
)
