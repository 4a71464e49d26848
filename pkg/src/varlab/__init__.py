"""Square variation of Haar-rotated orthonormal systems: exact variation
operators, Orlicz norms, the mass-halving decomposition and seeded studies."""

__version__ = "0.1.0"

from .grid import Grid, SampledFunction, integrate, lp_norm, make_uniform_grid
from .systems import (
    CoeffVector,
    DegenerateDensityError,
    OrthogonalMatrix,
    SampledSystem,
    gaussian_sequence,
    haar_orthogonal,
    reweight_system,
    rotate_system,
    trig_system,
    truncate_system,
    unit_vector_system,
)
from .variation import (
    BACKEND,
    lil_statistic,
    maximal_field,
    maximal_pointwise,
    optimal_partition,
    prefix_table,
    v_r_bruteforce,
    v_r_field,
    v_r_pointwise,
)
from .orlicz import OrliczModulus, k_star, luxemburg_norm, split_gamma_k
from .massdec import admissible_cover, assemble_tilde, blockwise_split, build_tree, majorant_audit, v2_audit
from .experiments import ExperimentConfig, run

__all__ = [
    "BACKEND", "CoeffVector", "DegenerateDensityError", "ExperimentConfig", "Grid", "OrliczModulus",
    "OrthogonalMatrix", "SampledFunction", "SampledSystem", "admissible_cover", "assemble_tilde",
    "blockwise_split", "build_tree", "gaussian_sequence", "haar_orthogonal", "integrate", "k_star",
    "lil_statistic", "lp_norm", "luxemburg_norm", "majorant_audit", "make_uniform_grid", "maximal_field",
    "maximal_pointwise", "optimal_partition", "prefix_table", "reweight_system", "rotate_system", "run",
    "split_gamma_k", "trig_system", "truncate_system", "unit_vector_system", "v2_audit", "v_r_bruteforce", "v_r_field",
    "v_r_pointwise",
]
