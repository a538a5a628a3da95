from .bourgain import (
    PartialEmbedding,
    RestrictedEmbedding,
    bourgain_restricted,
    partial_bourgain,
)
from .frechet import (
    FrechetMap,
    GammaParams,
    gamma_distance,
    gamma_matrix,
    inv_p,
    lp_norm_rows,
    phi_map,
    phi_separation_bound,
)
from .prioritized import (
    DistortionReport,
    EmbeddingMatrix,
    block_weights,
    embed_prioritized_dimension,
    embed_prioritized_lp,
    measure_distortion,
    stage_bound,
    triple_exp_blocks,
)

__all__ = [
    "DistortionReport",
    "EmbeddingMatrix",
    "FrechetMap",
    "GammaParams",
    "PartialEmbedding",
    "RestrictedEmbedding",
    "block_weights",
    "bourgain_restricted",
    "embed_prioritized_dimension",
    "embed_prioritized_lp",
    "gamma_distance",
    "gamma_matrix",
    "inv_p",
    "lp_norm_rows",
    "measure_distortion",
    "partial_bourgain",
    "phi_map",
    "phi_separation_bound",
    "stage_bound",
    "triple_exp_blocks",
]
