"""Interactive garment design from bi-colored texture edges.

The package splits into the texture representation (:mod:`bicolor`), color
statistics (:mod:`palette`), shading (:mod:`shading`), training losses
(:mod:`losses`), patch-based texture expansion (:mod:`patchmatch`), the
image synthesizer (:mod:`synthesizer`), the dataset pipeline
(:mod:`pipeline`) and the HTTP service (:mod:`service`).
"""

from .bicolor import (
    BiColoredEdge,
    BiColoredEdgeSet,
    BrushSpec,
    CannyConfig,
    brush_stroke,
    canny_edge_map,
    detect_texture_edges,
    link_chains,
    rasterize_bicolor,
    remove_corners,
    remove_outermost,
    sample_bicolor,
)
from .config import AppConfig, load_config
from .contour import ContourConfig, ContourMap, OpenContourError, extract_contour, outer_boundary, simplify_contour
from .document import DesignDocument, rasterize_strokes, strokes_from_mask
from .losses import (
    LossWeights,
    kl_color_loss,
    l1_loss,
    lsgan_d_loss,
    lsgan_g_loss,
    perceptual_loss,
    shading_dense_loss,
    shading_rec_loss,
    total_generator_loss,
    total_shading_loss,
)
from .palette import (
    ColorClusterStats,
    hierarchical_clusters,
    kmeans_clusters,
    recolor_clusters,
    recolor_edges,
    stats_from_labels,
)
from .patchmatch import NearestNeighborField, PMCfg, expand_texture, nnf_energy, nnf_search
from .raster import (
    GrayImage,
    InvalidArgumentError,
    RasterImage,
    RepresentationStack,
    load_rgb_png,
    save_rgb_png,
)
from .shading import IntrinsicPair, ShadeCfg, decompose, enhance, recompose, render_shading
from .synthesizer import PipelineResult, SynthCfg, SynthResult, full_pipeline, solve_harmonic, synthesize

__version__ = "0.1.0"

__all__ = [
    "AppConfig",
    "BiColoredEdge",
    "BiColoredEdgeSet",
    "BrushSpec",
    "CannyConfig",
    "ColorClusterStats",
    "ContourConfig",
    "ContourMap",
    "DesignDocument",
    "GrayImage",
    "IntrinsicPair",
    "InvalidArgumentError",
    "LossWeights",
    "NearestNeighborField",
    "OpenContourError",
    "PMCfg",
    "PipelineResult",
    "RasterImage",
    "RepresentationStack",
    "ShadeCfg",
    "SynthCfg",
    "SynthResult",
    "brush_stroke",
    "canny_edge_map",
    "decompose",
    "detect_texture_edges",
    "enhance",
    "expand_texture",
    "extract_contour",
    "full_pipeline",
    "hierarchical_clusters",
    "kl_color_loss",
    "kmeans_clusters",
    "l1_loss",
    "link_chains",
    "load_config",
    "load_rgb_png",
    "lsgan_d_loss",
    "lsgan_g_loss",
    "nnf_energy",
    "nnf_search",
    "outer_boundary",
    "perceptual_loss",
    "rasterize_bicolor",
    "rasterize_strokes",
    "recolor_clusters",
    "recolor_edges",
    "recompose",
    "remove_corners",
    "remove_outermost",
    "render_shading",
    "sample_bicolor",
    "save_rgb_png",
    "shading_dense_loss",
    "shading_rec_loss",
    "simplify_contour",
    "solve_harmonic",
    "stats_from_labels",
    "strokes_from_mask",
    "synthesize",
    "total_generator_loss",
    "total_shading_loss",
    "__version__",
]
