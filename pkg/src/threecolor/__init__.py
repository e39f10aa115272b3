"""Three-colorings of planar point sets avoiding monochromatic heavy translates."""

from .body import (
    Cone,
    ConvexBody,
    GaussRange,
    TriPartition,
    arc_gauss_length,
    equilateral_cones,
    gauss_range,
    make_disk_approx,
    make_polygon,
    supporting_line,
    tri_partition,
    tri_partition_cones,
)
from .cones import QuasiOrderMultiDigraph, build_multidigraph, cone_contains, quasi_order_arcs
from .essw import (
    DominationFamily,
    EsswParams,
    build_partition_tree,
    capped_distribution,
    dominate,
    fractional_dominating_distribution,
    paper_constants,
    partition_step,
    practical_params,
    sample_dominating_family,
    verify_domination,
)
from .estimators import ConeThreeColoring, TranslateThreeColoring
from .exceptions import *  # noqa: F401,F403
from .generators import AbstractHypergraph, build_Hkl, check_not_two_colorable, random_points
from .oracle import enumerate_cone_ranges, enumerate_translate_ranges, verify_coloring
from .pipeline import (
    GridCell,
    PipelineConfig,
    RangeClass,
    choose_r,
    classify_translate,
    color_cell,
    color_points,
    cone_color_points,
    grid_partition,
    m_prime,
)
from .polychromatic import (
    Coloring,
    RangeHypergraph,
    check_polychromatic,
    check_proper,
    polychromatic_color,
    sharpness_fixture,
    union_combine,
)

__version__ = "0.1.0"
