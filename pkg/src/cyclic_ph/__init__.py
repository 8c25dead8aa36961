"""Fast persistent homology for filtrations of cyclic graphs."""

from .barcode import Barcode, EventLog, PersistenceInterval
from .dynamics import (
    Contractible,
    DynamicsState,
    EvenWedge,
    OddSphere,
    WindingFraction,
    classify,
    dynamics_of,
    even_wedge,
    homotopy_type,
    parse_homotopy_type,
    winding_fraction,
)
from .errors import (
    CapExceeded,
    CyclicPHError,
    DomainError,
    InputError,
    InvalidFiltration,
    InvalidStep,
    NotConvexPosition,
    NotCyclicError,
)
from .geometry import (
    Circle,
    Ellipse,
    EdgeOrienter,
    OrientedEdge,
    PointCloud,
    SymmetricMomentCurve,
    arc_condition_all_scales,
    arc_condition_check,
    build_filtration,
    cyclic_order,
    ellipse_evolute_contained,
    ellipse_evolute_point,
    moment_arc_condition,
    moment_sq_dist,
    orient_new_edge,
    sample_curve,
)
from .graph import (
    AddEdge,
    AddVertex,
    ConeMarker,
    CyclicGraph,
    Filtration,
    apply_step,
    degree,
    is_cone,
    random_filtration,
    regular_rounds,
    validate,
)
from .oracle import FilteredComplex, betti_numbers, clique_complex, oracle_barcode, reduce
from .persistence import even_persistence, full_persistence, odd_persistence

__all__ = [name for name in dir() if not name.startswith("_")]
