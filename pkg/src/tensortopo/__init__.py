"""Topology of 3D symmetric tensor fields on tetrahedral meshes.

The package turns a piecewise-linear symmetric tensor field into a
topological graph: degenerate curves traced through tetrahedra, the
neutral surface separating linear from planar behavior, mode regions
with Betti numbers, quaternion winding indices along curves, knot and
link invariants of the closed curves, and a serialized graph tying it
all together. The most common entry points are re-exported here; each
submodule remains importable on its own.
"""

from .curves import (
    Polyline3,
    curves_from_json,
    curves_to_json,
    is_linked,
    linking_integral,
    linking_verdict,
    writhe,
)
from .diagram import (
    DiagramError,
    IntractableDiagram,
    Knottedness,
    LaurentPoly,
    LinkDiagram,
    is_knotted,
    jones_polynomial,
    project_to_diagram,
    simplify_diagram,
)
from .extract import (
    DegenerateCurve,
    ExtractConfig,
    Linearity,
    NeutralSurface,
    PointClass,
    classify_curve,
    classify_point,
    extract_neutral_surface,
    face_degenerate_points,
    find_transition_points,
    subdivide_mesh,
    trace_degenerate_curves,
)
from .fields import (
    FIELD_IDS,
    AnalyticField,
    AxisymLoopField,
    ConstantDegenerateField,
    HopfPairField,
    LinearRandomField,
    LineWedgeField,
    PlaneSheetField,
    SphereShellField,
    TransformedField,
    make_field,
)
from .graph import (
    GRAPH_SCHEMA,
    EdgeKind,
    GraphEdge,
    GraphNode,
    NodeKind,
    TopoGraph,
    build_graph,
    deserialize,
    layout,
    serialize,
)
from .mesh import (
    PLField,
    TensorMesh,
    TFTError,
    generate_box,
    generate_mesh,
    generate_torus,
    interpolate,
    read_tft,
    sample_field_onto_mesh,
    write_tft,
)
from .regions import (
    BoundarySheet,
    Region,
    RegionRelation,
    RelationKind,
    Side,
    assign_curve_region,
    betti,
    compute_relations,
    euler_characteristic,
    region_volume,
    segment_regions,
)
from .tensor import (
    DEFAULT_MODE_EPS,
    EigenSystem,
    TensorClass,
    classify,
    deviator,
    eigen_decompose,
    eigenvalues,
    fro_norm,
    min_eigen_gap,
    mode,
    rotate_tensor,
)
from .winding import (
    FrameQuaternion,
    WindingError,
    WindingNumber,
    frame_quaternion,
    loop_winding,
    point_index,
    transport_winding,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "AnalyticField",
    "AxisymLoopField",
    "BoundarySheet",
    "ConstantDegenerateField",
    "DEFAULT_MODE_EPS",
    "DegenerateCurve",
    "DiagramError",
    "EdgeKind",
    "EigenSystem",
    "ExtractConfig",
    "FIELD_IDS",
    "FrameQuaternion",
    "GRAPH_SCHEMA",
    "GraphEdge",
    "GraphNode",
    "HopfPairField",
    "IntractableDiagram",
    "Knottedness",
    "LaurentPoly",
    "LineWedgeField",
    "LinearRandomField",
    "Linearity",
    "LinkDiagram",
    "NeutralSurface",
    "NodeKind",
    "PLField",
    "PlaneSheetField",
    "PointClass",
    "Polyline3",
    "Region",
    "RegionRelation",
    "RelationKind",
    "Side",
    "SphereShellField",
    "TFTError",
    "TensorClass",
    "TensorMesh",
    "TopoGraph",
    "TransformedField",
    "WindingError",
    "WindingNumber",
    "assign_curve_region",
    "betti",
    "build_graph",
    "classify",
    "classify_curve",
    "classify_point",
    "compute_relations",
    "curves_from_json",
    "curves_to_json",
    "deserialize",
    "deviator",
    "eigen_decompose",
    "eigenvalues",
    "euler_characteristic",
    "extract_neutral_surface",
    "face_degenerate_points",
    "find_transition_points",
    "frame_quaternion",
    "fro_norm",
    "generate_box",
    "generate_mesh",
    "generate_torus",
    "interpolate",
    "is_knotted",
    "is_linked",
    "jones_polynomial",
    "layout",
    "linking_integral",
    "linking_verdict",
    "loop_winding",
    "make_field",
    "min_eigen_gap",
    "mode",
    "point_index",
    "project_to_diagram",
    "read_tft",
    "region_volume",
    "rotate_tensor",
    "sample_field_onto_mesh",
    "segment_regions",
    "serialize",
    "simplify_diagram",
    "subdivide_mesh",
    "trace_degenerate_curves",
    "transport_winding",
    "writhe",
    "write_tft",
]
