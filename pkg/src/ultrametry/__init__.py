"""Exact-arithmetic toolkit for finite ultrametric spaces and the monotone
extension theory of their scaling functions."""

from .errors import DomainError, InputError, UltrametryError
from .rationals import (
    INF,
    Interval,
    IntervalShape,
    format_rational,
    interval_contains,
    intervals_disjoint,
    parse_rational,
)
from .spaces import (
    FiniteDistanceSet,
    FiniteUltrametricSpace,
    ValidationReport,
    Verdict,
    compose_metric,
    diameter,
    diametrical_graph,
    distance_set,
    make_space,
    validate,
)
from .distsets import (
    ComponentDecomposition,
    DistanceSetDescriptor,
    Regime,
    RegimeTag,
    SequenceFamily,
    SequenceGapFamily,
    SequencePiece,
    classify,
    component_of,
    components,
    contains,
    from_finite,
    is_totally_bounded_distance_set,
    supremum,
)
from .preserving import (
    AffineForm,
    InverseMoebiusForm,
    MoebiusForm,
    Piece,
    PiecewiseMonotone,
    PreservingTag,
    PreservingVerdict,
    bounded_transform,
    classify_preserving,
    empirical_falsify,
    unbounded_transform,
)
from .wsim import (
    Bijection,
    ScalingFunction,
    WsimFailure,
    check_combinatorial_similarity,
    check_weak_similarity,
    find_weak_similarities,
    identity_bijection,
)
from .extension import (
    Blocked,
    Extended,
    ExtendedFunction,
    GeometricImage,
    GrowthImage,
    PowerImage,
    SequenceRule,
    SymbolicScaling,
    extend_pseudo,
    extend_strict,
    extend_ultra,
    gap_collapse_scaling,
)
from .generators import (
    Dendrogram,
    Leaf,
    Node,
    dendrogram_to_space,
    ex530_pair,
    max_space,
    p532_counterexample,
    random_space,
)

__all__ = [name for name in dir() if not name.startswith("_")]
