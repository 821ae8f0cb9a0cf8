"""Hitting sets for line-separable disk instances.

Library layout:

- geom: planar types, predicates, normalization, containment filter.
- extremes: leftmost/rightmost hit point per disk (general and congruent-disk paths).
- pruning: segment tree of common intersections; droppable-point detection.
- solver: reduction to 1D stabbing, greedy 1D solve, end-to-end pipeline.
- oracles: brute-force ground truth and seeded instance generators.
- cli: file formats and the ``hitset`` command.
"""

from .geom import (
    DEFAULT_EPS,
    MODE_CONSTRAINED,
    MODE_SEPARABLE,
    DegenerateDisk,
    Disk,
    DiskSpan,
    DuplicateX,
    HittingSet,
    Infeasible,
    Instance,
    NotSeparable,
    PlanarPoint,
    PrereqViolated,
    disk_span,
    normalize,
    point_in_disk,
    remove_contained,
    validate_single_intersection,
)
from .extremes import (
    ABRecord,
    ABTable,
    EmptyPointSet,
    EnvelopeChain,
    RadiusMismatch,
    build_envelope_tree,
    build_nn_tree,
    compute_ab,
    compute_ab_unit,
    nn_query,
)
from .oracles import (
    BRUTE_GUARD,
    KIND_CONSTRAINED,
    KIND_FROM_CONSTRAINED,
    KIND_UNIT,
    KINDS,
    GenConfig,
    GenerationFailure,
    TooLarge,
    brute_ab,
    brute_optimum,
    brute_prunable,
    brute_prunable_closed,
    generate,
    generate_raw,
    hit_sets,
)
from .pruning import (
    ArcChain,
    SegTreeNode,
    build_segment_tree,
    common_intersection,
    find_prunable,
    point_in_chain,
)
from .solver import (
    Infeasible1D,
    OneDInstance,
    reduce_to_1d,
    solve,
    solve_1d,
    solve_detailed,
    verify_solution,
)

__version__ = "0.1.0"
