"""Expected number of Pareto optima in random multiobjective 0-1 optimization:
exact bounds, geometric predicates, instance constructions and Monte Carlo
experiments."""

from .core import (
    Domain,
    DominanceOrder,
    ObjectiveMatrix,
    ObjectiveVector,
    Sense,
    Solution,
    dominates,
    evaluate,
    pareto_filter,
)
from .enumeration import (
    CapacityError,
    ExplicitList,
    FixedCardinality,
    FullCube,
    GadgetTrees,
    ParetoSet,
    SignCube,
    SpanningTreesComplete,
    count_pareto,
    enumerate_feasible,
    pareto_bruteforce,
    pareto_incremental_cube,
    pareto_maxima_dc,
)
from .geometry import NumericFailure
from .sampling import DistributionSpec, MatrixDistribution, RandomStream, sample_matrix

__version__ = "0.1.0"
