"""Stable matchings of discrete buyer/seller populations exchanging goods:
solvers for the optimal coupling, payoff and price recovery, and audits of
the structural predictions (stability, purity, support dimension, twist
conditions)."""

from .core import (
    Coupling,
    DiscreteMeasure,
    DualPotentials,
    GridSpec,
    ValidationError,
    coupling_objective,
    measure_from_csv,
    measure_to_csv,
    project,
)
from .diagnostics import (
    PriceTable,
    PurityReport,
    SplittingSetSample,
    StabilityReport,
    SupportDimensionReport,
    TwistReport,
    check_compatibility_1d,
    check_purity,
    check_strictly_hedonic,
    check_tss_bilinear,
    check_tzss_bilinear,
    compute_prices,
    sample_splitting_sets,
    support_dimension,
    verify_stability,
)
from .instances import (
    CounterexampleInstance,
    ModelInstance,
    counterexample_instance,
    counterexample_plane_coupling,
    random_instance,
)
from .reduction import ReducedSurplus, c_transform_U, c_transform_V, reduce
from .repro import EXAMPLE_IDS, run_example
from .serialize import dump_json, dumps_json, load_json
from .solver import (
    AlphaSearchResult,
    BruteForceResult,
    SolveResult,
    SolverInfeasible,
    brute_force,
    max_over_alpha,
    solve_bipartite,
    solve_hybrid,
    solve_tripartite_fixed_alpha,
)
from .surplus import (
    BilinearComponent,
    BilinearSurplus,
    CounterexampleSurplus,
    ExpCosSurplus,
    SignatureReport,
    StrictlyHedonicSurplus,
    Supermodular1DSurplus,
    SurplusModel,
    TabulatedComponent,
    TabulatedSurplus,
    signature,
    surplus_from_dict,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaSearchResult",
    "BilinearComponent",
    "BilinearSurplus",
    "BruteForceResult",
    "Coupling",
    "CounterexampleInstance",
    "CounterexampleSurplus",
    "DiscreteMeasure",
    "DualPotentials",
    "EXAMPLE_IDS",
    "ExpCosSurplus",
    "GridSpec",
    "ModelInstance",
    "PriceTable",
    "PurityReport",
    "ReducedSurplus",
    "SignatureReport",
    "SolveResult",
    "SolverInfeasible",
    "SplittingSetSample",
    "StabilityReport",
    "StrictlyHedonicSurplus",
    "Supermodular1DSurplus",
    "SupportDimensionReport",
    "SurplusModel",
    "TabulatedComponent",
    "TabulatedSurplus",
    "TwistReport",
    "ValidationError",
    "brute_force",
    "c_transform_U",
    "c_transform_V",
    "check_compatibility_1d",
    "check_purity",
    "check_strictly_hedonic",
    "check_tss_bilinear",
    "check_tzss_bilinear",
    "compute_prices",
    "counterexample_instance",
    "counterexample_plane_coupling",
    "coupling_objective",
    "dump_json",
    "dumps_json",
    "load_json",
    "max_over_alpha",
    "measure_from_csv",
    "measure_to_csv",
    "project",
    "random_instance",
    "reduce",
    "run_example",
    "sample_splitting_sets",
    "signature",
    "solve_bipartite",
    "solve_hybrid",
    "solve_tripartite_fixed_alpha",
    "support_dimension",
    "surplus_from_dict",
    "verify_stability",
]
