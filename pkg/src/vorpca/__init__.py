"""PCA with outliers, solved three ways.

An exact brute-force subset oracle, an exact higher-degree Voronoi arc
arrangement in the plane, sampled-cell enumeration in general dimension, and
a randomized Grassmannian-sampling solver, together with the Grassmannian
geometry the randomized analysis rests on.
"""

from .bench import (
    BenchConfig,
    BenchRecord,
    PlantedSpec,
    losses_match,
    run_benchmark,
    runtime_table,
    success_rate_table,
    write_records_jsonl,
)
from .core import (
    PcaSolution,
    Subspace,
    TrimmedLoss,
    as_matrix,
    center_rows,
    dist_point_subspace,
    objective_eq2,
    pca_fit,
    squared_distances,
    trimmed_loss,
)
from .data import (
    Instance,
    generate_planted_instance,
    load_basis,
    read_csv,
    save_instance,
    write_csv,
)
from .grassmann import (
    BallMeasureEstimate,
    SeededRng,
    ball_measure_lower_bound,
    geodesic_neighbor,
    grassmann_distance,
    grassmannian_dimension,
    grassmannian_volume,
    mc_ball_measure,
    principal_angles,
    required_samples,
    sample_stream,
    sample_uniform,
)
from .randomized import (
    DegenerateGap,
    GapReport,
    alpha_gap,
    ordering_preservation_radius,
    randomized_solve,
)
from .voronoi import (
    ArcCell,
    BudgetExceededError,
    SolveResult,
    arc_breakpoints_2d,
    arc_diagram_svg,
    brute_force_solve,
    build_arc_diagram_2d,
    enumerate_candidate_sets_sampled,
    voronoi_solve_2d,
    voronoi_solve_sampled,
)

__version__ = "0.1.0"
