"""Column subset selection for entrywise low-rank approximation under general losses."""
from .errors import (BudgetError, CapabilityError, GenerationError, GlramError,
                     LemmaPreconditionError, SolverError)
from .instances import (NoiseModel, PlantedInstance, gen_experiment_block, gen_huber_hard,
                        gen_identity_jl, gen_planted, gen_reverse_huber_hard)
from .loss import (HUBER, L1, L2, LossSpec, check_ati, make_loss, matrix_cost, parse_loss,
                   vector_cost)
from .matrix import (RngState, column_set, least_squares_minnorm, sample_subset,
                     subset_columns, truncated_frobenius_rank_k)
from .regression import (RegressionConfig, RegressionOutcome, batch_regress,
                         build_regular_partition, solve_irls, solve_l0, solve_l2)
from .selector import SelectionTrace, SelectorConfig, fit_back, select_columns

__version__ = "0.1.0"

__all__ = [
    "BudgetError", "CapabilityError", "GenerationError", "GlramError",
    "LemmaPreconditionError", "SolverError",
    "NoiseModel", "PlantedInstance", "gen_experiment_block", "gen_huber_hard",
    "gen_identity_jl", "gen_planted", "gen_reverse_huber_hard",
    "HUBER", "L1", "L2", "LossSpec", "check_ati", "make_loss", "matrix_cost", "parse_loss",
    "vector_cost",
    "RngState", "column_set", "least_squares_minnorm", "sample_subset", "subset_columns",
    "truncated_frobenius_rank_k",
    "RegressionConfig", "RegressionOutcome", "batch_regress", "build_regular_partition",
    "solve_irls", "solve_l0", "solve_l2",
    "SelectionTrace", "SelectorConfig", "fit_back", "select_columns",
]
