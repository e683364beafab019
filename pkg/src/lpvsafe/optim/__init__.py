"""Small dense solvers: two-phase simplex LP and barrier-based LMI feasibility."""
from .linalg import max_eig, min_eig, null_space_basis, numerical_rank
from .lmi import LmiBlock, LmiProblem, solve_lmi
from .lp import LinearProgram, SolveReport, solve_lp

__all__ = [
    "LinearProgram", "LmiBlock", "LmiProblem", "SolveReport",
    "max_eig", "min_eig", "null_space_basis", "numerical_rank", "solve_lmi", "solve_lp",
]
