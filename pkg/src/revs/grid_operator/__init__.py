from .qp import (
    build_operator_problem,
    largest_eigenvalue,
    operator_objective,
    solve_operator_step,
    verify_kkt,
)
