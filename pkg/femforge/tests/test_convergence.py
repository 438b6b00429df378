"""
Mesh-refinement study on the manufactured cosine problem.
"""
import math
import os
import sys

import pytest

# Add the project root directory to the Python path if not already added
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '../..'))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from femforge.codegen import compile_form
from femforge.device import assemble_sparse, build_sparsity, create_launch_config, flatten_mesh
from femforge.fem import cosine_problem, instantiate, quadrature_rule
from femforge.linalg import cg_solve, l2_error
from femforge.meshgen import unit_square_mesh


@pytest.fixture(scope="module")
def cosine_errors():
    """
    L2 errors of the P1 solution on n = 16, 32, 64.
    """
    problem = cosine_problem()
    compiled = compile_form(instantiate(problem.weak_form()))
    fine_rule = quadrature_rule(4)
    errors = {}
    for n in (16, 32, 64):
        mesh = unit_square_mesh(n)
        system = assemble_sparse(compiled, flatten_mesh(mesh), build_sparsity(mesh),
                                 create_launch_config())
        result = cg_solve(system.A, system.b, tol=1e-10)
        assert result.converged
        errors[n] = l2_error(result.x, problem.exact, mesh, fine_rule)
    return errors


def test_errors_decrease_under_refinement(cosine_errors):
    """Test that each refinement reduces the error."""
    assert cosine_errors[16] > cosine_errors[32] > cosine_errors[64]
    assert cosine_errors[16] < 0.05


@pytest.mark.parametrize("coarse, fine", [(16, 32), (32, 64)])
def test_observed_order_is_two(cosine_errors, coarse, fine):
    """Test second-order L2 convergence of P1 elements."""
    # Act
    order = math.log2(cosine_errors[coarse] / cosine_errors[fine])

    # Assert
    assert order >= 1.9
