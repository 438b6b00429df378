"""
Pytest configuration file.
"""
import os
import sys

import numpy as np
import pytest

# Add the project root directory to the Python path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '../..')))

from femforge.codegen import CompiledForm, compile_form, lower
from femforge.fem import (
    ETA,
    XI,
    FunctionSpace,
    Mesh,
    WeakForm,
    demo_problem,
    dot,
    grad,
    instantiate,
    quadrature_rule,
)
from femforge.meshgen import unit_square_mesh
from femforge.symbolic import parse, sin

FEMFORGE_ENV_VARS = ("FEMFORGE_WORKERS", "FEMFORGE_MEM_CAP_BYTES", "FEMFORGE_LOG_LEVEL",
                     "FEMFORGE_RUN_BENCH")


@pytest.fixture
def unit_triangle():
    """
    The reference triangle (0, 0), (1, 0), (0, 1) as a one-element mesh.
    """
    return Mesh(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), np.array([[0, 1, 2]]))


@pytest.fixture
def stiffness_form():
    """
    sigma = I, lambda = 0 with f = 1.
    """
    return WeakForm.build(FunctionSpace(), lambda u, v: dot(grad(v), grad(u)), lambda v: v)


@pytest.fixture
def mass_form():
    """
    sigma = 0, lambda = 1 with f = 1.
    """
    return WeakForm.build(FunctionSpace(), lambda u, v: u * v, lambda v: v)


@pytest.fixture(scope="session")
def demo_compiled():
    """
    Compiled form of the demo problem (built once per session).
    """
    return compile_form(instantiate(demo_problem().weak_form()))


@pytest.fixture(scope="session")
def two_node_compiled():
    """
    Two-node form with hand-picked integrands on the one-point rule.

    Its kernel source and disassembly are checked in under data/.
    """
    s = sin(XI * ETA)
    bilinear = ((lower(s ** 2 + s), lower(XI - 2 * ETA)),
                (lower(1 / (XI + 1)), lower(XI ** 6)))
    linear = (lower(parse("2*3 + sqrt(16) - 1/4")), lower(XI * ETA))
    return CompiledForm(bilinear, linear, quadrature_rule(1), source=None)


@pytest.fixture(scope="session")
def small_meshes():
    """
    Structured meshes used by the oracle and consistency checks.
    """
    return {n: unit_square_mesh(n) for n in (3, 4, 16)}


@pytest.fixture
def mock_env_vars():
    """
    Set up mock environment variables for testing.
    """
    original_env = os.environ.copy()

    for name in FEMFORGE_ENV_VARS:
        os.environ.pop(name, None)
    os.environ["FEMFORGE_WORKERS"] = "3"
    os.environ["FEMFORGE_MEM_CAP_BYTES"] = "4096"

    yield

    # Restore original environment
    os.environ.clear()
    os.environ.update(original_env)


@pytest.fixture
def clean_env():
    """
    Remove every FEMFORGE_* variable for the duration of a test.
    """
    original_env = os.environ.copy()

    for name in FEMFORGE_ENV_VARS:
        os.environ.pop(name, None)

    yield

    # Restore original environment
    os.environ.clear()
    os.environ.update(original_env)
