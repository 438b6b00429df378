"""
Tests for the integrand evaluator factory.
"""
import os
import sys

import numpy as np
import pytest

# Add the project root directory to the Python path if not already added
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '../..'))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from femforge.codegen import (
    BILINEAR,
    LINEAR,
    CompiledEvaluator,
    IntegrandEvaluator,
    InterpretedEvaluator,
    create_evaluator,
)

ARGS = [1 / 6, 2 / 3, 0.0, 0.0, 0.5, 0.0, 0.0, 0.5]


def test_create_compiled_evaluator(demo_compiled):
    """Test creating the compiled evaluator."""
    # Act
    evaluator = create_evaluator("compiled", demo_compiled)

    # Assert
    assert isinstance(evaluator, CompiledEvaluator)
    assert isinstance(evaluator, IntegrandEvaluator)
    assert evaluator.name == "compiled"
    assert evaluator.n_local == 3


def test_create_interpreted_evaluator_case_insensitive(demo_compiled):
    """Test creating the interpreted evaluator with a mixed-case name."""
    # Act
    evaluator = create_evaluator("Interpreted", demo_compiled)

    # Assert
    assert isinstance(evaluator, InterpretedEvaluator)
    assert evaluator.name == "interpreted"


def test_create_unsupported_evaluator(demo_compiled):
    """Test creating an evaluator with an unsupported name."""
    # Act & Assert
    with pytest.raises(ValueError) as excinfo:
        create_evaluator("gpu", demo_compiled)

    assert "Unsupported evaluator: gpu" in str(excinfo.value)


def test_evaluators_agree(demo_compiled):
    """Test that both strategies compute the same integrand values."""
    # Arrange
    compiled = create_evaluator("compiled", demo_compiled)
    interpreted = create_evaluator("interpreted", demo_compiled)
    batch = np.tile(np.array(ARGS)[:, None], (1, 5))

    for kind, count in ((BILINEAR, 9), (LINEAR, 3)):
        for entry in range(count):
            # Act
            a = compiled.evaluate(kind, entry, ARGS)
            b = interpreted.evaluate(kind, entry, ARGS)

            # Assert
            assert a == pytest.approx(b, rel=1e-14, abs=1e-14)
            np.testing.assert_allclose(compiled.evaluate_batch(kind, entry, batch), np.full(5, a),
                                       rtol=1e-14, atol=1e-14)
            np.testing.assert_allclose(interpreted.evaluate_batch(kind, entry, batch), np.full(5, b),
                                       rtol=1e-14, atol=1e-14)


def test_unknown_integrand_kind_is_rejected(demo_compiled):
    """Test that only bilinear and linear integrands exist."""
    evaluator = create_evaluator("compiled", demo_compiled)
    with pytest.raises(ValueError):
        evaluator.evaluate("boundary", 0, ARGS)
