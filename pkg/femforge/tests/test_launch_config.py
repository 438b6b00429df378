"""
Tests for the launch configuration factory.
"""
import os
import sys

import pytest

# Add the project root directory to the Python path if not already added
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '../..'))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from femforge.device import (
    LaunchConfig,
    create_launch_config,
    create_launch_config_from_env,
    workers_from_env,
)


def test_create_launch_config_defaults():
    """Test the default block geometry."""
    # Act
    cfg = create_launch_config()

    # Assert
    assert isinstance(cfg, LaunchConfig)
    assert cfg.block_dim == (3, 9, 4)
    assert cfg.threads_per_block == 108
    assert cfg.grid_dim(18) == 5
    assert cfg.effective_workers() == 1


def test_create_launch_config_mode_aliases():
    """Test short and mixed-case mode names."""
    assert create_launch_config("PAR", workers=4).mode == "parallel"
    assert create_launch_config("det", workers=4).effective_workers() == 1


def test_create_unsupported_mode():
    """Test an unknown execution mode."""
    # Act & Assert
    with pytest.raises(ValueError) as excinfo:
        create_launch_config("turbo")

    assert "Unsupported execution mode: turbo" in str(excinfo.value)


def test_create_unsupported_engine():
    """Test an unknown execution engine."""
    with pytest.raises(ValueError, match="Unsupported engine: warp"):
        create_launch_config(engine="warp")


def test_block_thread_limit():
    """Test the 1024-thread limit of a block."""
    assert create_launch_config(elems_per_block=37).threads_per_block == 999
    with pytest.raises(ValueError, match="limit is 1024"):
        create_launch_config(elems_per_block=38)


def test_launch_config_is_frozen():
    """Test that a validated configuration cannot change."""
    cfg = create_launch_config()
    with pytest.raises(Exception):
        cfg.workers = 8


def test_workers_from_env(mock_env_vars):
    """Test reading the worker count from the environment."""
    # Act
    cfg = create_launch_config_from_env(mode="parallel")

    # Assert
    assert workers_from_env() == 3
    assert cfg.workers == 3
    assert create_launch_config_from_env(workers=5).workers == 5


@pytest.mark.parametrize("raw", ["zero", "0", "-2"])
def test_workers_from_env_rejects_bad_values(mock_env_vars, raw):
    """Test invalid FEMFORGE_WORKERS values."""
    # Arrange
    os.environ["FEMFORGE_WORKERS"] = raw

    # Act & Assert
    with pytest.raises(ValueError, match="FEMFORGE_WORKERS environment variable must be a positive integer"):
        workers_from_env()


def test_workers_default_without_environment(clean_env):
    """Test the fallback when the variable is unset."""
    assert workers_from_env() == 1
