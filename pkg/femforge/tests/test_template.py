"""
Tests for kernel source emission.
"""
import os
import sys
from pathlib import Path

import pytest

# Add the project root directory to the Python path if not already added
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '../..'))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from femforge.codegen import KernelTemplate, emit_source, lower
from femforge.codegen.template import render_function
from femforge.errors import TemplateError
from femforge.fem import ETA, XI

PARAMS = {"elems_per_block": 4, "max_nz": 7}
DATA_DIR = Path(__file__).parent / "data"


def test_emit_source_replaces_every_placeholder(demo_compiled):
    """Test that the rendered source has no placeholders left."""
    # Act
    source = emit_source(demo_compiled, PARAMS)

    # Assert
    assert "{{" not in source
    assert "{%" not in source
    assert "#define N_QUAD 3" in source
    assert "#define N_LOCAL 3" in source
    assert "#define ELEMS_PER_BLOCK 4" in source
    assert "#define MAX_NZ 7" in source
    assert "__device__ double bilinear_2_2(const double *a)" in source
    assert "__device__ double linear_0(const double *a)" in source
    assert "atomicAdd" in source


def test_emit_source_renders_both_scatter_variants(demo_compiled):
    """Test the dense and ELL kernels and the trap on a missing ELL slot."""
    # Act
    source = emit_source(demo_compiled, PARAMS)

    # Assert
    assert source.count("__global__ void assemble_dense(") == 1
    assert source.count("__global__ void assemble_ell(") == 1
    assert "if (slot < 0) __trap();" in source
    assert "if (slot >= 0)" not in source
    assert source.index("assemble_dense(") < source.index("assemble_ell(")


def test_emit_source_matches_snapshot(two_node_compiled):
    """Test the full source of a small form byte for byte."""
    # Act
    source = emit_source(two_node_compiled, {"elems_per_block": 2, "max_nz": 5})

    # Assert
    assert source.encode("utf-8") == (DATA_DIR / "two_node_form.cu").read_bytes()


def test_emit_source_is_deterministic(demo_compiled):
    """Test that the same form renders byte-identical source."""
    assert emit_source(demo_compiled, PARAMS) == emit_source(demo_compiled, PARAMS)


def test_emit_source_requires_launch_constants(demo_compiled):
    """Test that a missing launch constant is reported."""
    with pytest.raises(TemplateError, match="MAX_NZ"):
        emit_source(demo_compiled, {"elems_per_block": 4})


def test_template_validates_placeholders():
    """Test that every placeholder must occur exactly once."""
    with pytest.raises(TemplateError, match="occurs 0 times"):
        KernelTemplate("no placeholders here")
    twice = "{{ INTEGRAND_BODY }} {{ N_QUAD }} {{ N_QUAD }} {{ N_LOCAL }} {{ ELEMS_PER_BLOCK }} {{ MAX_NZ }}"
    with pytest.raises(TemplateError, match="occurs 2 times"):
        KernelTemplate(twice)
    text = "{{INTEGRAND_BODY}} {{N_QUAD}} {{N_LOCAL}} {{ELEMS_PER_BLOCK}} {{MAX_NZ}} {{EXTRA}}"
    with pytest.raises(TemplateError, match="Unknown placeholders"):
        KernelTemplate(text)


def test_template_rejects_invalid_syntax():
    """Test that a malformed template tag is a template error."""
    with pytest.raises(TemplateError, match="Invalid kernel template"):
        KernelTemplate("{% if %}{{ N_QUAD }}")


def test_custom_template_renders():
    """Test rendering a minimal template."""
    # Arrange
    template = KernelTemplate("{{N_QUAD}}/{{N_LOCAL}}/{{ELEMS_PER_BLOCK}}/{{MAX_NZ}}\n{{INTEGRAND_BODY}}")

    # Act
    text = template.render({"N_QUAD": 3, "N_LOCAL": 3, "ELEMS_PER_BLOCK": 2, "MAX_NZ": 7,
                            "INTEGRAND_BODY": "body"})

    # Assert
    assert text == "3/3/2/7\nbody"


def test_custom_template_reports_missing_value():
    """Test that rendering without every value fails."""
    # Arrange
    template = KernelTemplate("{{N_QUAD}}/{{N_LOCAL}}/{{ELEMS_PER_BLOCK}}/{{MAX_NZ}}\n{{INTEGRAND_BODY}}")

    # Act & Assert
    with pytest.raises(TemplateError, match="Missing value"):
        template.render({"N_QUAD": 3, "N_LOCAL": 3, "ELEMS_PER_BLOCK": 2, "MAX_NZ": 7})


def test_render_function_lists_registers():
    """Test the device function rendered for one program."""
    # Act
    text = render_function("f", lower(XI / ETA))

    # Assert
    assert text.startswith("__device__ double f(const double *a)\n{")
    assert "= a[" in text
    assert " / " in text
    assert text.rstrip().endswith("}")
