"""
Kernel source emission from a jinja2 template.

The template holds the accelerator kernels of the atomic-add assembly in a
CUDA-like dialect; integrand bodies, quadrature tables and launch constants
are rendered in at runtime. The text is for inspection only.
"""
import math
from typing import Dict, Mapping, Optional, Union

from jinja2 import Environment, StrictUndefined, TemplateSyntaxError, UndefinedError, meta, nodes

from ..errors import TemplateError
from ..fem.reference import QuadratureRule
from ..fem.weakform import InstantiatedForm
from .lower import CompiledForm, compile_form
from .program import KernelProgram, Opcode

KERNEL_SOURCE = r"""// Generated by femforge. Do not edit.
#define N_QUAD {{ N_QUAD }}
#define N_LOCAL {{ N_LOCAL }}
#define ELEMS_PER_BLOCK {{ ELEMS_PER_BLOCK }}
#define MAX_NZ {{ MAX_NZ }}
#define N_ENTRIES (N_LOCAL * N_LOCAL)

{{ INTEGRAND_BODY }}

__device__ void load_arguments(double *args, int q, const double *sX, const double *sY, int le)
{
    args[0] = QUAD_POINTS[q][0];
    args[1] = QUAD_POINTS[q][1];
    for (int k = 0; k < N_LOCAL; ++k) {
        args[2 + 2 * k] = sX[le * N_LOCAL + k];
        args[3 + 2 * k] = sY[le * N_LOCAL + k];
    }
}

__device__ int find_slot(const int *gNbrNodeIdx, const int *gNbrNodeLen, int row, int col)
{
    const int *cols = gNbrNodeIdx + (size_t)row * MAX_NZ;
    int lo = 0;
    int hi = gNbrNodeLen[row] - 1;
    while (lo <= hi) {
        const int mid = (lo + hi) / 2;
        if (cols[mid] == col) return mid;
        if (cols[mid] < col) lo = mid + 1; else hi = mid - 1;
    }
    return -1;
}
{% macro assembly_kernel(sparse) %}
{% if sparse %}
extern "C" __global__ void assemble_ell(const double *X, const double *Y, const int *gIdx,
                                        int n_elements, const int *gNbrNodeLen,
                                        const int *gNbrNodeIdx, double *A, double *b)
{% else %}
// blockDim = (N_QUAD, N_ENTRIES, ELEMS_PER_BLOCK); one element per threadIdx.z.
extern "C" __global__ void assemble_dense(const double *X, const double *Y, const int *gIdx,
                                          int n_elements, int n_nodes, double *A, double *b)
{% endif %}
{
    __shared__ double sX[ELEMS_PER_BLOCK * N_LOCAL];
    __shared__ double sY[ELEMS_PER_BLOCK * N_LOCAL];
    __shared__ int sIdx[ELEMS_PER_BLOCK * N_LOCAL];
    __shared__ double sA[ELEMS_PER_BLOCK * N_ENTRIES];
    __shared__ double sb[ELEMS_PER_BLOCK * N_LOCAL];

    const int q = threadIdx.x;
    const int entry = threadIdx.y;
    const int le = threadIdx.z;
    const int e = blockIdx.x * ELEMS_PER_BLOCK + le;
    const bool live = e < n_elements;

    if (q == 0) {
        if (live && entry < N_LOCAL) {
            sX[le * N_LOCAL + entry] = X[e * N_LOCAL + entry];
            sY[le * N_LOCAL + entry] = Y[e * N_LOCAL + entry];
            sIdx[le * N_LOCAL + entry] = gIdx[e * N_LOCAL + entry];
        }
        sA[le * N_ENTRIES + entry] = 0.0;
        if (entry < N_LOCAL) sb[le * N_LOCAL + entry] = 0.0;
    }
    __syncthreads();

    if (live) {
        double args[8];
        load_arguments(args, q, sX, sY, le);
        atomicAdd(&sA[le * N_ENTRIES + entry], bilinear_entry(entry, args) * QUAD_WEIGHTS[q]);
        if (entry < N_LOCAL)
            atomicAdd(&sb[le * N_LOCAL + entry], linear_entry(entry, args) * QUAD_WEIGHTS[q]);
    }
    __syncthreads();

    if (live && q == 0) {
        const int gi = sIdx[le * N_LOCAL + entry / N_LOCAL];
        const int gj = sIdx[le * N_LOCAL + entry % N_LOCAL];
{% if sparse %}
        const int slot = find_slot(gNbrNodeIdx, gNbrNodeLen, gi, gj);
        // a pair outside the sparsity pattern aborts the launch
        if (slot < 0) __trap();
        atomicAdd(&A[(size_t)gi * MAX_NZ + slot], sA[le * N_ENTRIES + entry]);
{% else %}
        atomicAdd(&A[(size_t)gi * n_nodes + gj], sA[le * N_ENTRIES + entry]);
{% endif %}
        if (entry < N_LOCAL)
            atomicAdd(&b[sIdx[le * N_LOCAL + entry]], sb[le * N_LOCAL + entry]);
    }
}
{% endmacro %}
{% for sparse in (false, true) %}

{{ assembly_kernel(sparse) }}
{%- endfor %}
"""

_ENVIRONMENT = Environment(
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
    autoescape=False,
)


class KernelTemplate:
    """jinja2 source text whose placeholders each occur exactly once."""

    PLACEHOLDERS = ("INTEGRAND_BODY", "N_QUAD", "N_LOCAL", "ELEMS_PER_BLOCK", "MAX_NZ")

    def __init__(self, text: str = KERNEL_SOURCE):
        try:
            ast = _ENVIRONMENT.parse(text)
        except TemplateSyntaxError as exc:
            raise TemplateError(f"Invalid kernel template: {exc}") from None
        used = [node.name for node in ast.find_all(nodes.Name) if node.ctx == "load"]
        for name in self.PLACEHOLDERS:
            count = used.count(name)
            if count != 1:
                raise TemplateError(f"Placeholder {{{{ {name} }}}} occurs {count} times, expected once")
        unknown = sorted(meta.find_undeclared_variables(ast) - set(self.PLACEHOLDERS))
        if unknown:
            raise TemplateError(f"Unknown placeholders: {unknown}")
        self.text = text
        self._template = _ENVIRONMENT.from_string(text)

    def render(self, values: Mapping[str, object]) -> str:
        """Render the template; every placeholder needs a value."""
        missing = [name for name in self.PLACEHOLDERS if values.get(name) is None]
        if missing:
            raise TemplateError(f"Missing value for placeholder(s): {missing}")
        try:
            return self._template.render({name: values[name] for name in self.PLACEHOLDERS})
        except UndefinedError as exc:
            raise TemplateError(f"Kernel template failed to render: {exc}") from None


def _literal(value: float) -> str:
    if math.isnan(value):
        return "NAN"
    if math.isinf(value):
        return "INFINITY" if value > 0 else "(-INFINITY)"
    text = repr(value)
    return f"({text})" if value < 0 else text


_C_BINARY = {Opcode.ADD: "+", Opcode.SUB: "-", Opcode.MUL: "*", Opcode.DIV: "/"}


def render_function(name: str, program: KernelProgram) -> str:
    """Render one kernel program as a ``__device__`` function."""
    lines = [f"__device__ double {name}(const double *a)", "{"]
    for index, (op, operands, imm) in enumerate(program.instructions):
        if op is Opcode.LOAD_ARG:
            rhs = f"a[{imm}]"
        elif op is Opcode.LOAD_CONST:
            rhs = _literal(program.constants[imm])
        elif op in _C_BINARY:
            rhs = f"r{operands[0]} {_C_BINARY[op]} r{operands[1]}"
        elif op is Opcode.NEG:
            rhs = f"-r{operands[0]}"
        elif op is Opcode.POW_INT:
            rhs = f"pow(r{operands[0]}, {float(imm)!r})"
        else:
            rhs = f"{op.value}(r{operands[0]})"
        lines.append(f"    const double r{index} = {rhs};")
    lines.append(f"    return r{program.result};")
    lines.append("}")
    return "\n".join(lines)


def _dispatcher(name: str, functions) -> str:
    lines = [f"__device__ double {name}(int entry, const double *a)", "{", "    switch (entry) {"]
    for index, fn in enumerate(functions):
        lines.append(f"    case {index}: return {fn}(a);")
    lines += ["    default: return 0.0;", "    }", "}"]
    return "\n".join(lines)


def integrand_body(compiled: CompiledForm) -> str:
    """Quadrature tables, one device function per entry and the entry dispatchers."""
    rule = compiled.rule
    points = ", ".join(f"{{{_literal(float(p[0]))}, {_literal(float(p[1]))}}}" for p in rule.points)
    weights = ", ".join(_literal(float(w)) for w in rule.weights)
    parts = [
        f"__constant__ double QUAD_POINTS[N_QUAD][2] = {{ {points} }};",
        f"__constant__ double QUAD_WEIGHTS[N_QUAD] = {{{weights}}};",
    ]
    bilinear_names, linear_names = [], []
    for i, row in enumerate(compiled.bilinear):
        for j, program in enumerate(row):
            name = f"bilinear_{i}_{j}"
            parts.append(render_function(name, program))
            bilinear_names.append(name)
    for i, program in enumerate(compiled.linear):
        name = f"linear_{i}"
        parts.append(render_function(name, program))
        linear_names.append(name)
    parts.append(_dispatcher("bilinear_entry", bilinear_names))
    parts.append(_dispatcher("linear_entry", linear_names))
    return "\n\n".join(parts)


def emit_source(form: Union[InstantiatedForm, CompiledForm], params: Mapping[str, int],
                rule: Optional[QuadratureRule] = None,
                template: Optional[KernelTemplate] = None) -> str:
    """
    Render the kernel template for a form.

    Args:
        form: An instantiated form (lowered here) or an already compiled form
        params: Launch constants; needs ``elems_per_block`` and ``max_nz``
        rule: Quadrature rule when ``form`` is not compiled yet
        template: Alternative template text

    Returns:
        Placeholder-free, byte-deterministic kernel source

    Raises:
        TemplateError: If a launch constant is missing
    """
    compiled = form if isinstance(form, CompiledForm) else compile_form(form, rule)
    values: Dict[str, object] = {
        "INTEGRAND_BODY": integrand_body(compiled),
        "N_QUAD": compiled.n_quad,
        "N_LOCAL": compiled.n_local,
    }
    for key in ("elems_per_block", "max_nz"):
        if params.get(key) is not None:
            values[key.upper()] = int(params[key])
    return (template or KernelTemplate()).render(values)
