"""
Plain-text mesh files.

Format::

    # comment
    nodes <N>
    <x> <y>            (N lines)
    elements <M>
    <i0> <i1> <i2>     (M lines, 0-based)

Tokens are whitespace separated and ``#`` starts a comment. Clockwise
triangles are reoriented on read.
"""
import logging
from pathlib import Path
from typing import Iterator, List, Tuple, Union

import numpy as np

from ..errors import MeshFormatError
from ..fem.mesh import Mesh, orient_elements

PathLike = Union[str, Path]


def _content_lines(text: str) -> Iterator[Tuple[int, List[str]]]:
    for number, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            yield number, tokens


def _header(lines: Iterator[Tuple[int, List[str]]], keyword: str, last_line: int) -> Tuple[int, int]:
    try:
        number, tokens = next(lines)
    except StopIteration:
        raise MeshFormatError(f"expected '{keyword} <count>', found end of file", last_line + 1) from None
    if len(tokens) != 2 or tokens[0] != keyword:
        raise MeshFormatError(f"expected '{keyword} <count>'", number)
    try:
        count = int(tokens[1])
    except ValueError:
        raise MeshFormatError(f"invalid {keyword} count '{tokens[1]}'", number) from None
    if count < 0:
        raise MeshFormatError(f"negative {keyword} count", number)
    return number, count


def parse_mesh(text: str) -> Tuple[Mesh, int]:
    """
    Parse mesh text.

    Args:
        text: File contents

    Returns:
        The mesh and the number of elements whose orientation was flipped

    Raises:
        MeshFormatError: On a malformed line, a bad count or an out-of-range
            node index, with the offending line number
    """
    lines = _content_lines(text)
    last, n_nodes = _header(lines, "nodes", 0)
    nodes = np.empty((n_nodes, 2), dtype=np.float64)
    for k in range(n_nodes):
        try:
            last, tokens = next(lines)
        except StopIteration:
            raise MeshFormatError(f"expected {n_nodes} nodes, found {k}", last + 1) from None
        if len(tokens) != 2:
            raise MeshFormatError("node line must hold two coordinates", last)
        try:
            nodes[k] = [float(tokens[0]), float(tokens[1])]
        except ValueError:
            raise MeshFormatError(f"invalid coordinate in '{' '.join(tokens)}'", last) from None
        if not np.all(np.isfinite(nodes[k])):
            raise MeshFormatError("coordinates must be finite", last)

    last, n_elements = _header(lines, "elements", last)
    elements = np.empty((n_elements, 3), dtype=np.int64)
    for k in range(n_elements):
        try:
            last, tokens = next(lines)
        except StopIteration:
            raise MeshFormatError(f"expected {n_elements} elements, found {k}", last + 1) from None
        if len(tokens) != 3:
            raise MeshFormatError("element line must hold three node indices", last)
        try:
            indices = [int(t) for t in tokens]
        except ValueError:
            raise MeshFormatError(f"invalid node index in '{' '.join(tokens)}'", last) from None
        for index in indices:
            if not 0 <= index < n_nodes:
                raise MeshFormatError(f"node index {index} outside 0..{n_nodes - 1}", last)
        if len(set(indices)) != 3:
            raise MeshFormatError("element repeats a node", last)
        elements[k] = indices

    for number, _ in lines:
        raise MeshFormatError("unexpected content after the last element", number)

    elements, flipped = orient_elements(nodes, elements)
    return Mesh(nodes, elements), flipped


def format_mesh(m: Mesh) -> str:
    """Mesh text with shortest round-trip coordinates."""
    out = [f"nodes {m.n_nodes}"]
    out.extend(f"{float(x)!r} {float(y)!r}" for x, y in m.nodes)
    out.append(f"elements {m.n_elements}")
    out.extend(f"{a} {b} {c}" for a, b, c in m.elements)
    return "\n".join(out) + "\n"


def read_mesh(path: PathLike) -> Mesh:
    """
    Read a mesh file.

    Raises:
        MeshFormatError: If the file is malformed
    """
    mesh, flipped = parse_mesh(Path(path).read_text())
    if flipped:
        logging.warning(f"{path}: reoriented {flipped} clockwise element(s)")
    logging.info(f"Read mesh {path}: {mesh.n_nodes} nodes, {mesh.n_elements} elements")
    return mesh


def write_mesh(m: Mesh, path: PathLike) -> Path:
    """Write ``m`` to ``path`` and return the path."""
    path = Path(path)
    path.write_text(format_mesh(m))
    logging.info(f"Wrote mesh {path}: {m.n_nodes} nodes, {m.n_elements} elements")
    return path
