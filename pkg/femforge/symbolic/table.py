"""
Binding of symbol names to kernel argument slots.
"""
from typing import Dict, Iterable, Tuple

from ..errors import UnboundSymbolError
from .expr import sym

# Argument slot order of every integrand kernel.
KERNEL_ARGUMENTS: Tuple[str, ...] = ("xi", "eta", "x0", "y0", "x1", "y1", "x2", "y2")


class SymbolTable:
    """Maps symbol names to dense slot indices starting at 0."""

    def __init__(self, names: Iterable[str]):
        names = tuple(names)
        for name in names:
            sym(name)
        if len(set(names)) != len(names):
            raise ValueError(f"Duplicate symbol names in table: {names}")
        self._names = names
        self._slots: Dict[str, int] = {name: i for i, name in enumerate(names)}

    @classmethod
    def kernel_arguments(cls) -> "SymbolTable":
        return cls(KERNEL_ARGUMENTS)

    @property
    def names(self) -> Tuple[str, ...]:
        return self._names

    def slot(self, name: str) -> int:
        try:
            return self._slots[name]
        except KeyError:
            raise UnboundSymbolError(name) from None

    def __contains__(self, name: str) -> bool:
        return name in self._slots

    def __len__(self) -> int:
        return len(self._names)

    def __repr__(self) -> str:
        return f"SymbolTable({self._names!r})"
