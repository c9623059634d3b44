"""Parameter domains and solver configuration."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

NATURALS = "naturals"
INTEGERS = "integers"
BOUNDED = "bounded"


@dataclass(frozen=True)
class DomainSpec:
    """Domain of one parameter: a vector of ``width`` integers.

    ``kind`` is ``naturals``, ``integers`` or ``bounded``; ``lo``/``hi`` are
    inclusive component bounds and only meaningful for ``bounded``.
    """

    kind: str = NATURALS
    width: int = 1
    lo: Optional[int] = None
    hi: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in (NATURALS, INTEGERS, BOUNDED):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.width < 1:
            raise ValueError("domain width must be >= 1")
        if self.kind == BOUNDED:
            if self.lo is None or self.hi is None or self.lo > self.hi:
                raise ValueError("bounded domain needs lo <= hi")

    @classmethod
    def bounded(cls, lo: int, hi: int, width: int = 1) -> "DomainSpec":
        return cls(BOUNDED, width, lo, hi)

    @property
    def is_bounded(self) -> bool:
        return self.kind == BOUNDED

    def contains_component(self, v: int) -> bool:
        if self.kind == NATURALS:
            return v >= 0
        if self.kind == INTEGERS:
            return True
        return self.lo <= v <= self.hi

    def contains(self, value) -> bool:
        comps = value if isinstance(value, tuple) else (value,)
        return len(comps) == self.width and all(self.contains_component(c) for c in comps)

    def universe(self, bound: Optional[int] = None) -> np.ndarray:
        """Component values used for enumeration, truncated to ``bound`` if infinite."""
        if self.kind == BOUNDED:
            return np.arange(self.lo, self.hi + 1, dtype=np.int64)
        if bound is None or bound < 1:
            raise ValueError("enumeration bound >= 1 required for an infinite domain")
        if self.kind == NATURALS:
            return np.arange(0, bound + 1, dtype=np.int64)
        return np.arange(-bound, bound + 1, dtype=np.int64)

    def to_json(self):
        kind = {"bounded": [self.lo, self.hi]} if self.is_bounded else self.kind
        return {"kind": kind, "width": self.width}

    @classmethod
    def from_json(cls, obj) -> "DomainSpec":
        kind = obj.get("kind", NATURALS)
        width = int(obj.get("width", 1))
        if isinstance(kind, dict):
            lo, hi = kind["bounded"]
            return cls.bounded(int(lo), int(hi), width)
        return cls(kind, width)


ENUMERATE = "enumerate"
EXTERNAL = "external"


@dataclass(frozen=True)
class SolverConfig:
    """How satisfiability questions are decided.

    ``enumerate`` evaluates predicates over the whole (possibly truncated)
    universe; ``external`` ships SMT-LIB 2 text to ``solver_command``, or to the
    command in ``PARAMDES_SOLVER`` when that is unset.
    """

    backend: str = ENUMERATE
    enumeration_bound: int = 32
    solver_command: Optional[tuple[str, ...]] = None
    timeout_ms: int = 10_000
    max_grid_cells: int = 20_000_000

    def __post_init__(self) -> None:
        if self.backend not in (ENUMERATE, EXTERNAL):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == ENUMERATE and self.enumeration_bound < 1:
            raise ValueError("enumeration_bound must be >= 1")
