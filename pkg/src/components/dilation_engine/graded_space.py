# src/components/dilation_engine/graded_space.py

from __future__ import annotations
from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, NonNegativeInt, PositiveInt

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import InvalidInput, TooLarge
from src.configuration.config_loader import config
from src.components.product_system.product_system import ScalarProductSystem


Grade = Tuple[int, int]


class BasisLabel(BaseModel):
    model_config = ConfigDict(frozen=True)

    a: int
    b: int
    e_word: Tuple[int, ...]
    f_word: Tuple[int, ...]
    copy: int
    h: int


class GradedFockSpace(BaseModel):
    """
    K = ⊕_{max(a,b) <= L} E^{⊗a} ⊗ F^{⊗b} ⊗ H_level, truncated at level L.

    H_0 = H and H_k = C^{1+mu} ⊗ H for k >= 1, with H in the first copy.
    Basis order: level, then grade (a, b), then E-word, F-word, copy and h.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    sys: ScalarProductSystem
    d_H: PositiveInt
    L: NonNegativeInt
    mu: NonNegativeInt = 0
    grades: Tuple[Grade, ...]
    block_offsets: Dict[Grade, int]
    level_offsets: Tuple[int, ...]
    dim: int

    @property
    def n(self) -> int:
        return self.sys.n

    @property
    def m(self) -> int:
        return self.sys.m

    def multiplicity(self, level: int) -> int:
        return 1 if level == 0 else 1 + self.mu

    def fibre_dim(self, level: int) -> int:
        return self.multiplicity(level) * self.d_H

    def block_dim(self, a: int, b: int) -> int:
        return self.n ** a * self.m ** b * self.fibre_dim(max(a, b))

    def block_slice(self, a: int, b: int) -> slice:
        start = self.block_offsets[(a, b)]
        return slice(start, start + self.block_dim(a, b))

    def level_slice(self, level: int) -> slice:
        return slice(self.level_offsets[level], self.level_offsets[level + 1])

    def level_dim(self, level: int) -> int:
        return self.level_offsets[level + 1] - self.level_offsets[level]

    def window_end(self, max_level: int) -> int:
        """Number of basis vectors of grades with level <= max_level (a prefix of the basis)."""
        max_level = min(max_level, self.L)
        if max_level < 0:
            return 0
        return self.level_offsets[max_level + 1]

    def h_slice(self) -> slice:
        return slice(0, self.d_H)

    def labels(self) -> List[BasisLabel]:
        out = []
        for a, b in self.grades:
            c = self.multiplicity(max(a, b))
            for we in np.ndindex(*([self.n] * a)):
                for wf in np.ndindex(*([self.m] * b)):
                    for copy in range(c):
                        for h in range(self.d_H):
                            out.append(BasisLabel(a=a, b=b, e_word=tuple(we), f_word=tuple(wf), copy=copy, h=h))
        return out


def _grades_at_level(level: int) -> List[Grade]:
    return [(a, b) for a in range(level + 1) for b in range(level + 1) if max(a, b) == level]


def build_graded_space(
    sys: ScalarProductSystem,
    d_H: int,
    L: int,
    mu: int = 0,
    cap: int | None = None,
) -> GradedFockSpace:
    cap = cap or config.get_caps().max_graded_dimension
    if L < 0:
        raise InvalidInput(f"truncation level must be nonnegative, got {L}", identity="depth")
    if mu < 0:
        raise InvalidInput(f"padding multiplicity must be nonnegative, got {mu}", identity="padding")

    grades: List[Grade] = []
    block_offsets: Dict[Grade, int] = {}
    level_offsets = [0]
    offset = 0
    for level in range(L + 1):
        fibre = d_H * (1 if level == 0 else 1 + mu)
        for a, b in _grades_at_level(level):
            grades.append((a, b))
            block_offsets[(a, b)] = offset
            offset += sys.n ** a * sys.m ** b * fibre
        level_offsets.append(offset)

    if offset > cap:
        raise TooLarge(
            "graded space exceeds the configured dimension cap",
            context={"dim": offset, "cap": cap, "L": L, "n": sys.n, "m": sys.m, "d_H": d_H, "mu": mu},
        )

    logger.info("Graded Fock space", L=L, d_H=d_H, mu=mu, dim=offset, level_dims=np.diff(level_offsets).tolist())
    return GradedFockSpace(
        sys=sys,
        d_H=d_H,
        L=L,
        mu=mu,
        grades=tuple(grades),
        block_offsets=block_offsets,
        level_offsets=tuple(level_offsets),
        dim=offset,
    )
