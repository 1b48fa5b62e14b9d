# src/components/product_system/product_system.py

from __future__ import annotations
import threading
from typing import Dict, Literal, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, PositiveInt, PrivateAttr, model_validator

from src.common.logging.logger import logger
from src.common.exception.dilation_exceptions import InvalidInput, InvalidFlip, NotContractive
from src.components.linalg_core.matrix_ops import (
    Tolerance,
    as_matrix,
    residual_norm,
    unitarity_residual,
)
from src.components.cp_maps.kraus_maps import KrausFamily
from src.components.cp_maps.flip_construction import FlipUnitary


Side = Literal["T", "S"]


class ScalarProductSystem(BaseModel):
    """Product system over N^2 with fibres E = C^n, F = C^m and flip t: E⊗F -> F⊗E."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: PositiveInt
    m: PositiveInt
    flip: FlipUnitary

    _flip_cache: Dict[Tuple[int, int], np.ndarray] = PrivateAttr(default_factory=dict)
    _lock: threading.Lock = PrivateAttr(default_factory=threading.Lock)

    @property
    def u(self) -> np.ndarray:
        return self.flip.u

    @property
    def t(self) -> np.ndarray:
        return self.flip.flip_matrix()


class CovariantRep(BaseModel):
    """Row contractions T_1..T_n and S_1..S_m on H = C^h."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    h: PositiveInt
    T: Tuple[np.ndarray, ...]
    S: Tuple[np.ndarray, ...]

    @model_validator(mode="before")
    @classmethod
    def _coerce(cls, data):
        if not isinstance(data, dict):
            return data
        h = data.get("h")
        out = dict(data)
        for side in ("T", "S"):
            mats = []
            for idx, op in enumerate(data.get(side, ()) or ()):
                mat = as_matrix(op, f"{side}[{idx}]")
                if mat.shape != (h, h):
                    raise InvalidInput(f"{side}[{idx}] has shape {mat.shape}, expected ({h}, {h})", identity="rep_shape")
                mat = np.array(mat, copy=True)
                mat.setflags(write=False)
                mats.append(mat)
            if not mats:
                raise InvalidInput(f"representation needs at least one {side} operator", identity="rep_shape")
            out[side] = tuple(mats)
        return out

    @model_validator(mode="after")
    def _check_row_contractions(self):
        tol = Tolerance.default()
        for side in ("T", "S"):
            row = np.hstack(getattr(self, side))
            norm = float(np.linalg.norm(row, 2))
            if norm > 1.0 + tol.atol(1.0):
                raise NotContractive(
                    f"{side} is not a row contraction",
                    context={"side": side, "row_norm": norm},
                )
        return self

    @property
    def n(self) -> int:
        return len(self.T)

    @property
    def m(self) -> int:
        return len(self.S)

    def ops(self, side: Side) -> Tuple[np.ndarray, ...]:
        return self.T if side == "T" else self.S


def make_system(n: int, m: int, u, tol: Tolerance | None = None) -> ScalarProductSystem:
    tol = tol or Tolerance.default()
    u = as_matrix(u, "u")
    if u.shape != (n * m, n * m):
        raise InvalidFlip(f"u must be {n * m} x {n * m}, got {u.shape}", identity="flip_shape")
    res = unitarity_residual(u)
    if res > tol.atol(np.sqrt(n * m)):
        raise InvalidFlip("flip matrix is not unitary", context={"residual": res})
    return ScalarProductSystem(n=n, m=m, flip=FlipUnitary(n=n, m=m, u=np.array(u, copy=True)))


def check_compatible(sys: ScalarProductSystem, rep: CovariantRep):
    if (sys.n, sys.m) != (rep.n, rep.m):
        raise InvalidInput(
            "representation does not match the product system",
            identity="rep_shape",
            context={"system": [sys.n, sys.m], "rep": [rep.n, rep.m]},
        )


def row_matrix(rep: CovariantRep, side: Side, k: int) -> np.ndarray:
    """h x (N^k h) block row of all words of length k, lexicographic with the first letter most significant."""
    if k < 0:
        raise InvalidInput(f"word length must be nonnegative, got {k}")
    ops = rep.ops(side)
    blocks = [np.eye(rep.h, dtype=np.complex128)]
    for _ in range(k):
        blocks = [b @ x for b in blocks for x in ops]
    return np.hstack(blocks)


def _t_1n(sys: ScalarProductSystem, n_pow: int) -> np.ndarray:
    # (I_{F^{n-1}} ⊗ t) ... (t ⊗ I_{F^{n-1}})
    dim_e, dim_f = sys.n, sys.m
    result = np.eye(dim_e * dim_f ** n_pow, dtype=np.complex128)
    t = sys.t
    for k in range(n_pow):
        factor = np.kron(np.kron(np.eye(dim_f ** k), t), np.eye(dim_f ** (n_pow - 1 - k)))
        result = factor @ result
    return result


def flip_mn(sys: ScalarProductSystem, m_pow: int, n_pow: int) -> np.ndarray:
    """
    Unitary t_{m,n}: E^{⊗m} ⊗ F^{⊗n} -> F^{⊗n} ⊗ E^{⊗m}.

    t_{m,n} = (t_{1,n} ⊗ I_{E^{m-1}}) ... (I_{E^{m-1}} ⊗ t_{1,n}); t_{m,0} and t_{0,n} are identities.
    """
    if m_pow < 0 or n_pow < 0:
        raise InvalidInput(f"flip powers must be nonnegative, got ({m_pow}, {n_pow})")
    key = (m_pow, n_pow)
    with sys._lock:
        cached = sys._flip_cache.get(key)
    if cached is not None:
        return cached

    dim = sys.n ** m_pow * sys.m ** n_pow
    if m_pow == 0 or n_pow == 0:
        result = np.eye(dim, dtype=np.complex128)
    else:
        t1n = _t_1n(sys, n_pow)
        result = np.eye(dim, dtype=np.complex128)
        for k in reversed(range(m_pow)):
            factor = np.kron(np.kron(np.eye(sys.n ** k), t1n), np.eye(sys.n ** (m_pow - 1 - k)))
            result = factor @ result

    result.setflags(write=False)
    with sys._lock:
        sys._flip_cache.setdefault(key, result)
    return result


def commutation_residual(sys: ScalarProductSystem, rep: CovariantRep, m_pow: int, n_pow: int) -> float:
    """||T̃_m (I ⊗ S̃_n) - S̃_n (I ⊗ T̃_m)(t_{m,n} ⊗ I_H)|| on E^m ⊗ F^n ⊗ H."""
    check_compatible(sys, rep)
    Tm = row_matrix(rep, "T", m_pow)
    Sn = row_matrix(rep, "S", n_pow)
    lhs = Tm @ np.kron(np.eye(sys.n ** m_pow), Sn)
    rhs = Sn @ np.kron(np.eye(sys.m ** n_pow), Tm) @ np.kron(flip_mn(sys, m_pow, n_pow), np.eye(rep.h))
    return residual_norm(lhs - rhs)


def induced_cp_pair(rep: CovariantRep) -> Tuple[KrausFamily, KrausFamily]:
    theta = KrausFamily(d=rep.h, ops=list(rep.T))
    phi = KrausFamily(d=rep.h, ops=list(rep.S))
    logger.info("Induced CP pair", h=rep.h, n=rep.n, m=rep.m)
    return theta, phi


def row_norm(rep: CovariantRep, side: Side, k: int = 1) -> float:
    return float(np.linalg.norm(row_matrix(rep, side, k), 2))


def flip_coherence_residual(sys: ScalarProductSystem, a: int, b: int, n_pow: int) -> float:
    """||t_{a+b,n} - (t_{a,n} ⊗ I_{E^b})(I_{E^a} ⊗ t_{b,n})||."""
    lhs = flip_mn(sys, a + b, n_pow)
    rhs = np.kron(flip_mn(sys, a, n_pow), np.eye(sys.n ** b)) @ np.kron(np.eye(sys.n ** a), flip_mn(sys, b, n_pow))
    return residual_norm(lhs - rhs)
