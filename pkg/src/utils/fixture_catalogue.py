# src/utils/fixture_catalogue.py

"""Channel pairs and representations used as the reference catalogue."""

from typing import Callable, Dict, Tuple

import numpy as np

from src.components.cp_maps.kraus_maps import KrausFamily, scaled_family
from src.components.product_system.product_system import ScalarProductSystem, CovariantRep, make_system


I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)


def identity_channel(d: int = 2) -> KrausFamily:
    return KrausFamily(d=d, ops=[np.eye(d)])


def zero_map(d: int = 2) -> KrausFamily:
    return KrausFamily(d=d, ops=[np.zeros((d, d))])


def bit_flip(p: float) -> KrausFamily:
    return scaled_family(2, [I2, X], [1 - p, p])


def phase_flip(q: float) -> KrausFamily:
    return scaled_family(2, [I2, Z], [1 - q, q])


def conjugation(unitary) -> KrausFamily:
    unitary = np.asarray(unitary, dtype=np.complex128)
    return KrausFamily(d=unitary.shape[0], ops=[unitary])


def clock_and_shift(d: int) -> Tuple[np.ndarray, np.ndarray, complex]:
    """Clock C and shift S with C S = ω S C, ω = exp(2πi/d)."""
    omega = np.exp(2j * np.pi / d)
    clock = np.diag(omega ** np.arange(d))
    shift = np.roll(np.eye(d, dtype=np.complex128), 1, axis=0)
    return clock, shift, omega


def scalar_map(value: float) -> KrausFamily:
    """x -> |value|^2 x on C."""
    return KrausFamily(d=1, ops=[[[value]]])


# --------------------------
# Pairs
# --------------------------

def pauli_pair(p: float = 0.5, q: float = 0.5) -> Tuple[KrausFamily, KrausFamily]:
    return bit_flip(p), phase_flip(q)


def identity_pair(d: int = 2) -> Tuple[KrausFamily, KrausFamily]:
    return identity_channel(d), identity_channel(d)


def commuting_conjugation_pair(d: int = 3) -> Tuple[KrausFamily, KrausFamily]:
    clock, shift, _ = clock_and_shift(d)
    return conjugation(clock), conjugation(shift)


def ando_scalar_pair(t: float = 0.5, s: float = 1 / 3) -> Tuple[KrausFamily, KrausFamily]:
    return scalar_map(t), scalar_map(s)


def equal_bit_flips(p: float = 0.5) -> Tuple[KrausFamily, KrausFamily]:
    return bit_flip(p), bit_flip(p)


def noncommuting_pair() -> Tuple[KrausFamily, KrausFamily]:
    return conjugation(X), conjugation(HADAMARD)


COMMUTING_PAIRS: Dict[str, Callable[[], Tuple[KrausFamily, KrausFamily]]] = {
    "identity": identity_pair,
    "pauli_half": lambda: pauli_pair(0.5, 0.5),
    "pauli_quarter": lambda: pauli_pair(0.25, 0.25),
    "pauli_mixed": lambda: pauli_pair(0.25, 0.5),
    "pauli_y_z": lambda: (scaled_family(2, [I2, Y], [0.5, 0.5]), phase_flip(0.5)),
    "xz_conjugation": lambda: (conjugation(Z), conjugation(X)),
    "clock_shift_3": lambda: commuting_conjugation_pair(3),
    "equal_bit_flips": equal_bit_flips,
    "ando_scalar": ando_scalar_pair,
}


# --------------------------
# Representations
# --------------------------

def rep_from_pair(theta: KrausFamily, phi: KrausFamily, u) -> Tuple[ScalarProductSystem, CovariantRep]:
    sys = make_system(theta.n, phi.n, u)
    return sys, CovariantRep(h=theta.d, T=list(theta.ops), S=list(phi.ops))


def ando_rep(t: float = 0.5, s: float = 1 / 3) -> Tuple[ScalarProductSystem, CovariantRep]:
    return rep_from_pair(scalar_map(t), scalar_map(s), [[1.0]])


def pauli_rep(p: float = 0.5, q: float = 0.5) -> Tuple[ScalarProductSystem, CovariantRep]:
    theta, phi = pauli_pair(p, q)
    return rep_from_pair(theta, phi, np.diag([1.0, 1.0, 1.0, -1.0]))


def degenerate_rep() -> Tuple[ScalarProductSystem, CovariantRep]:
    """S_2 = S_1, so the S family is not independent."""
    T = [I2 / np.sqrt(2), X / np.sqrt(2)]
    S = [Z / 2, Z / 2]
    sys = make_system(2, 2, np.diag([1.0, 1.0, -1.0, -1.0]))
    return sys, CovariantRep(h=2, T=T, S=S)


def noncommuting_rep() -> Tuple[ScalarProductSystem, CovariantRep]:
    T = [np.array([[0, 0.5], [0, 0]])]
    S = [np.array([[0.5, 0], [0, 0]])]
    return make_system(1, 1, [[1.0]]), CovariantRep(h=2, T=T, S=S)


REPRESENTATIONS: Dict[str, Callable[[], Tuple[ScalarProductSystem, CovariantRep]]] = {
    "ando": ando_rep,
    "pauli_half": pauli_rep,
    "pauli_quarter": lambda: pauli_rep(0.25, 0.25),
    "xz_conjugation": lambda: rep_from_pair(conjugation(Z), conjugation(X), [[-1.0]]),
    "shifts": lambda: rep_from_pair(scalar_map(0.0), scalar_map(0.0), [[1.0]]),
    "unitaries": lambda: rep_from_pair(scalar_map(1.0), scalar_map(1.0), [[1.0]]),
}
