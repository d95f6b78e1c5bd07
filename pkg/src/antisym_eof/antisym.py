"""The antisymmetric subspace of C^3 (x) C^3 and the cofactor map.

Wedge basis order is fixed globally as |2,3>, |3,1>, |1,2> where
|i,j> = (|i>|j> - |j>|i>)/sqrt(2) (1-based labels).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .tensor_core import (
    DEFAULT_TOL,
    DensityMatrix,
    ResidualError,
    StateVector,
    entanglement_entropy,
    haar_random_unitary,
)

# zero-based (i, j) for |2,3>, |3,1>, |1,2>
WEDGE_PAIRS = ((1, 2), (2, 0), (0, 1))


def _wedge_matrix() -> np.ndarray:
    w = np.zeros((9, 3), dtype=complex)
    for col, (i, j) in enumerate(WEDGE_PAIRS):
        w[3 * i + j, col] = 1 / np.sqrt(2)
        w[3 * j + i, col] = -1 / np.sqrt(2)
    w.setflags(write=False)
    return w


WEDGE = _wedge_matrix()
"""9x3 isometry whose columns are the wedge basis vectors."""

ANTISYM_PROJECTOR = WEDGE @ WEDGE.conj().T


def wedge_basis() -> list[StateVector]:
    return [StateVector(WEDGE[:, k], (3, 3)) for k in range(3)]


@dataclass(frozen=True, eq=False)
class AntisymState:
    """Three wedge-basis coefficients of a vector in the antisymmetric subspace."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.shape != (3,):
            raise ValueError("an antisymmetric state has exactly 3 coefficients")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def normalized(self) -> "AntisymState":
        return AntisymState(self.coeffs / self.norm)


def embed(a: AntisymState) -> StateVector:
    return StateVector(WEDGE @ a.coeffs, (3, 3))


def project(v: StateVector, tol: float = DEFAULT_TOL) -> AntisymState:
    """Wedge coefficients of ``v``; rejects vectors with a component outside H-."""
    if v.dims != (3, 3):
        raise ValueError(f"expected a (3, 3) state, got {v.dims}")
    c = WEDGE.conj().T @ v.amplitudes
    residual = float(np.linalg.norm(v.amplitudes - WEDGE @ c))
    if residual > tol:
        raise ResidualError("vector is not in the antisymmetric subspace", residual)
    return AntisymState(c)


def theta_map(u) -> np.ndarray:
    """Cofactor matrix of a 3x3 matrix, laid out in wedge-basis order.

    For unitary ``u`` this equals ``det(u) * conj(u)``.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (3, 3):
        raise ValueError("theta_map needs a 3x3 matrix")
    (u11, u12, u13), (u21, u22, u23), (u31, u32, u33) = u
    return np.array([
        [u22 * u33 - u23 * u32, u23 * u31 - u21 * u33, u21 * u32 - u22 * u31],
        [u32 * u13 - u33 * u12, u33 * u11 - u31 * u13, u31 * u12 - u32 * u11],
        [u12 * u23 - u13 * u22, u13 * u21 - u11 * u23, u11 * u22 - u12 * u21],
    ])


def unitarity_residual(u) -> float:
    u = np.asarray(u, dtype=complex)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2))


def wedge_action(u, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Matrix of ``u (x) u`` restricted to H-, computed from the 9x9 operator."""
    u = np.asarray(u, dtype=complex)
    res = unitarity_residual(u)
    if res > tol:
        raise ResidualError("wedge_action needs a unitary", res)
    return WEDGE.conj().T @ np.kron(u, u) @ WEDGE


def coefficient_matrix(basis: Sequence[AntisymState]) -> np.ndarray:
    """Columns are the wedge coefficients of the given states."""
    return np.column_stack([b.coeffs for b in basis])


def lemma1_unitary(basis: Sequence[AntisymState], tol: float = DEFAULT_TOL,
                   branch: int = 0) -> np.ndarray:
    """Single-site unitary ``U`` with ``U (x) U`` sending basis[k] to wedge vector k.

    Theta is the H- unitary mapping the coefficient vectors of the basis to
    e_1, e_2, e_3 (the inverse, i.e. adjoint, of :func:`coefficient_matrix`),
    and ``U = sqrt(det Theta) * conj(Theta)``. ``branch=0`` takes the
    principal square root, ``branch=1`` its negative; both work.
    """
    if len(basis) != 3:
        raise ValueError("need exactly three states")
    psi = coefficient_matrix(basis)
    res = float(np.max(np.abs(psi.conj().T @ psi - np.eye(3))))
    if res > tol:
        raise ResidualError("basis is not orthonormal", res)
    theta = psi.conj().T
    root = np.sqrt(complex(np.linalg.det(theta)))
    if branch:
        root = -root
    return root * theta.conj()


def basis_alignment_residual(u, basis: Sequence[AntisymState]) -> float:
    """max_k min_phase || (U (x) U) basis[k] - e^{i phase} wedge_k ||."""
    uu = np.kron(np.asarray(u, dtype=complex), np.asarray(u, dtype=complex))
    worst = 0.0
    for k, b in enumerate(basis):
        out = uu @ embed(b).amplitudes
        target = WEDGE[:, k]
        overlap = np.vdot(target, out)
        phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        worst = max(worst, float(np.linalg.norm(out - phase * target)))
    return worst


def pure_antisym_entanglement(a: AntisymState, tol: float = DEFAULT_TOL) -> float:
    """A:B entanglement (bits) of an antisymmetric pure state; always 1."""
    v = embed(a)
    v.check_normalized(tol)
    return entanglement_entropy(v, [0])


def random_antisym_state(seed=None) -> AntisymState:
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    return AntisymState(c / np.linalg.norm(c))


def random_antisym_basis(seed=None) -> list[AntisymState]:
    q = haar_random_unitary(3, seed)
    return [AntisymState(q[:, k]) for k in range(3)]


def random_wedge_density(seed=None, rank: int = 3) -> np.ndarray:
    """Normalized Gram matrix of ``rank`` complex Gaussian vectors in C^3."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((3, rank)) + 1j * rng.standard_normal((3, rank))
    g = x @ x.conj().T
    return g / np.trace(g).real


def embed_density(coeff_density) -> DensityMatrix:
    g = np.asarray(coeff_density, dtype=complex)
    return DensityMatrix(WEDGE @ g @ WEDGE.conj().T, (3, 3))


def random_antisym_density(seed=None, rank: int = 3) -> DensityMatrix:
    return embed_density(random_wedge_density(seed, rank))


def antisym_support_residual(rho: DensityMatrix) -> float:
    """Norm of the part of ``rho`` outside H- (zero iff supported on H-)."""
    m = rho.entries
    return float(np.linalg.norm(m - ANTISYM_PROJECTOR @ m @ ANTISYM_PROJECTOR))
