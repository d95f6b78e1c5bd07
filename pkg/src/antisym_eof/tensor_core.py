"""Dense linear algebra over explicitly factored tensor-product spaces.

Flattened indices are row-major: the leftmost factor is the most
significant, so ``tensor_product`` is a plain Kronecker product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

DEFAULT_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-12
CLIP_TOL = 1e-14
MAX_TOTAL_DIM = 10_000

FactorShape = tuple[int, ...]


class ResidualError(ValueError):
    """Raised when an input misses a numerical requirement by ``residual``."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = float(residual)


def check_shape(dims: Sequence[int]) -> FactorShape:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"factor dimensions must be positive, got {dims}")
    if int(np.prod(dims)) > MAX_TOTAL_DIM:
        raise ValueError(f"total dimension {int(np.prod(dims))} exceeds {MAX_TOTAL_DIM}")
    return dims


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitudes tagged with the dimensions of their tensor factors."""

    amplitudes: np.ndarray
    dims: FactorShape

    def __post_init__(self):
        dims = check_shape(self.dims)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != int(np.prod(dims)):
            raise ValueError(f"{amps.size} amplitudes do not fit shape {dims}")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        return StateVector(self.amplitudes / self.norm, self.dims)

    def density(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def check_normalized(self, tol: float = DEFAULT_TOL) -> None:
        if abs(self.norm - 1.0) > tol:
            raise ResidualError("state is not normalized", abs(self.norm - 1.0))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Square complex matrix with factor-shape metadata.

    Construction only checks the shape; call :meth:`check` to enforce the
    density-matrix laws (Hermitian, PSD, unit trace).
    """

    entries: np.ndarray
    dims: FactorShape

    def __post_init__(self):
        dims = check_shape(self.dims)
        n = int(np.prod(dims))
        m = np.array(self.entries, dtype=complex)
        if m.shape != (n, n):
            raise ValueError(f"matrix of shape {m.shape} does not fit factor shape {dims}")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "entries", m)

    @property
    def trace(self) -> float:
        return float(np.trace(self.entries).real)

    def check(self, tol: float = DEFAULT_TOL) -> None:
        m = self.entries
        herm = float(np.max(np.abs(m - m.conj().T)))
        if herm > tol:
            raise ResidualError("matrix is not Hermitian", herm)
        lo = float(np.linalg.eigvalsh(m)[0])
        if lo < -tol:
            raise ResidualError("matrix is not positive semidefinite", -lo)
        if abs(self.trace - 1.0) > tol:
            raise ResidualError("matrix does not have unit trace", abs(self.trace - 1.0))


Operand = Union[StateVector, DensityMatrix]


def tensor_product(a: Operand, b: Operand) -> Operand:
    """Kronecker product; the left operand's factors come first."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        return DensityMatrix(np.kron(a.entries, b.entries), a.dims + b.dims)
    raise TypeError("tensor_product needs two operands of the same kind")


def _check_perm(perm: Sequence[int], n: int) -> list[int]:
    perm = [int(k) for k in perm]
    if sorted(perm) != list(range(n)):
        raise ValueError(f"{perm} is not a permutation of 0..{n - 1}")
    return perm


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for k, p in enumerate(perm):
        inv[p] = k
    return inv


def permute_factors(x: Operand, perm: Sequence[int]) -> Operand:
    """Reorder factors so output factor ``k`` is input factor ``perm[k]``."""
    n = len(x.dims)
    perm = _check_perm(perm, n)
    dims = tuple(x.dims[p] for p in perm)
    if isinstance(x, StateVector):
        t = x.amplitudes.reshape(x.dims).transpose(perm)
        return StateVector(t.reshape(-1), dims)
    t = x.entries.reshape(x.dims + x.dims).transpose(perm + [n + p for p in perm])
    size = int(np.prod(dims))
    return DensityMatrix(t.reshape(size, size), dims)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Trace out every factor not listed in ``keep``.

    Kept factors stay in their original relative order.
    """
    n = len(rho.dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or len(keep) == n or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep must be a nonempty proper subset of 0..{n - 1}, got {keep}")
    rows = list(range(n))
    cols = [k if k not in keep else n + k for k in range(n)]
    out = keep + [n + k for k in keep]
    t = np.einsum(rho.entries.reshape(rho.dims + rho.dims), rows + cols, out)
    dims = tuple(rho.dims[k] for k in keep)
    size = int(np.prod(dims))
    return DensityMatrix(t.reshape(size, size), dims)


def hermitian_spectrum(m, vectors: bool = False, tol: float = DEFAULT_TOL):
    """Eigenvalues of a Hermitian matrix in descending order.

    With ``vectors=True`` returns ``(values, vectors)`` where column ``k``
    belongs to ``values[k]``.
    """
    a = m.entries if isinstance(m, DensityMatrix) else np.asarray(m, dtype=complex)
    herm = float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0
    if herm > tol:
        raise ResidualError("matrix is not Hermitian", herm)
    if vectors:
        w, v = np.linalg.eigh(a)
        return w[::-1], v[:, ::-1]
    return np.linalg.eigvalsh(a)[::-1]


def entropy_of_probabilities(probs, tol: float = DEFAULT_TOL, clip: float = CLIP_TOL) -> float:
    """Shannon entropy in bits, with ``0 log 0 = 0``.

    Values in ``[-tol, clip]`` count as exact zeros; anything more negative
    is rejected.
    """
    p = np.asarray(probs, dtype=float)
    if p.size and p.min() < -tol:
        raise ResidualError("negative probability", -float(p.min()))
    p = p[p > clip]
    return float(-np.sum(p * np.log(p)) / np.log(2.0))


def von_neumann_entropy(rho: DensityMatrix, tol: float = DEFAULT_TOL, clip: float = CLIP_TOL) -> float:
    return entropy_of_probabilities(hermitian_spectrum(rho, tol=tol), tol=tol, clip=clip)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``psi = sum_i coefficients[i] * left_basis[:, i] (x) right_basis[:, i]``.

    The two sides are flattened in the factor order given by ``left`` and
    ``right``; :meth:`reconstruct` undoes that reordering.
    """

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    left: tuple[int, ...]
    right: tuple[int, ...]
    dims: FactorShape

    @property
    def weights(self) -> np.ndarray:
        return self.coefficients ** 2

    @property
    def entropy(self) -> float:
        return entropy_of_probabilities(self.weights)

    def reconstruct(self) -> StateVector:
        flat = np.einsum("i,ai,bi->ab", self.coefficients, self.left_basis, self.right_basis)
        order = self.left + self.right
        v = StateVector(flat.reshape(-1), tuple(self.dims[k] for k in order))
        return permute_factors(v, inverse_permutation(order))


def _split(n: int, left: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    left = tuple(sorted(set(int(k) for k in left)))
    if not left or len(left) == n or left[0] < 0 or left[-1] >= n:
        raise ValueError(f"cut must be a nonempty proper subset of 0..{n - 1}, got {left}")
    return left, tuple(k for k in range(n) if k not in left)


def bipartite_matrix(psi: StateVector, left: Sequence[int]) -> np.ndarray:
    """Amplitudes reshaped to a (left dim, right dim) matrix."""
    left, right = _split(len(psi.dims), left)
    t = psi.amplitudes.reshape(psi.dims).transpose(left + right)
    d_left = int(np.prod([psi.dims[k] for k in left]))
    return t.reshape(d_left, -1)


def schmidt(psi: StateVector, left: Sequence[int], tol: float = DEFAULT_TOL) -> SchmidtDecomposition:
    """Schmidt decomposition across the cut ``left : rest`` via SVD."""
    psi.check_normalized(tol)
    left_idx, right_idx = _split(len(psi.dims), left)
    u, s, vh = np.linalg.svd(bipartite_matrix(psi, left_idx), full_matrices=False)
    return SchmidtDecomposition(s, u, vh.T, left_idx, right_idx, psi.dims)


def entanglement_entropy(psi: StateVector, left: Sequence[int]) -> float:
    """Entropy (bits) of the reduced state on ``left``, from singular values."""
    s = np.linalg.svd(bipartite_matrix(psi, left), compute_uv=False)
    return entropy_of_probabilities(s ** 2 / np.sum(s ** 2))


def haar_random_unitary(n: int, seed=None) -> np.ndarray:
    """Haar-distributed ``n x n`` unitary.

    QR of a complex Ginibre matrix with the phases of ``diag(R)`` folded back
    into ``Q``. ``seed`` may be an int or a ``numpy.random.Generator``.
    """
    if n < 1:
        raise ValueError("dimension must be at least 1")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def to_json_pairs(a) -> list:
    """Nested lists of ``[re, im]`` pairs, mirroring the array's shape."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [to_json_pairs(x) for x in a]


def from_json_pairs(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    return arr[..., 0] + 1j * arr[..., 1]
