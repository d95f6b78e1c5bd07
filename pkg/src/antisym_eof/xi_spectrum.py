"""The two-copy normal-form state, its reduced matrix and the explicit spectrum.

A probability triple ``(p23, p31, p12)`` defines

    psi' = sum_ij sqrt(p_ij) |i,j> (x) |i,j>

on A1 (x) A2 (x) B1 (x) B2. Its reduced matrix on A1 A2 is a 3x3 block on
|11>,|22>,|33> plus six diagonal entries p_ij/4 on |ij>, i != j. The block's
eigenvalues are the roots of

    g(x) = x^3 - x^2/2 + x/16 - p12 p13 p23 / 16,

written as ``1/6 - cos(theta + 2 pi k / 3)/6`` with ``theta`` in [0, pi/3].
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .antisym import WEDGE, WEDGE_PAIRS
from .tensor_core import (
    DensityMatrix,
    StateVector,
    entropy_of_probabilities,
    permute_factors,
)

SIMPLEX_TOL = 1e-12
ZERO_P = 1e-15
CUBIC_TOL = 1e-9


@dataclass(frozen=True)
class ProbabilityTriple:
    """Schmidt weights of the normal-form state, in wedge-basis order."""

    p23: float
    p31: float
    p12: float

    def __post_init__(self):
        vals = self.as_array()
        if not np.all(np.isfinite(vals)) or vals.min() < -SIMPLEX_TOL:
            raise ValueError(f"probabilities must be nonnegative, got {tuple(vals)}")
        if abs(vals.sum() - 1.0) > SIMPLEX_TOL:
            raise ValueError(f"probabilities must sum to 1, got {vals.sum()!r}")

    @classmethod
    def from_array(cls, p) -> "ProbabilityTriple":
        a, b, c = (float(x) for x in p)
        return cls(a, b, c)

    def as_array(self) -> np.ndarray:
        return np.array([self.p23, self.p31, self.p12], dtype=float)

    @property
    def product(self) -> float:
        return self.p23 * self.p31 * self.p12


def simplex_grid(n: int) -> np.ndarray:
    """All triples (i, j, k)/n with i + j + k = n, as an (M, 3) float array.

    Integer compositions avoid floating-point drift in the grid.
    """
    if n < 1:
        raise ValueError("grid resolution must be positive")
    rows = [(i, j, n - i - j) for i in range(n + 1) for j in range(n + 1 - i)]
    return np.array(rows, dtype=float) / n


def clip_zeros(p) -> np.ndarray:
    """Treat entries below 1e-15 (incl. tiny negatives) as exact zeros."""
    p = np.asarray(p, dtype=float)
    return np.where(p < ZERO_P, 0.0, p)


def psi_prime_amplitudes(p) -> np.ndarray:
    """Normal-form amplitudes on A1 A2 B1 B2, from the explicit expansion.

    ``psi' = 1/2 sum_{i != j} sqrt(p_ij) (|ii;jj> - |ij;ji>)``. Accepts a
    single triple or an (N, 3) array; returns shape (..., 81).
    """
    p = clip_zeros(p)
    out = np.zeros(p.shape[:-1] + (3, 3, 3, 3))
    for k, (i, j) in enumerate(WEDGE_PAIRS):
        amp = 0.5 * np.sqrt(p[..., k])
        for a, b in ((i, j), (j, i)):
            out[..., a, a, b, b] += amp
            out[..., a, b, b, a] -= amp
    return out.reshape(p.shape[:-1] + (81,))


def build_psi_prime(p: ProbabilityTriple) -> StateVector:
    """Normal-form state with factor order (A1, A2, B1, B2)."""
    return StateVector(psi_prime_amplitudes(p.as_array()), (3, 3, 3, 3))


def psi_prime_from_wedges(p: ProbabilityTriple) -> StateVector:
    """Same state via sum sqrt(p_k) w_k (x) w_k on (A1, B1, A2, B2), then reordered."""
    q = clip_zeros(p.as_array())
    v = sum(np.sqrt(q[k]) * np.kron(WEDGE[:, k], WEDGE[:, k]) for k in range(3))
    return permute_factors(StateVector(v, (3, 3, 3, 3)), [0, 2, 1, 3])


def xi_matrices(p) -> np.ndarray:
    """Reduced matrix on A1 A2 assembled from the block form; shape (..., 9, 9)."""
    p = clip_zeros(p)
    p23, p31, p12 = p[..., 0], p[..., 1], p[..., 2]
    xi = np.zeros(p.shape[:-1] + (9, 9))
    d = (0, 4, 8)  # |11>, |22>, |33>
    block = [
        [p12 + p31, np.sqrt(p31 * p23), np.sqrt(p12 * p23)],
        [np.sqrt(p31 * p23), p12 + p23, np.sqrt(p12 * p31)],
        [np.sqrt(p12 * p23), np.sqrt(p12 * p31), p31 + p23],
    ]
    for r, c in itertools.product(range(3), repeat=2):
        xi[..., d[r], d[c]] = block[r][c] / 4
    for k, (i, j) in enumerate(WEDGE_PAIRS):
        xi[..., 3 * i + j, 3 * i + j] = p[..., k] / 4
        xi[..., 3 * j + i, 3 * j + i] = p[..., k] / 4
    return xi


def build_xi(p: ProbabilityTriple) -> DensityMatrix:
    return DensityMatrix(xi_matrices(p.as_array()), (3, 3))


@dataclass(frozen=True)
class CubicForm:
    """Monic cubic ``x^3 + a1 x^2 + a2 x + a3`` with its trigonometric parameters.

    The roots are ``alpha + beta * cos(theta + 2 pi k / 3)``; ``beta`` is
    taken nonpositive.
    """

    a1: float
    a2: float
    a3: float

    @property
    def coefficients(self) -> tuple[float, float, float, float]:
        return (1.0, self.a1, self.a2, self.a3)

    @property
    def alpha(self) -> float:
        return -self.a1 / 3

    @property
    def beta(self) -> float:
        # 3 alpha^2 + 3/2 beta^2 = a1^2 - 2 a2  (sum of squared roots)
        b2 = (2.0 / 3.0) * (self.a1 ** 2 - 2 * self.a2 - 3 * self.alpha ** 2)
        return -float(np.sqrt(max(b2, 0.0)))

    def __call__(self, x):
        return ((x + self.a1) * x + self.a2) * x + self.a3


def characteristic_cubic(p: ProbabilityTriple) -> CubicForm:
    q = clip_zeros(p.as_array())
    return CubicForm(-0.5, 1.0 / 16.0, -float(np.prod(q)) / 16.0)


def _cos3theta(product):
    # -4 g(alpha) / beta^3 with alpha = 1/6, beta = -1/6
    return 1.0 - 54.0 * np.asarray(product, dtype=float)


def _trig_roots(alpha, beta, cos3):
    theta = np.arccos(np.clip(cos3, -1.0, 1.0)) / 3.0
    phi = np.expand_dims(theta, -1) + np.arange(3) * (2 * np.pi / 3)
    # cos(phi) = 1 - 2 sin^2(phi/2); exact zero root when alpha = -beta
    roots = (alpha + beta) - 2.0 * beta * np.sin(phi / 2) ** 2
    return roots, theta


def cardan_roots(c: CubicForm) -> tuple[float, float, float, float]:
    """Trigonometric roots ``(l1, l2, l3, theta)`` of a cubic with three real roots.

    ``theta`` is canonicalized to [0, pi/3], which makes ``l1`` the smallest
    root when ``beta < 0``. ``l2``/``l3`` follow the k-index of the formula.
    """
    alpha, beta = c.alpha, c.beta
    if beta == 0.0:
        return alpha, alpha, alpha, 0.0
    cos3 = -4.0 * c(alpha) / beta ** 3
    if abs(cos3) > 1.0 + CUBIC_TOL:
        raise ValueError(f"cubic does not have three real roots (cos 3theta = {cos3!r})")
    roots, theta = _trig_roots(alpha, beta, cos3)
    return float(roots[0]), float(roots[1]), float(roots[2]), float(theta)


def block_roots(p) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized cubic-block roots for triples of shape (..., 3): (roots, theta)."""
    return _trig_roots(1 / 6, -1 / 6, _cos3theta(np.prod(clip_zeros(p), axis=-1)))


def analytic_spectra(p) -> np.ndarray:
    """Nine eigenvalues per triple, ordered (l1, l2, l3, p12/4 x2, p13/4 x2, p23/4 x2)."""
    p = clip_zeros(p)
    roots, _ = block_roots(p)
    p23, p31, p12 = p[..., 0:1], p[..., 1:2], p[..., 2:3]
    return np.concatenate([roots, p12 / 4, p12 / 4, p31 / 4, p31 / 4, p23 / 4, p23 / 4], axis=-1)


@dataclass(frozen=True)
class SpectrumResult:
    p: ProbabilityTriple
    eigenvalues: tuple[float, ...]
    theta: float
    cubic: CubicForm

    @property
    def entropy(self) -> float:
        return entropy_of_probabilities(self.eigenvalues)


def analytic_spectrum(p: ProbabilityTriple) -> SpectrumResult:
    # exact block parameters; the generic path loses sqrt(eps) at double roots
    roots, theta = block_roots(p.as_array())
    values = tuple(float(x) for x in roots) + tuple(float(x) for x in analytic_spectra(p.as_array())[3:])
    return SpectrumResult(p, values, float(theta), characteristic_cubic(p))


def numeric_spectra(p) -> np.ndarray:
    """Sorted spectra of the reduced matrix, built from the 81-dim state.

    Independent of the block formula: embeds sum sqrt(p_k) w_k (x) w_k,
    traces out B1 B2 and eigensolves. Input (N, 3); output (N, 9) ascending.
    """
    p = np.atleast_2d(clip_zeros(p))
    pairs = np.einsum("ak,bk->kab", WEDGE, WEDGE).reshape(3, 3, 3, 3, 3)  # k,A1,B1,A2,B2
    psi = np.einsum("nk,kabcd->nacbd", np.sqrt(p), pairs).reshape(-1, 9, 9)
    xi = psi @ np.swapaxes(psi.conj(), -1, -2)
    return np.linalg.eigvalsh(xi)
