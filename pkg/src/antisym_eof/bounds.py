"""Polynomial lower bounds on -z log2 z and the entropy chain E(psi') >= 2.

Pointwise bounds:

    -z log2 z >= log2(12) z                                   on [0, 1/12]
    -z log2 z >= 1/2 + c (z - 1/4) - 4 (z - 1/4)^2            on [1/12, 1/3]

with ``c = (ln 4 - 1)/ln 2``. For the cubic-block eigenvalues (l1 in
[0, 1/12], l2, l3 in [1/12, 1/3], l1+l2+l3 = 1/2, sum of squares 1/8) we
have ``sum (l - 1/4) = -l1`` over l2, l3 and ``sum (l - 1/4)^2 = l1/2 - l1^2``,
so adding the three bounds gives

    -sum_k l_k log2 l_k >= 1 + ((ln 3 + 1)/ln 2 - 2) l1 + 4 l1^2 >= 1.

The six remaining eigenvalues p_ij/4 (each twice) give exactly
``sum p (2 - log2 p)/2 = 1 + H(p)/2`` where H is the Shannon entropy in bits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import entr

from .xi_spectrum import ProbabilityTriple, analytic_spectra, clip_zeros, simplex_grid

LN2 = float(np.log(2.0))
LN3 = float(np.log(3.0))
LN4 = float(np.log(4.0))

LOG2_12 = (2 * LN2 + LN3) / LN2
QUAD_SLOPE = (LN4 - 1.0) / LN2
CERT_SLOPE = (LN3 + 1.0) / LN2 - 2.0
INFLECTION = 1.0 / (8.0 * LN2)

RANGE_TOL = 1e-12
CHAIN_SLACK = 1e-9


def neg_xlog2x(z):
    """-z log2 z with 0 at z = 0; works on scalars and arrays."""
    return entr(z) / LN2


def _check_range(z, lo: float, hi: float) -> None:
    z = np.asarray(z, dtype=float)
    if z.size and (z.min() < lo - RANGE_TOL or z.max() > hi + RANGE_TOL):
        raise ValueError(f"z outside [{lo:.6g}, {hi:.6g}]")


def linear_bound(z):
    _check_range(z, 0.0, 1 / 12)
    return LOG2_12 * np.asarray(z, dtype=float)


def quadratic_bound(z):
    _check_range(z, 1 / 12, 1 / 3)
    return _quadratic(np.asarray(z, dtype=float))


def _quadratic(z):
    d = z - 0.25
    return 0.5 + QUAD_SLOPE * d - 4.0 * d * d


def f_gap(z):
    """(-z log2 z) - quadratic bound."""
    z = np.asarray(z, dtype=float)
    return neg_xlog2x(z) - _quadratic(z)


def f_gap_prime(z):
    z = np.asarray(z, dtype=float)
    return -(np.log(z) + 1.0) / LN2 - QUAD_SLOPE + 8.0 * (z - 0.25)


def f_gap_second(z):
    z = np.asarray(z, dtype=float)
    return -1.0 / (z * LN2) + 8.0


def active_bound(z):
    """The pointwise bound that applies at ``z`` in [0, 1/3]."""
    z = np.asarray(z, dtype=float)
    _check_range(z, 0.0, 1 / 3)
    return np.where(z <= 1 / 12, LOG2_12 * z, _quadratic(z))


def certificate(l1):
    """Polynomial lower bound on the cubic-block entropy as a function of l1."""
    l1 = np.asarray(l1, dtype=float)
    return 1.0 + CERT_SLOPE * l1 + 4.0 * l1 * l1


@dataclass
class FTableReport:
    grid_step: float
    points: int
    min_f: float
    argmin_f: float
    f_at_quarter: float
    fprime_at_quarter: float
    inflection: float
    inflection_error: float
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def verify_f_table(grid_step: float = 1e-5, tol: float = 1e-10) -> FTableReport:
    """Check the monotonicity table of ``f_gap`` on [1/12, 1/3].

    Cells checked: f >= 0 everywhere; f(1/4) = f'(1/4) = 0; f'' < 0 before
    1/(8 ln 2) and > 0 after; f' <= 0 on (1/(8 ln 2), 1/4) and >= 0 after 1/4.
    """
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    n = int(np.ceil((1 / 3 - 1 / 12) / grid_step))
    z = np.linspace(1 / 12, 1 / 3, n + 1)
    f, f1, f2 = f_gap(z), f_gap_prime(z), f_gap_second(z)
    bad = []

    def flag(cell, mask, values):
        if np.any(mask):
            k = int(np.argmax(mask))
            bad.append({"cell": cell, "z": float(z[k]), "value": float(values[k])})

    flag("f >= 0", f < -1e-12, f)
    flag("f'' < 0 before inflection", (z < INFLECTION - 1e-8) & (f2 >= 0), f2)
    flag("f'' > 0 after inflection", (z > INFLECTION + 1e-8) & (f2 <= 0), f2)
    flag("f' <= 0 on (inflection, 1/4)", (z > INFLECTION) & (z < 0.25) & (f1 > tol), f1)
    flag("f' >= 0 on (1/4, 1/3]", (z > 0.25) & (f1 < -tol), f1)

    f_q, f1_q = float(f_gap(0.25)), float(f_gap_prime(0.25))
    if abs(f_q) > tol:
        bad.append({"cell": "f(1/4) = 0", "z": 0.25, "value": f_q})
    if abs(f1_q) > tol:
        bad.append({"cell": "f'(1/4) = 0", "z": 0.25, "value": f1_q})
    root = brentq(f_gap_second, 0.1, 0.25, xtol=1e-15)
    if abs(root - INFLECTION) > 1e-8:
        bad.append({"cell": "f'' root", "z": float(root), "value": float(root - INFLECTION)})
    k = int(np.argmin(f))
    return FTableReport(grid_step, len(z), float(f[k]), float(z[k]), f_q, f1_q,
                        float(root), float(abs(root - INFLECTION)), bad)


def last6_sum(p) -> np.ndarray:
    """Entropy contribution of the six eigenvalues p_ij/4, computed termwise."""
    p = clip_zeros(p)
    return 2.0 * np.sum(neg_xlog2x(p / 4.0), axis=-1)


def last6_identity(p) -> np.ndarray:
    """Closed form 1 + H(p)/2 of :func:`last6_sum`."""
    p = clip_zeros(p)
    return 1.0 + 0.5 * np.sum(neg_xlog2x(p), axis=-1)


def last6_bound(p: ProbabilityTriple) -> float:
    value = float(last6_sum(p.as_array()))
    if value < 1.0 - CHAIN_SLACK:
        raise ArithmeticError(f"last-six sum {value!r} < 1 at {p}")
    return value


@dataclass(frozen=True)
class First3Result:
    value: float
    certificate: float
    l1: float

    @property
    def margin(self) -> float:
        return self.value - 1.0


def first3_bound(p: ProbabilityTriple) -> First3Result:
    """True cubic-block entropy with its polynomial certificate; raises if the chain breaks."""
    lam = analytic_spectra(p.as_array())[:3]
    value = float(np.sum(neg_xlog2x(lam)))
    cert = float(certificate(lam[0]))
    if value < cert - CHAIN_SLACK or cert < 1.0 - CHAIN_SLACK:
        raise ArithmeticError(f"certificate chain violated at {p}: {value!r} >= {cert!r} >= 1")
    return First3Result(value, cert, float(lam[0]))


@dataclass(frozen=True)
class BoundReport:
    p: ProbabilityTriple
    sum_first3: float
    sum_last6: float
    total: float
    certificate: float
    slacks: tuple[float, float, float]
    """Pointwise slack of each cubic-block eigenvalue against its bound."""

    @property
    def margin_first3(self) -> float:
        return self.sum_first3 - 1.0

    @property
    def margin_last6(self) -> float:
        return self.sum_last6 - 1.0


def pointwise_slacks(lam) -> np.ndarray:
    """-l log2 l minus the active bound, for cubic-block eigenvalues (..., 3).

    Values a hair outside their nominal interval are clipped onto it before
    picking the bound.
    """
    lam = np.asarray(lam, dtype=float)
    l1 = np.clip(lam[..., 0], 0.0, 1 / 12)
    rest = np.clip(lam[..., 1:], 1 / 12, 1 / 3)
    lin = neg_xlog2x(lam[..., 0]) - LOG2_12 * l1
    quad = neg_xlog2x(lam[..., 1:]) - _quadratic(rest)
    return np.concatenate([lin[..., None], quad], axis=-1)


def entanglement_of_psi_prime(p: ProbabilityTriple) -> BoundReport:
    first = first3_bound(p)
    last = last6_bound(p)
    lam = analytic_spectra(p.as_array())[:3]
    slacks = tuple(float(s) for s in pointwise_slacks(lam))
    return BoundReport(p, first.value, last, first.value + last, first.certificate, slacks)


def psi_prime_entropy(p) -> np.ndarray:
    """Vectorized total entropy of the normal-form state for triples (..., 3)."""
    return np.sum(neg_xlog2x(analytic_spectra(p)), axis=-1)


@dataclass
class SimplexScan:
    p: np.ndarray
    sum_first3: np.ndarray
    sum_last6: np.ndarray
    total: np.ndarray
    certificate: np.ndarray
    slack: np.ndarray

    def argmin(self, name: str) -> int:
        return int(np.argmin(getattr(self, name)))


def scan_simplex(n: int) -> SimplexScan:
    """Bound chain over the integer simplex grid of resolution ``1/n``."""
    p = simplex_grid(n)
    lam = analytic_spectra(p)
    first = np.sum(neg_xlog2x(lam[:, :3]), axis=-1)
    last = last6_sum(p)
    return SimplexScan(p, first, last, first + last, certificate(lam[:, 0]),
                       pointwise_slacks(lam[:, :3]).min(axis=-1))


def z_curve(step: float = 1e-5, upper: float = 1 / 3):
    """(z, -z log2 z, active bound, slack) over [0, upper]; 1/12 and 1/4 always included."""
    n = int(np.ceil(upper / step))
    z = np.union1d(np.linspace(0.0, upper, n + 1), [1 / 12, 0.25])
    true = neg_xlog2x(z)
    bound = active_bound(z)
    return z, true, bound, true - bound
