"""Entanglement of formation: ensemble search, range lower bound, additivity check.

Every pure-state decomposition of ``rho = E diag(lam) E^dagger`` (rank r) with
m members comes from an m x r isometry V through the members

    v_i = sum_j V_ij sqrt(lam_j) e_j,    p_i = |v_i|^2.

``eof_upper`` searches over V with two-member Givens rotations (each move only
touches two members, so only two Schmidt spectra are recomputed) from several
starts. Any V it visits is a valid decomposition, so the result is an upper
bound by construction.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.special import entr

from .antisym import (
    WEDGE,
    AntisymState,
    antisym_support_residual,
    lemma1_unitary,
)
from .bounds import entanglement_of_psi_prime
from .tensor_core import (
    DEFAULT_TOL,
    DensityMatrix,
    ResidualError,
    StateVector,
    entanglement_entropy,
    haar_random_unitary,
    permute_factors,
    tensor_product,
)
from .xi_spectrum import ProbabilityTriple

LN2 = float(np.log(2.0))
RANK_TOL = 1e-10
SUPPORT_TOL = 1e-10

WEDGE2 = np.kron(WEDGE, WEDGE)
"""81x9 isometry onto H- (x) H- in factor order (A1, B1, A2, B2)."""


@dataclass(frozen=True)
class Budget:
    """Search effort, counted in objective evaluations.

    Starts run in a fixed order (eigen-ensemble, caller seeds, then
    ``starts`` Haar-random isometries) and stop when ``evaluations`` is used
    up, so a larger budget only ever extends the same trajectory.
    """

    evaluations: int = 150_000
    starts: int = 32
    start_evaluations: int = 4_000
    initial_step: float = 0.25
    min_step: float = 1e-3
    pair_sample: int = 64
    ftol: float = 1e-13


@dataclass(frozen=True, eq=False)
class Ensemble:
    probabilities: np.ndarray
    states: np.ndarray  # one normalized state per row
    dims: tuple[int, ...]
    target: DensityMatrix

    def __len__(self) -> int:
        return len(self.probabilities)

    def members(self) -> list[tuple[float, StateVector]]:
        return [(float(p), StateVector(s, self.dims)) for p, s in zip(self.probabilities, self.states)]

    def reconstruct(self) -> np.ndarray:
        s = self.states
        return (s.T * self.probabilities) @ s.conj()

    def residual(self) -> float:
        """Operator-norm distance between the mixture and its target."""
        return float(np.linalg.norm(self.reconstruct() - self.target.entries, 2))

    def average_entanglement(self, left: Sequence[int]) -> float:
        return float(sum(p * entanglement_entropy(psi, left) for p, psi in self.members()))

    def check(self, tol: float = DEFAULT_TOL) -> None:
        p = self.probabilities
        if p.min() <= 0 or abs(p.sum() - 1.0) > 1e-12:
            raise ResidualError("ensemble weights are not a probability vector", abs(p.sum() - 1.0))
        norms = np.abs(np.linalg.norm(self.states, axis=1) - 1.0)
        if norms.max() > tol:
            raise ResidualError("ensemble member not normalized", float(norms.max()))
        res = self.residual()
        if res > tol:
            raise ResidualError("ensemble does not reconstruct its target", res)


def range_decomposition(rho: DensityMatrix, tol: float = RANK_TOL):
    """Nonzero eigenvalues (descending) and their eigenvectors as columns."""
    w, v = np.linalg.eigh(rho.entries)
    keep = w > tol
    return w[keep][::-1], v[:, keep][:, ::-1]


def _check_isometry(v: np.ndarray, tol: float) -> None:
    r = v.shape[1]
    res = float(np.max(np.abs(v.conj().T @ v - np.eye(r)))) if r else 0.0
    if res > tol:
        raise ResidualError("matrix is not an isometry", res)


def ensemble_from_isometry(rho: DensityMatrix, v, tol: float = DEFAULT_TOL,
                           zero: float = 1e-15) -> Ensemble:
    """Ensemble of the rows of ``V diag(sqrt lam) E^T``; members of weight <= ``zero`` dropped."""
    lam, evecs = range_decomposition(rho)
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2 or v.shape[1] != len(lam) or v.shape[0] < len(lam):
        raise ValueError(f"isometry must be m x {len(lam)} with m >= {len(lam)}, got {v.shape}")
    _check_isometry(v, tol)
    members = v @ (np.sqrt(lam)[:, None] * evecs.T)
    weights = np.sum(np.abs(members) ** 2, axis=1)
    keep = weights > zero
    w = weights[keep]
    return Ensemble(w / w.sum(), members[keep] / np.sqrt(w)[:, None], rho.dims, rho)


def isometry_from_ensemble(rho: DensityMatrix, ensemble: Ensemble, m: int | None = None,
                           tol: float = DEFAULT_TOL) -> np.ndarray:
    """Inverse of :func:`ensemble_from_isometry`, zero-padded to ``m`` rows."""
    lam, evecs = range_decomposition(rho)
    vecs = np.sqrt(ensemble.probabilities)[:, None] * ensemble.states
    v = (vecs @ evecs.conj()) / np.sqrt(lam)[None, :]
    m = max(m or 0, v.shape[0])
    v = np.vstack([v, np.zeros((m - v.shape[0], v.shape[1]), dtype=complex)])
    _check_isometry(v, tol)
    return v


def product_ensemble(a: Ensemble, b: Ensemble) -> Ensemble:
    """All pairwise products of members, targeting ``a.target (x) b.target``."""
    probs = np.kron(a.probabilities, b.probabilities)
    states = np.einsum("ix,jy->ijxy", a.states, b.states).reshape(len(probs), -1)
    return Ensemble(probs, states, a.dims + b.dims, tensor_product(a.target, b.target))


@dataclass
class EofEstimate:
    upper: float
    witness: Ensemble
    lower: float | None = None
    evaluations: int = 0
    starts_run: int = 0
    converged: bool = False
    seed: int | None = None
    start_values: list = field(default_factory=list)


class _Objective:
    """Average Schmidt entropy of ensemble members, per member."""

    def __init__(self, dims, left):
        n = len(dims)
        left = tuple(sorted(left))
        right = tuple(k for k in range(n) if k not in left)
        self.order = list(left + right)
        self.shape = (int(np.prod([dims[k] for k in left])), int(np.prod([dims[k] for k in right])))

    def to_cut(self, vecs: np.ndarray, dims) -> np.ndarray:
        t = vecs.reshape((vecs.shape[0],) + tuple(dims))
        t = t.transpose([0] + [k + 1 for k in self.order])
        return t.reshape(vecs.shape[0], -1)

    def contributions(self, members: np.ndarray) -> np.ndarray:
        """``|v|^2 * E(v/|v|)`` in bits for each row ``v``."""
        mats = members.reshape((members.shape[0],) + self.shape)
        s2 = np.linalg.svd(mats, compute_uv=False) ** 2
        w = s2.sum(axis=1)
        return (entr(s2).sum(axis=1) - entr(w)) / LN2


def _refine(v, lam_sqrt, ecut, obj: _Objective, budget: Budget, rng, remaining: int):
    """Greedy two-member rotation search; returns (V, evals used, converged)."""
    members = v @ (lam_sqrt[:, None] * ecut.T)
    contrib = obj.contributions(members)
    m = v.shape[0]
    all_pairs = [(i, j) for i in range(m) for j in range(i + 1, m)]
    step = budget.initial_step
    evals = 0
    cap = min(budget.start_evaluations, remaining)
    phases = (1.0, 1j)
    while step >= budget.min_step and evals < cap:
        if len(all_pairs) <= budget.pair_sample:
            pairs = all_pairs
        else:
            idx = rng.choice(len(all_pairs), size=budget.pair_sample, replace=False)
            pairs = [all_pairs[k] for k in idx]
        gained = 0.0
        for i, j in pairs:
            if evals >= cap:
                break
            for t in (step, -step):
                c, s = np.cos(t), np.sin(t)
                moved = False
                for e in phases:
                    if evals >= cap:
                        break
                    rows = np.array([c * members[i] - s * np.conj(e) * members[j],
                                     s * e * members[i] + c * members[j]])
                    new = obj.contributions(rows)
                    evals += 1
                    delta = new[0] + new[1] - contrib[i] - contrib[j]
                    if delta < -budget.ftol:
                        members[i], members[j] = rows
                        v[i], v[j] = c * v[i] - s * np.conj(e) * v[j], s * e * v[i] + c * v[j]
                        contrib[i], contrib[j] = new
                        gained -= delta
                        moved = True
                        break
                if moved:
                    break
        if gained <= budget.ftol and evals < cap:
            step /= 2
    return v, evals, step < budget.min_step


def eof_upper(rho: DensityMatrix, left: Sequence[int], budget: Budget = Budget(), seed: int = 0,
              seeds: Sequence[Ensemble] = (), tol: float = DEFAULT_TOL) -> EofEstimate:
    """Upper bound on E_f(rho) across the cut ``left : rest`` by ensemble search.

    ``seeds`` are candidate decompositions of ``rho`` used as extra starts
    (e.g. products of optimal decompositions of tensor factors).
    """
    rho.check(tol)
    lam, evecs = range_decomposition(rho)
    r = len(lam)
    m = max([r * r] + [len(s) for s in seeds])
    obj = _Objective(rho.dims, left)
    ecut = obj.to_cut(evecs.T, rho.dims).T
    lam_sqrt = np.sqrt(lam)
    rng = np.random.default_rng(seed)

    def value(v):
        return float(obj.contributions(v @ (lam_sqrt[:, None] * ecut.T)).sum())

    eigen = np.zeros((m, r), dtype=complex)
    eigen[:r, :r] = np.eye(r)
    starts = [eigen] + [isometry_from_ensemble(rho, s, m, tol) for s in seeds]

    best_v, best_f, best_conv = eigen, value(eigen), False
    used = 0
    k = 0
    values = []
    while used < budget.evaluations or k == 0:
        if k < len(starts):
            v0 = starts[k].copy()
        elif k - len(starts) < budget.starts:
            v0 = haar_random_unitary(m, rng)[:, :r]
        else:
            break
        v, n, conv = _refine(v0, lam_sqrt, ecut, obj, budget, rng, budget.evaluations - used)
        used += n
        k += 1
        f = value(v)
        values.append(f)
        if f < best_f - budget.ftol or (k == 1):
            best_v, best_f, best_conv = v, f, conv
        if budget.evaluations - used <= 0:
            break

    witness = ensemble_from_isometry(rho, best_v, tol)
    return EofEstimate(best_f, witness, evaluations=used, starts_run=k,
                       converged=best_conv, seed=seed, start_values=values)


def eof_lower_range(rho: DensityMatrix, left: Sequence[int], budget: Budget = Budget(),
                    seed: int = 0) -> float:
    """Smallest pure-state entanglement found among normalized states in range(rho).

    Heuristic: it estimates (from above) the infimum that lower-bounds E_f.
    """
    lam, basis = range_decomposition(rho)
    r = len(lam)
    if r == 0:
        raise ValueError("rho has rank zero")
    obj = _Objective(rho.dims, left)
    bcut = obj.to_cut(basis.T, rho.dims).T
    if r == 1:
        return float(obj.contributions(bcut.T)[0])

    def f(x):
        c = x[:r] + 1j * x[r:]
        nrm = np.linalg.norm(c)
        if nrm == 0:
            return np.inf
        return float(obj.contributions((bcut @ (c / nrm))[None, :])[0])

    rng = np.random.default_rng(seed)
    x0s = [np.concatenate([np.eye(r)[k], np.zeros(r)]) for k in range(r)]
    x0s += [rng.standard_normal(2 * r) for _ in range(budget.starts)]
    best = np.inf
    used = 0
    for x0 in x0s:
        left_evals = budget.evaluations - used
        if left_evals <= 0:
            break
        res = minimize(f, x0, method="Nelder-Mead",
                       options={"maxfev": min(budget.start_evaluations, left_evals),
                                "xatol": 1e-10, "fatol": 1e-14})
        used += res.nfev
        best = min(best, float(res.fun), f(x0))
    return best


@dataclass(frozen=True, eq=False)
class Reduction:
    """Normal form of a two-copy antisymmetric state."""

    triple: ProbabilityTriple
    u1: np.ndarray
    u2: np.ndarray
    coefficients: np.ndarray  # 3x3 wedge-coordinate matrix of the input

    def apply(self, psi: StateVector) -> StateVector:
        """(u1 (x) u1 (x) u2 (x) u2) psi, reordered to (A1, A2, B1, B2)."""
        op = np.kron(np.kron(self.u1, self.u1), np.kron(self.u2, self.u2))
        return permute_factors(StateVector(op @ psi.amplitudes, psi.dims), [0, 2, 1, 3])


def wedge2_coefficients(psi: StateVector, tol: float = SUPPORT_TOL) -> np.ndarray:
    """3x3 matrix C with psi = sum_ab C_ab w_a (x) w_b; input order (A1, B1, A2, B2)."""
    if psi.dims != (3, 3, 3, 3):
        raise ValueError(f"expected a (3, 3, 3, 3) state, got {psi.dims}")
    c = WEDGE2.conj().T @ psi.amplitudes
    residual = float(np.linalg.norm(psi.amplitudes - WEDGE2 @ c))
    if residual > tol:
        raise ResidualError("state is not supported on the two-copy antisymmetric space", residual)
    return c.reshape(3, 3)


def reduce_to_psi_prime(psi: StateVector, tol: float = SUPPORT_TOL) -> Reduction:
    """Local unitaries bringing ``psi`` (order A1, B1, A2, B2) to the normal form.

    The Schmidt decomposition across copy 1 : copy 2 is read off the SVD of
    the wedge-coordinate matrix; each side's Schmidt basis is then rotated
    onto the wedge basis by the basis-aligning single-site unitary.
    """
    psi.check_normalized(tol)
    c = wedge2_coefficients(psi, tol)
    x, s, zh = np.linalg.svd(c)
    u1 = lemma1_unitary([AntisymState(x[:, k]) for k in range(3)])
    u2 = lemma1_unitary([AntisymState(zh[k, :]) for k in range(3)])
    w = s ** 2
    return Reduction(ProbabilityTriple.from_array(w / w.sum()), u1, u2, c)


def random_two_copy_state(seed=None) -> StateVector:
    """Gaussian-random normalized state in H- (x) H-, order (A1, B1, A2, B2)."""
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    return StateVector(WEDGE2 @ (c / np.linalg.norm(c)), (3, 3, 3, 3))


def random_range_state(rho: DensityMatrix, seed=None) -> StateVector:
    _, basis = range_decomposition(rho)
    rng = np.random.default_rng(seed)
    r = basis.shape[1]
    c = rng.standard_normal(r) + 1j * rng.standard_normal(r)
    return StateVector(basis @ (c / np.linalg.norm(c)), rho.dims)


TWO_COPY_CUT = (0, 2)
"""A1 A2 : B1 B2 in the natural (A1, B1, A2, B2) order."""


@dataclass
class AdditivityReport:
    upper: float
    upper_parts: tuple[float, float]
    range_min: float
    samples: int
    min_sample_entropy: float
    min_bound_total: float
    max_crosscheck_deviation: float
    verdict: str
    seed: int
    budget: Budget
    tol: float

    @property
    def passed(self) -> bool:
        return self.verdict == "PASS"

    def to_dict(self) -> dict:
        return {
            "upper": self.upper,
            "upper_parts": list(self.upper_parts),
            "lower_evidence": {
                "range_min": self.range_min,
                "sample_min": self.min_sample_entropy,
                "bound_path_min": self.min_bound_total,
            },
            "samples": self.samples,
            "min_sample_entropy": self.min_sample_entropy,
            "max_crosscheck_deviation": self.max_crosscheck_deviation,
            "verdict": self.verdict,
            "seed": self.seed,
            "budget": asdict(self.budget),
            "tol": self.tol,
        }


def verify_additivity(rho1: DensityMatrix, rho2: DensityMatrix, budget: Budget = Budget(),
                      seed: int = 0, samples: int = 200, tol: float = 1e-6) -> AdditivityReport:
    """Upper and lower evidence that E_f(rho1 (x) rho2) = 2 for states on H-."""
    for rho in (rho1, rho2):
        if rho.dims != (3, 3):
            raise ValueError("inputs must live on C^3 (x) C^3")
        res = antisym_support_residual(rho)
        if res > SUPPORT_TOL:
            raise ResidualError("input is not supported on the antisymmetric subspace", res)
    s1, s2, s12, s_low, s_samp = np.random.SeedSequence(seed).generate_state(5)

    est1 = eof_upper(rho1, [0], budget, seed=int(s1))
    est2 = eof_upper(rho2, [0], budget, seed=int(s2))
    joint = tensor_product(rho1, rho2)
    est = eof_upper(joint, TWO_COPY_CUT, budget, seed=int(s12),
                    seeds=[product_ensemble(est1.witness, est2.witness)])
    range_min = eof_lower_range(joint, TWO_COPY_CUT, budget, seed=int(s_low))

    rng = np.random.default_rng(int(s_samp))
    min_direct = min_total = np.inf
    max_dev = 0.0
    for _ in range(samples):
        psi = random_range_state(joint, rng)
        direct = entanglement_entropy(psi, TWO_COPY_CUT)
        total = entanglement_of_psi_prime(reduce_to_psi_prime(psi).triple).total
        min_direct = min(min_direct, direct)
        min_total = min(min_total, total)
        max_dev = max(max_dev, abs(direct - total))

    ok = (est.upper <= 2 + tol and range_min >= 2 - tol
          and min_direct >= 2 - tol and min_total >= 2 - tol)
    return AdditivityReport(est.upper, (est1.upper, est2.upper), range_min, samples,
                            float(min_direct), float(min_total), max_dev,
                            "PASS" if ok else "FAIL", seed, budget, tol)
