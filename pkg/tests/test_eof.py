import math

import numpy as np
import pytest

from antisym_eof.antisym import ANTISYM_PROJECTOR, embed, random_antisym_density, random_antisym_state
from antisym_eof.bounds import entanglement_of_psi_prime
from antisym_eof.eof import (
    TWO_COPY_CUT,
    Budget,
    ensemble_from_isometry,
    eof_lower_range,
    eof_upper,
    isometry_from_ensemble,
    product_ensemble,
    random_range_state,
    random_two_copy_state,
    range_decomposition,
    reduce_to_psi_prime,
    verify_additivity,
    wedge2_coefficients,
)
from antisym_eof.tensor_core import (
    DensityMatrix,
    ResidualError,
    StateVector,
    entanglement_entropy,
    haar_random_unitary,
    permute_factors,
    tensor_product,
    von_neumann_entropy,
)
from antisym_eof.xi_spectrum import ProbabilityTriple, build_xi, psi_prime_from_wedges

SMALL = Budget(evaluations=20_000, starts=4, start_evaluations=4_000)
MIXED_ANTISYM = DensityMatrix(ANTISYM_PROJECTOR / 3, (3, 3))


def qubit_density(vecs, weights):
    m = sum(w * np.outer(v, np.conj(v)) for v, w in zip(vecs, weights))
    return DensityMatrix(m, (2, 2))


def wootters_eof(rho):
    """Closed-form two-qubit entanglement of formation (bits)."""
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    tilde = yy @ rho.conj() @ yy
    ev = np.sqrt(np.clip(np.sort(np.linalg.eigvals(rho @ tilde).real)[::-1], 0, None))
    c = max(0.0, ev[0] - ev[1] - ev[2] - ev[3])
    x = (1 + math.sqrt(1 - c * c)) / 2
    return sum(-t * math.log2(t) for t in (x, 1 - x) if t > 0)


def phase_aligned_distance(a, b):
    ov = np.vdot(a, b)
    return float(np.linalg.norm(a * (ov / abs(ov)) - b))


class TestEnsembles:
    def test_range_decomposition(self):
        lam, vecs = range_decomposition(MIXED_ANTISYM)
        np.testing.assert_allclose(lam, [1 / 3] * 3, atol=1e-15)
        np.testing.assert_allclose(ANTISYM_PROJECTOR @ vecs, vecs, atol=1e-14)

    def test_eigen_ensemble(self):
        rho = random_antisym_density(1)
        ens = ensemble_from_isometry(rho, np.eye(3))
        ens.check(1e-12)
        lam, _ = range_decomposition(rho)
        np.testing.assert_allclose(ens.probabilities, lam / lam.sum(), atol=1e-14)

    def test_isometry_round_trip(self):
        rho = random_antisym_density(2)
        v = haar_random_unitary(9, 3)[:, :3]
        ens = ensemble_from_isometry(rho, v)
        ens.check(1e-12)
        assert len(ens) == 9
        np.testing.assert_allclose(isometry_from_ensemble(rho, ens), v, atol=1e-12)
        np.testing.assert_allclose(isometry_from_ensemble(rho, ens, m=12)[9:], 0)

    def test_zero_weight_members_dropped(self):
        v = np.vstack([np.eye(3), np.zeros((2, 3))])
        assert len(ensemble_from_isometry(MIXED_ANTISYM, v)) == 3

    def test_rejects_bad_isometry(self):
        with pytest.raises(ResidualError):
            ensemble_from_isometry(MIXED_ANTISYM, 2 * np.eye(3))
        with pytest.raises(ValueError):
            ensemble_from_isometry(MIXED_ANTISYM, np.eye(2))

    def test_product_ensemble(self):
        a = ensemble_from_isometry(random_antisym_density(4), haar_random_unitary(5, 0)[:, :3])
        b = ensemble_from_isometry(MIXED_ANTISYM, np.eye(3))
        prod = product_ensemble(a, b)
        assert len(prod) == len(a) * len(b)
        prod.check(1e-12)
        np.testing.assert_allclose(prod.target.entries, np.kron(a.target.entries, b.target.entries))


class TestEofUpper:
    def test_pure_antisym_state(self):
        rho = embed(random_antisym_state(8)).density()
        est = eof_upper(rho, [0], SMALL)
        assert est.upper == pytest.approx(1.0, abs=1e-12)
        est.witness.check()

    def test_maximally_mixed_antisym(self):
        est = eof_upper(MIXED_ANTISYM, [0], SMALL)
        assert est.upper == pytest.approx(1.0, abs=1e-12)

    def test_random_antisym(self):
        rho = random_antisym_density(11)
        est = eof_upper(rho, [0], SMALL)
        assert est.upper == pytest.approx(1.0, abs=1e-10)
        assert est.witness.average_entanglement([0]) == pytest.approx(est.upper, abs=1e-10)

    def test_finds_separable_decomposition(self):
        # (|Phi+><Phi+| + |Phi-><Phi-|)/2 = (|00><00| + |11><11|)/2
        s = 1 / math.sqrt(2)
        rho = qubit_density([[s, 0, 0, s], [s, 0, 0, -s]], [0.5, 0.5])
        est = eof_upper(rho, [0], SMALL)
        assert est.upper <= 1e-6

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_two_qubit_closed_form(self, seed):
        rng = np.random.default_rng(seed)
        vecs = [v / np.linalg.norm(v) for v in rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))]
        rho = qubit_density(vecs, [0.6, 0.4])
        exact = wootters_eof(rho.entries)
        est = eof_upper(rho, [0], Budget(evaluations=40_000, starts=8))
        assert exact - 1e-9 <= est.upper <= exact + 1e-5

    def test_monotone_in_budget(self):
        rho = qubit_density([[1, 0, 0, 0], [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0]], [0.5, 0.5])
        values = [eof_upper(rho, [0], Budget(evaluations=n, starts=3), seed=5).upper
                  for n in (50, 500, 5_000, 20_000)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_product_seed_gives_two(self):
        est1 = eof_upper(MIXED_ANTISYM, [0], SMALL)
        joint = tensor_product(MIXED_ANTISYM, MIXED_ANTISYM)
        seed = product_ensemble(est1.witness, est1.witness)
        est = eof_upper(joint, TWO_COPY_CUT, Budget(evaluations=2_000, starts=0), seeds=[seed])
        assert est.upper == pytest.approx(2.0, abs=1e-10)
        est.witness.check()

    def test_rejects_invalid_density(self):
        with pytest.raises(ResidualError):
            eof_upper(DensityMatrix(2 * ANTISYM_PROJECTOR / 3, (3, 3)), [0], SMALL)


class TestEofLowerRange:
    def test_antisym(self):
        assert eof_lower_range(random_antisym_density(9), [0], SMALL) == pytest.approx(1.0, abs=1e-10)

    def test_bell_state(self):
        s = 1 / math.sqrt(2)
        rho = qubit_density([[s, 0, 0, s]], [1.0])
        assert eof_lower_range(rho, [0], SMALL) == pytest.approx(1.0, abs=1e-12)

    def test_separable_range_reaches_zero(self):
        s = 1 / math.sqrt(2)
        rho = qubit_density([[s, 0, 0, s], [s, 0, 0, -s]], [0.5, 0.5])
        assert eof_lower_range(rho, [0], SMALL) <= 1e-8

    def test_two_copy_product(self):
        joint = tensor_product(random_antisym_density(1), random_antisym_density(2))
        val = eof_lower_range(joint, TWO_COPY_CUT, Budget(evaluations=10_000, starts=2))
        assert val >= 2 - 1e-8


class TestReduction:
    @pytest.mark.parametrize("seed", range(10))
    def test_round_trip(self, seed):
        psi = random_two_copy_state(seed)
        red = reduce_to_psi_prime(psi)
        target = psi_prime_from_wedges(red.triple).amplitudes
        assert phase_aligned_distance(red.apply(psi).amplitudes, target) <= 1e-9

    def test_normal_form_is_fixed(self):
        p = ProbabilityTriple(0.2, 0.5, 0.3)
        psi = permute_factors(psi_prime_from_wedges(p), [0, 2, 1, 3])
        red = reduce_to_psi_prime(psi)
        np.testing.assert_allclose(red.triple.as_array(), [0.5, 0.3, 0.2], atol=1e-12)

    def test_product_input(self):
        a, b = embed(random_antisym_state(1)), embed(random_antisym_state(2))
        red = reduce_to_psi_prime(tensor_product(a, b))
        np.testing.assert_allclose(red.triple.as_array(), [1, 0, 0], atol=1e-12)

    @pytest.mark.parametrize("seed", range(20))
    def test_three_way_entropy(self, seed):
        psi = random_two_copy_state(100 + seed)
        direct = entanglement_entropy(psi, TWO_COPY_CUT)
        t = reduce_to_psi_prime(psi).triple
        assert entanglement_of_psi_prime(t).total == pytest.approx(direct, abs=1e-10)
        assert von_neumann_entropy(build_xi(t)) == pytest.approx(direct, abs=1e-10)
        assert direct >= 2 - 1e-12

    def test_rejects_unsupported(self):
        rng = np.random.default_rng(0)
        v = rng.standard_normal(81)
        with pytest.raises(ResidualError):
            wedge2_coefficients(StateVector(v / np.linalg.norm(v), (3, 3, 3, 3)))
        with pytest.raises(ValueError):
            wedge2_coefficients(StateVector(np.eye(9)[0], (3, 3)))

    def test_range_states_are_supported(self):
        joint = tensor_product(random_antisym_density(5), MIXED_ANTISYM)
        psi = random_range_state(joint, 0)
        wedge2_coefficients(psi)


class TestVerifyAdditivity:
    def test_maximally_mixed_pair(self):
        rep = verify_additivity(MIXED_ANTISYM, MIXED_ANTISYM, Budget(evaluations=4_000, starts=1), samples=20)
        assert rep.passed
        assert rep.upper == pytest.approx(2.0, abs=1e-10)
        assert rep.max_crosscheck_deviation <= 1e-9
        d = rep.to_dict()
        assert d["verdict"] == "PASS" and d["samples"] == 20

    def test_pure_with_mixed(self):
        pure = embed(random_antisym_state(3)).density()
        rep = verify_additivity(pure, MIXED_ANTISYM, Budget(evaluations=4_000, starts=1), samples=20)
        assert rep.passed
        assert rep.upper_parts == pytest.approx((1.0, 1.0), abs=1e-10)

    def test_rejects_non_antisym_input(self):
        bad = DensityMatrix(np.diag([1.0] + [0.0] * 8), (3, 3))
        with pytest.raises(ResidualError):
            verify_additivity(bad, MIXED_ANTISYM, SMALL)

    def test_deterministic(self):
        b = Budget(evaluations=2_000, starts=1)
        a1 = verify_additivity(MIXED_ANTISYM, MIXED_ANTISYM, b, seed=4, samples=5).to_dict()
        a2 = verify_additivity(MIXED_ANTISYM, MIXED_ANTISYM, b, seed=4, samples=5).to_dict()
        assert a1 == a2
