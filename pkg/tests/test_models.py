import random
from fractions import Fraction

import pytest

from toricfib.divisors import zero_divisor
from toricfib.exactmath import InvariantViolation, is_primitive
from toricfib.fan import multiplicity, standard_fibration_fan
from toricfib.models import (
    DecompositionData,
    log_canonical_class_split,
    model_V,
    model_W_U,
    model_Y,
    verify_extraction_identities,
)


def random_instance(rng, d=None, bound=12):
    """A valid (d, n, l) triple: both primitive, vertical, distinct."""
    d = d or rng.choice((2, 3, 4))
    while True:
        n = tuple([rng.randint(1, bound)] + [rng.randint(-bound, bound) for _ in range(d - 1)])
        l = tuple([rng.randint(1, bound)] + [rng.randint(-bound, bound) for _ in range(d - 1)])
        if is_primitive(n) and is_primitive(l) and n != l:
            return d, n, l


class TestModelV:
    def test_identity_model_is_standard_fan(self):
        assert model_V(3, (1, 0, 0)).fan == standard_fibration_fan(3)

    @pytest.mark.parametrize("n", [2, 4, 9])
    def test_skew_family(self, n):
        model = model_V(2, (n, 1))
        assert model.distinguished_ray == (n, 1)
        assert model.fan.rays == ((0, -1), (0, 1), (n, 1))
        assert len(model.fan.maximal_cones) == 2

    def test_dimension_three(self):
        model = model_V(3, (2, 1, 1))
        assert len(model.fan.maximal_cones) == 3
        assert all(multiplicity(c) == 2 for c in model.fan.maximal_cones)
        rng = random.Random(1)
        for _ in range(60):
            point = tuple(rng.randint(-6, 6) for _ in range(3))
            assert model.fan.support_contains(point) == (point[0] >= 0)

    def test_rejects_bad_vectors(self):
        with pytest.raises(ValueError, match="primitive"):
            model_V(2, (2, 4))
        with pytest.raises(ValueError, match="positive first"):
            model_V(2, (0, 1))
        with pytest.raises(ValueError, match="positive first"):
            model_V(2, (-1, 2))


class TestModelY:
    def test_skew_family_data(self):
        v = model_V(2, (6, 1))
        y, theta, data = model_Y(v, (1, 0), 3, Fraction(1, 2))
        assert y.fan.rays == ((0, -1), (0, 1), (1, 0), (6, 1))
        assert data.gamma == Fraction(1, 6)
        assert dict(data.alphas) == {(0, -1): Fraction(1, 6)}
        assert data.a == Fraction(2, 6)
        assert data.u == Fraction(2, 6)
        # theta = (1 - eps + r/n) D + r S_1 + r S_2
        assert theta.as_dict() == {
            (1, 0): Fraction(1, 2) + Fraction(3, 6),
            (0, 1): 3,
            (0, -1): 3,
        }

    def test_degenerate_parameters(self):
        v = model_V(2, (6, 1))
        _, theta, data = model_Y(v, (1, 0), 1, Fraction(1))
        assert theta.as_dict() == {(1, 0): Fraction(1, 6), (0, 1): 1, (0, -1): 1}
        assert data.u == 0

    def test_dimension_three_hand_case(self):
        v = model_V(3, (1, 0, 0))
        _, _, data = model_Y(v, (1, 1, 0), 1, Fraction(1, 2))
        assert data.gamma == 1
        assert dict(data.alphas) == {(0, 1, 0): 1}
        assert data.a == 2

    def test_proportional_vector_rejected(self):
        v = model_V(2, (3, 1))
        with pytest.raises(ValueError, match="distinct toric prime divisors"):
            model_Y(v, (3, 1), 1, Fraction(1, 2))

    def test_horizontal_vector_rejected(self):
        v = model_V(2, (3, 1))
        with pytest.raises(ValueError, match="positive first"):
            model_Y(v, (0, 1), 1, Fraction(1, 2))

    def test_single_blowup_of_identity_model(self):
        v = model_V(2, (1, 0))
        y, _, data = model_Y(v, (1, 1), 1, Fraction(1, 2))
        assert y.fan.rays == ((0, -1), (0, 1), (1, 0), (1, 1))
        assert data.a == 2  # smooth point blowup


class TestModelWU:
    def test_swapped_chain_instance(self):
        w, u, data = model_W_U(2, (1, 0), (6, 1))
        assert w.fan == standard_fibration_fan(2)
        assert data.lam == 6
        assert dict(data.betas) == {(0, 1): 1}

    def test_lambda_inverts_gamma(self):
        rng = random.Random(4)
        for _ in range(20):
            d, n, l = random_instance(rng)
            v = model_V(d, n)
            _, _, ydata = model_Y(v, l, 1, Fraction(1, 2))
            _, _, wdata = model_W_U(d, l, n)
            assert wdata.lam * ydata.gamma == 1
            assert ydata.gamma == Fraction(l[0], n[0])

    def test_codimension_one_isomorphism(self):
        rng = random.Random(9)
        for _ in range(20):
            d, n, l = random_instance(rng, d=3)
            v = model_V(d, n)
            y, _, _ = model_Y(v, l, 1, Fraction(1, 2))
            _, u, _ = model_W_U(d, l, n)
            assert y.fan.rays == u.fan.rays


class TestDecompositionData:
    def test_merge_checks_gamma(self):
        left = DecompositionData(gamma=Fraction(1, 2))
        right = DecompositionData(gamma=Fraction(1, 3), lam=3, betas=(((0, 1), Fraction(1)),))
        with pytest.raises(InvariantViolation):
            left.merged_with(right)

    def test_inconsistent_a_rejected(self):
        with pytest.raises(InvariantViolation):
            DecompositionData(
                gamma=Fraction(1, 2),
                alphas=(((0, 1), Fraction(1, 2)),),
                a=Fraction(3, 2),
            )

    def test_vector_identity(self):
        # gamma*n - l = sum(gamma beta_k f_k) = -sum(alpha_j e_j), exactly
        rng = random.Random(31)
        for _ in range(30):
            d, n, l = random_instance(rng)
            v = model_V(d, n)
            _, _, ydata = model_Y(v, l, 2, Fraction(1, 3))
            _, _, wdata = model_W_U(d, l, n)
            gamma = ydata.gamma
            for i in range(d):
                diff = gamma * n[i] - l[i]
                via_beta = sum(
                    (gamma * c * ray[i] for ray, c in wdata.betas), Fraction(0)
                )
                via_alpha = -sum((c * ray[i] for ray, c in ydata.alphas), Fraction(0))
                assert diff == via_beta == via_alpha


class TestExtractionIdentities:
    @pytest.mark.parametrize("n", range(2, 11))
    def test_skew_family(self, n):
        v = model_V(2, (n, 1))
        y, _, data = model_Y(v, (1, 0), 1, Fraction(1, 2))
        report = verify_extraction_identities(y, data)
        assert report.crepant_exact
        assert report.lc_trivial_witness is not None
        assert report.fiber_trivial_witness is not None
        assert report.all_pass

    def test_dimension_three(self):
        v = model_V(3, (3, 1, 0))
        y, _, data = model_Y(v, (1, 1, 1), 2, Fraction(1, 3))
        assert verify_extraction_identities(y, data).all_pass

    def test_randomized(self):
        rng = random.Random(13)
        for _ in range(25):
            d, n, l = random_instance(rng)
            v = model_V(d, n)
            y, _, data = model_Y(v, l, rng.randint(1, 3), Fraction(1, rng.randint(1, 4)))
            assert verify_extraction_identities(y, data).all_pass


class TestClassSplit:
    @pytest.mark.parametrize("n,r,eps", [(6, 1, Fraction(1, 2)), (5, 3, Fraction(1, 5))])
    def test_skew_family_closed_form(self, n, r, eps):
        v = model_V(2, (n, 1))
        y, _, data = model_Y(v, (1, 0), r, eps)
        c, residue = log_canonical_class_split(y, data, r, eps)
        assert c == (eps - Fraction(2, n) - Fraction(r - 1, n)) * n
        assert residue.is_zero()

    def test_boundary_case_zero_coefficient(self):
        v = model_V(2, (4, 1))
        y, _, data = model_Y(v, (1, 0), 1, Fraction(1, 2))
        # eps = a + u makes the leading coefficient vanish
        eps = data.a
        y2, _, data2 = model_Y(v, (1, 0), 1, eps)
        c, _ = log_canonical_class_split(y2, data2, 1, eps)
        assert c == 0

    def test_randomized_exact(self):
        rng = random.Random(37)
        for _ in range(30):
            d, n, l = random_instance(rng)
            r = rng.randint(1, 3)
            eps = Fraction(rng.randint(1, 4), 4)
            v = model_V(d, n)
            y, _, data = model_Y(v, l, r, eps)
            c, residue = log_canonical_class_split(y, data, r, eps)
            assert residue.is_zero()
            assert c == (eps - data.a - data.u) * Fraction(n[0], l[0])

    def test_r_mismatch_rejected(self):
        v = model_V(2, (4, 1))
        y, _, data = model_Y(v, (1, 0), 2, Fraction(1, 2))
        with pytest.raises(ValueError, match="different r"):
            log_canonical_class_split(y, data, 3, Fraction(1, 2))
