import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from toricfib.exactmath import (
    InvariantViolation,
    adjugate,
    det,
    invert_unimodular,
    parallelepiped_points,
    primitive,
    rank,
    smith_normal_form,
    solve_in_basis,
    solve_linear_system,
    sublattice_index,
)
from oracles import box_lattice_points

nonzero_vectors = st.lists(st.integers(-50, 50), min_size=1, max_size=5).filter(
    lambda v: any(e != 0 for e in v)
)


class TestPrimitive:
    def test_divides_by_gcd(self):
        assert primitive((2, 4, 6)) == (1, 2, 3)

    def test_identity_on_primitive(self):
        assert primitive((1, 0)) == (1, 0)

    def test_preserves_signs(self):
        result = primitive((0, -3, 6))
        assert result == (0, -1, 2)
        assert tuple(3 * e for e in result) == (0, -3, 6)

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError, match="zero vector"):
            primitive((0, 0, 0))

    def test_float_entries_rejected(self):
        with pytest.raises(TypeError):
            primitive((1.0, 2))

    @given(nonzero_vectors)
    def test_idempotent(self, v):
        assert primitive(primitive(v)) == primitive(v)

    @given(nonzero_vectors)
    def test_positive_multiple(self, v):
        p = primitive(v)
        g = next(abs(a) // abs(b) for a, b in zip(v, p) if b != 0)
        assert tuple(g * e for e in p) == tuple(v)


class TestSolveInBasis:
    def test_skew_pair(self):
        assert solve_in_basis([(4, 1), (0, -1)], (1, 0)) == (Fraction(1, 4), Fraction(1, 4))

    def test_standard_basis(self):
        assert solve_in_basis([(1, 0), (0, 1)], (3, 5)) == (3, 5)

    def test_half_coefficients(self):
        assert solve_in_basis([(2, 1), (0, -1)], (1, 0)) == (Fraction(1, 2), Fraction(1, 2))

    def test_outside_span_is_none(self):
        assert solve_in_basis([(1, 0, 0), (0, 1, 0)], (0, 0, 1)) is None

    def test_dependent_generators_rejected(self):
        with pytest.raises(ValueError, match="not independent"):
            solve_in_basis([(1, 2), (2, 4)], (1, 0))
        with pytest.raises(ValueError, match="not independent"):
            solve_in_basis([(1, 0), (0, 1), (1, 1)], (1, 0))

    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=60)
    def test_reconstruction_random(self, seed):
        rng = random.Random(seed)
        d = rng.randint(1, 4)
        k = rng.randint(1, d)
        while True:
            gens = [tuple(rng.randint(-9, 9) for _ in range(d)) for _ in range(k)]
            if all(any(g) for g in gens) and rank(gens) == k:
                break
        coeffs = [Fraction(rng.randint(-12, 12), rng.randint(1, 7)) for _ in range(k)]
        target = tuple(
            sum((c * g[i] for c, g in zip(coeffs, gens)), Fraction(0)) for i in range(d)
        )
        assert solve_in_basis(gens, target) == tuple(coeffs)


class TestSmithNormalForm:
    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=80)
    def test_transforms_and_shape(self, seed):
        rng = random.Random(seed)
        m = rng.randint(1, 4)
        n = rng.randint(1, 4)
        a = [[rng.randint(-9, 9) for _ in range(n)] for _ in range(m)]
        u, d, v = smith_normal_form(a)
        ua = [[sum(u[i][k] * a[k][j] for k in range(m)) for j in range(n)] for i in range(m)]
        uav = [[sum(ua[i][k] * v[k][j] for k in range(n)) for j in range(n)] for i in range(m)]
        assert uav == d
        assert abs(det(u)) == 1
        assert abs(det(v)) == 1
        diag = [d[i][i] for i in range(min(m, n))]
        for i in range(m):
            for j in range(n):
                if i != j:
                    assert d[i][j] == 0
        assert all(x >= 0 for x in diag)
        for x, y in zip(diag, diag[1:]):
            if x != 0:
                assert y % x == 0
            else:
                assert y == 0

    def test_inverse_of_unimodular(self):
        u, _, _ = smith_normal_form([[4, 0], [1, -1]])
        uinv = invert_unimodular(u)
        prod = [[sum(u[i][k] * uinv[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
        assert prod == [[1, 0], [0, 1]]

    def test_non_unimodular_rejected(self):
        with pytest.raises(InvariantViolation):
            invert_unimodular([[2, 0], [0, 1]])


class TestAdjugate:
    @given(st.integers(0, 10 ** 6))
    @settings(max_examples=40)
    def test_definition(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 4)
        a = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
        adj = adjugate(a)
        d = det(a)
        prod = [[sum(adj[i][k] * a[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
        assert prod == [[d if i == j else 0 for j in range(n)] for i in range(n)]


class TestParallelepiped:
    def test_unit_square_only_origin(self):
        assert parallelepiped_points([(1, 0), (0, 1)]) == [((0, 0), (0, 0))]

    def test_skew_cone_points(self):
        pts = parallelepiped_points([(4, 1), (0, -1)])
        assert [p for p, _ in pts] == [(0, 0), (1, 0), (2, 0), (3, 0)]
        coeffs = {c for _, c in pts}
        assert coeffs == {(Fraction(k, 4), Fraction(k, 4)) for k in range(4)}

    def test_doubled_axis(self):
        pts = parallelepiped_points([(2, 0), (0, 1)])
        assert [p for p, _ in pts] == [(0, 0), (1, 0)]
        assert pts[1][1] == (Fraction(1, 2), 0)

    def test_dependent_rejected(self):
        with pytest.raises(ValueError, match="not independent"):
            parallelepiped_points([(1, 1), (2, 2)])

    def test_count_equals_index(self):
        rng = random.Random(7)
        checked = 0
        while checked < 40:
            d = rng.choice((2, 3))
            k = rng.randint(1, d)
            gens = [tuple(rng.randint(-5, 5) for _ in range(d)) for _ in range(k)]
            if any(not any(g) for g in gens) or rank(gens) != k:
                continue
            index = sublattice_index(gens)
            if index > 60:
                continue
            pts = parallelepiped_points(gens)
            assert len(pts) == index
            checked += 1

    def test_matches_bounding_box_oracle(self):
        rng = random.Random(11)
        checked = 0
        while checked < 25:
            d = rng.choice((2, 3))
            gens = [tuple(rng.randint(-4, 4) for _ in range(d)) for _ in range(d)]
            if any(not any(g) for g in gens) or rank(gens) != d:
                continue
            if sublattice_index(gens) > 40:
                continue
            assert parallelepiped_points(gens) == box_lattice_points(gens)
            checked += 1

    def test_reconstruction(self):
        gens = [(3, 1, 0), (0, 2, 1), (0, 0, 2)]
        for point, coeffs in parallelepiped_points(gens):
            rebuilt = tuple(
                sum((c * g[i] for c, g in zip(coeffs, gens)), Fraction(0)) for i in range(3)
            )
            assert rebuilt == point
            assert all(0 <= c < 1 for c in coeffs)


class TestSolveLinearSystem:
    def test_unique_solution(self):
        assert solve_linear_system([(1, 0), (0, 2)], (3, 4)) == (3, 2)

    def test_inconsistent_returns_none(self):
        assert solve_linear_system([(1, 0), (1, 0)], (1, 2)) is None

    def test_underdetermined_particular_solution(self):
        sol = solve_linear_system([(1, 1, 0)], (5,))
        assert sol is not None
        assert sum(sol[:2]) == 5
