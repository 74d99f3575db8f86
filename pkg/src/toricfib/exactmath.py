"""Exact integer and rational linear algebra over lattices.

Everything in this package runs on Python ints and ``fractions.Fraction``;
no floating point enters anywhere.  Vectors are plain tuples: integer
tuples for lattice points, Fraction tuples for rational coefficients.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Iterable, Sequence

Rat = Fraction
LatticeVector = tuple[int, ...]
RationalVector = tuple[Fraction, ...]


class InvariantViolation(RuntimeError):
    """An exact internal identity failed; this signals a construction bug,
    not bad user input."""


def lattice_vector(entries: Iterable[int]) -> LatticeVector:
    v = tuple(entries)
    if not v:
        raise ValueError("lattice vectors must have dimension >= 1")
    for e in v:
        if isinstance(e, bool) or not isinstance(e, int):
            raise TypeError(f"lattice vector entries must be ints, got {e!r}")
    return v


def rational_vector(entries: Iterable[int | Fraction]) -> RationalVector:
    out = []
    for e in entries:
        if isinstance(e, float):
            raise TypeError("floating point is not allowed; use Fraction")
        out.append(Fraction(e))
    if not out:
        raise ValueError("rational vectors must have dimension >= 1")
    return tuple(out)


def ensure_rational(value: int | Fraction) -> Fraction:
    if isinstance(value, float):
        raise TypeError("floating point is not allowed; use Fraction")
    return Fraction(value)


def dot(u: Sequence[int | Fraction], v: Sequence[int | Fraction]) -> Fraction:
    if len(u) != len(v):
        raise ValueError("dimension mismatch in dot product")
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def primitive(v: Sequence[int]) -> LatticeVector:
    """Divide a nonzero integer vector by the gcd of its entries.

    The result is the unique primitive vector that is a positive multiple
    of the input; signs are preserved.
    """
    vec = lattice_vector(v)
    g = math.gcd(*(abs(e) for e in vec))
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(e // g for e in vec)


def is_primitive(v: Sequence[int]) -> bool:
    vec = lattice_vector(v)
    return any(e != 0 for e in vec) and primitive(vec) == vec


def _row_reduce(rows: list[list[Fraction]]) -> list[int]:
    """Reduce ``rows`` in place to reduced row echelon form.

    Returns the pivot column indices in order.
    """
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        pr = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
        if pr is None:
            continue
        rows[r], rows[pr] = rows[pr], rows[r]
        inv = rows[r][c]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def rank(vectors: Sequence[Sequence[int | Fraction]]) -> int:
    rows = [[Fraction(e) for e in v] for v in vectors]
    return len(_row_reduce(rows))


def solve_in_basis(
    generators: Sequence[Sequence[int]],
    target: Sequence[int | Fraction],
) -> RationalVector | None:
    """Express ``target`` as an exact rational combination of ``generators``.

    The generators must be linearly independent over Q (else ValueError).
    Returns the unique coefficient vector when the target lies in their
    span, and None otherwise.
    """
    gens = [lattice_vector(g) for g in generators]
    if not gens:
        raise ValueError("empty generator list")
    d = len(gens[0])
    if any(len(g) != d for g in gens):
        raise ValueError("generators have mixed dimensions")
    tgt = rational_vector(target)
    if len(tgt) != d:
        raise ValueError("target dimension mismatch")
    k = len(gens)
    if k == d:
        # Cramer over integers: much faster than rational elimination.
        base = det([[g[i] for g in gens] for i in range(d)])
        if base == 0:
            raise ValueError("generators not independent")
        scale = math.lcm(*(t.denominator for t in tgt))
        tint = [int(t * scale) for t in tgt]
        sol = []
        for j in range(k):
            columns = [[tint[i] if jj == j else gens[jj][i] for jj in range(k)] for i in range(d)]
            sol.append(Fraction(det(columns), base * scale))
        return tuple(sol)
    rows = [[Fraction(g[i]) for g in gens] + [tgt[i]] for i in range(d)]
    pivots = _row_reduce(rows)
    if len([p for p in pivots if p < k]) < k:
        raise ValueError("generators not independent")
    if k in pivots:
        return None
    sol = [Fraction(0)] * k
    for r, p in enumerate(pivots):
        sol[p] = rows[r][k]
    return tuple(sol)


def solve_linear_system(
    rows_in: Sequence[Sequence[int | Fraction]],
    rhs: Sequence[int | Fraction],
) -> RationalVector | None:
    """A particular solution x of <row_i, x> = rhs_i, or None if inconsistent.

    Free variables are set to zero; the system may be under- or
    over-determined.
    """
    if len(rows_in) != len(rhs):
        raise ValueError("system shape mismatch")
    if not rows_in:
        raise ValueError("empty system")
    d = len(rows_in[0])
    if len(rows_in) == d:
        rows_int = []
        for row in rows_in:
            ints = []
            for e in row:
                if isinstance(e, int):
                    ints.append(e)
                elif isinstance(e, Fraction) and e.denominator == 1:
                    ints.append(int(e))
                else:
                    break
            else:
                rows_int.append(ints)
                continue
            break
        if len(rows_int) == d:
            base = det(rows_int)
            if base != 0:
                # invertible square integer system: solve through the adjugate
                adj = adjugate(rows_int)
                rhs_f = [ensure_rational(b) for b in rhs]
                return tuple(
                    sum((adj[i][k] * rhs_f[k] for k in range(d)), Fraction(0)) / base
                    for i in range(d)
                )
    aug = [[Fraction(e) for e in row] + [ensure_rational(b)] for row, b in zip(rows_in, rhs)]
    pivots = _row_reduce(aug)
    if d in pivots:
        return None
    sol = [Fraction(0)] * d
    for r, p in enumerate(pivots):
        sol[p] = aug[r][d]
    return tuple(sol)


def det(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    a = [[int(e) for e in row] for row in matrix]
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("matrix is not square")
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def adjugate(matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    """Integer adjugate: adj(A) @ A = det(A) * I."""
    a = [[int(e) for e in row] for row in matrix]
    n = len(a)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [a[r][c] for c in range(n) if c != j]
                for r in range(n)
                if r != i
            ]
            adj[j][i] = (-1) ** (i + j) * det(minor)
    return adj


def smith_normal_form(
    matrix: Sequence[Sequence[int]],
) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Smith normal form with transforms: returns (U, D, V) with U A V = D.

    U and V are unimodular; D is diagonal with nonnegative entries, each
    dividing the next.
    """
    a = [[int(e) for e in row] for row in matrix]
    m = len(a)
    n = len(a[0])
    if any(len(row) != n for row in a):
        raise ValueError("ragged matrix")
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def sub_row(src: int, dst: int, q: int) -> None:
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def sub_col(src: int, dst: int, q: int) -> None:
        for row in a:
            row[dst] -= q * row[src]
        for row in v:
            row[dst] -= q * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        p = a[t][t]
        dirty = False
        for i in range(t + 1, m):
            if a[i][t] != 0:
                sub_row(t, i, a[i][t] // p)
                if a[i][t] != 0:
                    dirty = True
        for j in range(t + 1, n):
            if a[t][j] != 0:
                sub_col(t, j, a[t][j] // p)
                if a[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        offender = next(
            ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % p != 0),
            None,
        )
        if offender is not None:
            sub_row(offender[0], t, -1)
            continue
        t += 1
    return u, a, v


def invert_unimodular(matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    """Exact inverse of an integer matrix with determinant +-1."""
    n = len(matrix)
    aug = [
        [Fraction(matrix[i][j]) for j in range(n)] + [Fraction(int(i == k)) for k in range(n)]
        for i in range(n)
    ]
    pivots = _row_reduce(aug)
    if pivots != list(range(n)):
        raise InvariantViolation("matrix is singular, cannot invert")
    inv = []
    for i in range(n):
        row = []
        for j in range(n):
            x = aug[i][n + j]
            if x.denominator != 1:
                raise InvariantViolation("matrix is not unimodular")
            row.append(int(x))
        inv.append(row)
    return inv


def sublattice_index(vectors: Sequence[Sequence[int]]) -> int:
    """Index of the sublattice spanned by ``vectors`` inside the saturation
    of their rational span; ValueError when the vectors are dependent."""
    vecs = [lattice_vector(vt) for vt in vectors]
    d = len(vecs[0])
    k = len(vecs)
    if k > d:
        raise ValueError("generators not independent")
    columns = [[g[i] for g in vecs] for i in range(d)]
    _, dg, _ = smith_normal_form(columns)
    diag = [dg[i][i] for i in range(k)]
    if any(x == 0 for x in diag):
        raise ValueError("generators not independent")
    return math.prod(diag)


def parallelepiped_points(
    generators: Sequence[Sequence[int]],
) -> list[tuple[LatticeVector, RationalVector]]:
    """All lattice points of the half-open box spanned by the generators.

    For independent generators g_1..g_k this returns every lattice point
    sum(c_i g_i) with 0 <= c_i < 1, paired with its coefficient vector; the
    count equals the index of the generated sublattice in the saturation of
    its span.  The zero point (with zero coefficients) is always included.
    """
    gens = [lattice_vector(g) for g in generators]
    d = len(gens[0])
    k = len(gens)
    if any(len(g) != d for g in gens):
        raise ValueError("generators have mixed dimensions")
    if k > d:
        raise ValueError("generators not independent")
    columns = [[g[i] for g in gens] for i in range(d)]
    u, dg, _ = smith_normal_form(columns)
    diag = [dg[i][i] for i in range(k)]
    if any(x == 0 for x in diag):
        raise ValueError("generators not independent")
    uinv = invert_unimodular(u)

    points: list[tuple[LatticeVector, RationalVector]] = []
    for combo in itertools.product(*(range(x) for x in diag)):
        # coset representative in the saturated span, then reduced into the box
        x = tuple(sum(uinv[i][j] * combo[j] for j in range(k)) for i in range(d))
        coeffs = solve_in_basis(gens, x)
        if coeffs is None:
            raise InvariantViolation("coset representative left the span")
        shifts = [math.floor(c) for c in coeffs]
        frac = tuple(c - s for c, s in zip(coeffs, shifts))
        pt = tuple(x[i] - sum(s * g[i] for s, g in zip(shifts, gens)) for i in range(d))
        points.append((pt, frac))
    if len({pt for pt, _ in points}) != len(points):
        raise InvariantViolation("box enumeration produced a duplicate coset")
    points.sort(key=lambda item: item[0])
    return points
