"""Graded exterior algebra over R^7 and R^8 with the Euclidean metric.

Forms are dense coefficient vectors over basis blades e^I, I a strictly
increasing multi-index, ordered lexicographically.  All operations are
generic over the scalar ring (float / exact rational / polynomial): they
only use +, -, *, and integer signs, except where division is explicit.

Conventions fixed here and shared by every other module:

* blade order: ``itertools.combinations(range(1, n+1), k)`` (lexicographic);
* orientation: vol = e^{1..n}; on R^8 the cylinder coordinate t is axis 1;
* ``hodge``: *(e^I) = sign(I, I^c) e^{I^c} with sign the permutation parity
  of (I, I^c) against (1..n);
* ``sharp2``: g(F#(u), v) = F(u, v), so the matrix of F# is antisymmetric.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .errors import InputError, NumericalError
from .scalars import FLOAT, RATIONAL, ring_of

__all__ = [
    "KForm", "Vector", "Endo", "blades", "blade_index",
    "wedge", "contract", "hodge", "inner", "sharp2", "pullback",
    "flat", "sharp1", "solve_endo", "det_endo",
]


@lru_cache(maxsize=None)
def blades(n: int, k: int) -> tuple:
    """All degree-k basis multi-indices on R^n, lexicographic."""
    return tuple(itertools.combinations(range(1, n + 1), k))


@lru_cache(maxsize=None)
def blade_index(n: int, k: int) -> dict:
    return {b: i for i, b in enumerate(blades(n, k))}


def _perm_parity(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        m = i
        for j in range(i + 1, len(seq)):
            if seq[j] < seq[m]:
                m = j
        if m != i:
            seq[i], seq[m] = seq[m], seq[i]
            sign = -sign
    return sign


@lru_cache(maxsize=None)
def wedge_table(n: int, p: int, q: int) -> tuple:
    """Entries (i, j, out, sign) with e^{I_i} ^ e^{J_j} = sign * e^{K_out}."""
    out_pos = blade_index(n, p + q)
    entries = []
    for i, I in enumerate(blades(n, p)):
        set_i = set(I)
        for j, J in enumerate(blades(n, q)):
            if set_i & set(J):
                continue
            entries.append((i, j, out_pos[tuple(sorted(I + J))], _perm_parity(I + J)))
    return tuple(entries)


@lru_cache(maxsize=None)
def hodge_table(n: int, k: int) -> tuple:
    """Entries (target index, sign) per source blade: *(e^I) = sign e^{I^c}."""
    out_pos = blade_index(n, n - k)
    rows = []
    for I in blades(n, k):
        Ic = tuple(x for x in range(1, n + 1) if x not in I)
        rows.append((out_pos[Ic], _perm_parity(I + Ic)))
    return tuple(rows)


@lru_cache(maxsize=None)
def contract_table(n: int, k: int) -> tuple:
    """Entries (blade, axis, target, sign): i(e_axis) e^I = sign e^{I minus axis}."""
    out_pos = blade_index(n, k - 1)
    entries = []
    for i, I in enumerate(blades(n, k)):
        for t, axis in enumerate(I):
            entries.append((i, axis, out_pos[I[:t] + I[t + 1:]], -1 if t % 2 else 1))
    return tuple(entries)


def _zeros(ring, count):
    return [ring.zero] * count


@dataclass(frozen=True)
class KForm:
    """Degree-k alternating form on R^n; dense blade coefficients."""

    n: int
    k: int
    coeffs: tuple
    ring: object

    def __post_init__(self):
        if self.n not in (7, 8):
            raise InputError(f"dimension must be 7 or 8, got {self.n}")
        if not 0 <= self.k <= self.n:
            raise InputError(f"degree {self.k} out of range for dimension {self.n}")
        expect = len(blades(self.n, self.k))
        if len(self.coeffs) != expect:
            raise InputError(f"need {expect} coefficients for degree {self.k} on R^{self.n}, "
                             f"got {len(self.coeffs)}")

    @staticmethod
    def zero(n: int, k: int, ring=FLOAT) -> "KForm":
        return KForm(n, k, tuple(_zeros(ring, len(blades(n, k)))), ring)

    @staticmethod
    def from_blades(n: int, k: int, data: dict, ring=FLOAT) -> "KForm":
        """Build from {multi-index tuple: coefficient}."""
        pos = blade_index(n, k)
        out = _zeros(ring, len(pos))
        for b, c in data.items():
            b = tuple(b)
            if b not in pos:
                raise InputError(f"{b} is not a degree-{k} blade on R^{n}")
            out[pos[b]] = ring.coerce(c)
        return KForm(n, k, tuple(out), ring)

    @staticmethod
    def from_coeffs(n: int, k: int, coeffs, ring=FLOAT) -> "KForm":
        return KForm(n, k, tuple(ring.coerce(c) for c in coeffs), ring)

    def as_blades(self) -> dict:
        """{multi-index: coefficient} for the nonzero entries."""
        return {b: c for b, c in zip(blades(self.n, self.k), self.coeffs)
                if not self.ring.is_zero(c)}

    def is_zero(self) -> bool:
        return all(self.ring.is_zero(c) for c in self.coeffs)

    # arithmetic within a fixed degree
    def _compat(self, other: "KForm"):
        if self.n != other.n or self.k != other.k:
            raise InputError(f"form mismatch: ({self.n},{self.k}) vs ({other.n},{other.k})")
        if self.ring is not other.ring:
            raise InputError(f"scalar backend mismatch: {self.ring.name} vs {other.ring.name}")

    def __add__(self, other):
        self._compat(other)
        return KForm(self.n, self.k, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)),
                     self.ring)

    def __sub__(self, other):
        self._compat(other)
        return KForm(self.n, self.k, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)),
                     self.ring)

    def __neg__(self):
        return KForm(self.n, self.k, tuple(-c for c in self.coeffs), self.ring)

    def __mul__(self, s):
        return KForm(self.n, self.k, tuple(c * s for c in self.coeffs), self.ring)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return KForm(self.n, self.k, tuple(self.ring.div(c, s) for c in self.coeffs), self.ring)


@dataclass(frozen=True)
class Vector:
    """Tangent vector with n components."""

    n: int
    comps: tuple
    ring: object

    def __post_init__(self):
        if len(self.comps) != self.n:
            raise InputError(f"vector on R^{self.n} needs {self.n} components")

    @staticmethod
    def from_comps(n: int, comps, ring=FLOAT) -> "Vector":
        return Vector(n, tuple(ring.coerce(c) for c in comps), ring)

    @staticmethod
    def basis(n: int, i: int, ring=FLOAT) -> "Vector":
        comps = _zeros(ring, n)
        comps[i - 1] = ring.one
        return Vector(n, tuple(comps), ring)

    def __add__(self, other):
        return Vector(self.n, tuple(a + b for a, b in zip(self.comps, other.comps)), self.ring)

    def __mul__(self, s):
        return Vector(self.n, tuple(c * s for c in self.comps), self.ring)

    __rmul__ = __mul__


@dataclass(frozen=True)
class Endo:
    """Endomorphism of R^n as a row-major matrix: (Av)_i = sum_j mat[i][j] v_j."""

    n: int
    mat: tuple
    ring: object

    @staticmethod
    def identity(n: int, ring=FLOAT) -> "Endo":
        return Endo(n, tuple(tuple(ring.one if i == j else ring.zero for j in range(n))
                             for i in range(n)), ring)

    @staticmethod
    def from_rows(n: int, rows, ring=FLOAT) -> "Endo":
        return Endo(n, tuple(tuple(ring.coerce(c) for c in row) for row in rows), ring)

    def __matmul__(self, other: "Endo") -> "Endo":
        n = self.n
        return Endo(n, tuple(
            tuple(sum((self.mat[i][k] * other.mat[k][j] for k in range(n)),
                      start=self.ring.zero) for j in range(n))
            for i in range(n)), self.ring)

    def __add__(self, other: "Endo") -> "Endo":
        return Endo(self.n, tuple(tuple(a + b for a, b in zip(ra, rb))
                                  for ra, rb in zip(self.mat, other.mat)), self.ring)

    def __sub__(self, other: "Endo") -> "Endo":
        return Endo(self.n, tuple(tuple(a - b for a, b in zip(ra, rb))
                                  for ra, rb in zip(self.mat, other.mat)), self.ring)

    def __neg__(self) -> "Endo":
        return Endo(self.n, tuple(tuple(-a for a in row) for row in self.mat), self.ring)


# ---------------------------------------------------------------------------
# operations


def wedge(a: KForm, b: KForm) -> KForm:
    """Exterior product."""
    if a.n != b.n:
        raise InputError(f"dimension mismatch: {a.n} vs {b.n}")
    if a.ring is not b.ring:
        raise InputError(f"scalar backend mismatch: {a.ring.name} vs {b.ring.name}")
    k = a.k + b.k
    if k > a.n:
        raise InputError(f"wedge degree {k} exceeds dimension {a.n}")
    ring = a.ring
    out = _zeros(ring, len(blades(a.n, k)))
    ca, cb = a.coeffs, b.coeffs
    zero = ring.is_zero
    for i, j, o, s in wedge_table(a.n, a.k, b.k):
        x = ca[i]
        if zero(x):
            continue
        y = cb[j]
        if zero(y):
            continue
        out[o] = out[o] + (x * y if s > 0 else -(x * y))
    return KForm(a.n, k, tuple(out), ring)


def contract(v: Vector, a: KForm) -> KForm:
    """Interior product i(v) a."""
    if a.k == 0:
        raise InputError("cannot contract a 0-form")
    if v.n != a.n:
        raise InputError(f"dimension mismatch: {v.n} vs {a.n}")
    if v.ring is not a.ring:
        raise InputError(f"scalar backend mismatch: {v.ring.name} vs {a.ring.name}")
    ring = a.ring
    out = _zeros(ring, len(blades(a.n, a.k - 1)))
    zero = ring.is_zero
    for i, axis, o, s in contract_table(a.n, a.k):
        c = a.coeffs[i]
        if zero(c):
            continue
        x = v.comps[axis - 1]
        if zero(x):
            continue
        out[o] = out[o] + (x * c if s > 0 else -(x * c))
    return KForm(a.n, a.k - 1, tuple(out), ring)


def hodge(a: KForm) -> KForm:
    """Hodge star for the Euclidean metric, orientation e^{1..n}."""
    out = _zeros(a.ring, len(blades(a.n, a.n - a.k)))
    for c, (o, s) in zip(a.coeffs, hodge_table(a.n, a.k)):
        out[o] = c if s > 0 else -c
    return KForm(a.n, a.n - a.k, tuple(out), a.ring)


def inner(a: KForm, b: KForm) -> object:
    """Metric pairing <a, b>, normalized so orthonormal blades have norm 1."""
    if a.n != b.n or a.k != b.k:
        raise InputError(f"inner product needs matching forms: "
                         f"({a.n},{a.k}) vs ({b.n},{b.k})")
    if a.ring is not b.ring:
        raise InputError(f"scalar backend mismatch: {a.ring.name} vs {b.ring.name}")
    return sum((x * y for x, y in zip(a.coeffs, b.coeffs)), start=a.ring.zero)


def sharp2(F: KForm) -> Endo:
    """The endomorphism F# with g(F#(u), v) = F(u, v); antisymmetric matrix."""
    if F.k != 2:
        raise InputError("sharp2 requires a 2-form")
    n, ring = F.n, F.ring
    mat = [[ring.zero] * n for _ in range(n)]
    for (i, j), c in zip(blades(n, 2), F.coeffs):
        # g(F#(e_i), e_j) = F(e_i, e_j) = c  => row j, column i picks up +c
        mat[j - 1][i - 1] = mat[j - 1][i - 1] + c
        mat[i - 1][j - 1] = mat[i - 1][j - 1] - c
    return Endo(n, tuple(tuple(row) for row in mat), ring)


@lru_cache(maxsize=None)
def _minor_columns(n: int, k: int) -> tuple:
    return blades(n, k)


def pullback(A: Endo, a: KForm) -> KForm:
    """(A* a)(v_1..v_k) = a(A v_1, .., A v_k).

    Coefficientwise: (A* a)_J = sum_I a_I det(A[I rows, J cols]).
    """
    if A.n != a.n:
        raise InputError(f"dimension mismatch: {A.n} vs {a.n}")
    if A.ring is not a.ring:
        raise InputError(f"scalar backend mismatch: {A.ring.name} vs {a.ring.name}")
    k, n, ring = a.k, a.n, a.ring
    if k == 0:
        return a
    if k == 1:
        out = [sum((a.coeffs[i] * A.mat[i][j] for i in range(n)), start=ring.zero)
               for j in range(n)]
        return KForm(n, 1, tuple(out), ring)
    zero = ring.is_zero
    bl = blades(n, k)
    out = _zeros(ring, len(bl))
    nonzero = [(I, c) for I, c in zip(bl, a.coeffs) if not zero(c)]
    for jidx, J in enumerate(bl):
        cols = [j - 1 for j in J]
        acc = ring.zero
        for I, c in nonzero:
            sub = [[A.mat[i - 1][j] for j in cols] for i in I]
            acc = acc + c * _det_rows(sub, ring)
        out[jidx] = acc
    return KForm(n, k, tuple(out), ring)


def _det_rows(rows, ring):
    """Determinant by cofactor expansion over the first column; fine at k <= 7."""
    m = len(rows)
    if m == 1:
        return rows[0][0]
    if m == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    zero = ring.is_zero
    acc = ring.zero
    for r in range(m):
        c = rows[r][0]
        if zero(c):
            continue
        minor = [row[1:] for i, row in enumerate(rows) if i != r]
        term = c * _det_rows(minor, ring)
        acc = acc + (term if r % 2 == 0 else -term)
    return acc


def det_endo(A: Endo):
    """Exact determinant of the matrix of A (any backend)."""
    return _det_rows([list(row) for row in A.mat], A.ring)


def flat(v: Vector) -> KForm:
    """v -> g(v, .); components copy over in the orthonormal frame."""
    return KForm(v.n, 1, v.comps, v.ring)


def sharp1(b: KForm) -> Vector:
    """Inverse of flat on 1-forms."""
    if b.k != 1:
        raise InputError("sharp1 requires a 1-form")
    return Vector(b.n, b.coeffs, b.ring)


def solve_endo(A: Endo, b: KForm) -> KForm:
    """Return ((A)^{-1})* b, i.e. the 1-form x with pullback(A, x) = b.

    Since (A* x)_j = sum_i x_i A_ij, this solves A^T-style equations:
    componentwise  sum_i x_i A[i][j] = b_j.
    """
    if b.k != 1:
        raise InputError("solve_endo requires a 1-form right-hand side")
    if A.n != b.n:
        raise InputError(f"dimension mismatch: {A.n} vs {b.n}")
    n, ring = A.n, A.ring
    if ring is FLOAT:
        import numpy as np

        M = np.array([[float(A.mat[i][j]) for i in range(n)] for j in range(n)])
        rhs = np.array([float(c) for c in b.coeffs])
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > 1e14:
            raise NumericalError(f"singular endomorphism in solve_endo (cond ~ {cond:.3e})")
        x = np.linalg.solve(M, rhs)
        return KForm(n, 1, tuple(float(v) for v in x), ring)
    if ring is RATIONAL:
        # exact Gaussian elimination on the transposed system
        M = [[A.mat[i][j] for i in range(n)] + [b.coeffs[j]] for j in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if not ring.is_zero(M[r][col])), None)
            if piv is None:
                raise NumericalError("singular endomorphism in solve_endo (exact rank deficiency)")
            M[col], M[piv] = M[piv], M[col]
            inv = M[col][col]
            for r in range(n):
                if r == col:
                    continue
                f = ring.div(M[r][col], inv)
                if ring.is_zero(f):
                    continue
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
        x = [ring.div(M[i][n], M[i][i]) for i in range(n)]
        return KForm(n, 1, tuple(x), ring)
    raise InputError("solve_endo supports float and rational backends only")
