"""Exact integer linear algebra.

Everything here works on Python ints, so there is no overflow and no
rounding.  Matrices are small (at most a few dozen rows) and immutable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    k = 3
    while k * k <= p:
        if p % k == 0:
            return False
        k += 2
    return True


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


class IntMatrix:
    """Immutable dense matrix of arbitrary-precision integers."""

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, data: Iterable[Iterable[int]]):
        rows = tuple(tuple(int(x) for x in row) for row in data)
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and one column")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix literal")
        self._data = rows
        self.rows = len(rows)
        self.cols = width

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls([[0] * cols for _ in range(rows)])

    @classmethod
    def diag(cls, entries: Sequence[int]) -> IntMatrix:
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_json(cls, text: str) -> IntMatrix:
        return cls(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.tolist())

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self._data]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def row(self, i: int) -> tuple[int, ...]:
        return self._data[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self._data)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self._data[i][j]

    def __iter__(self):
        return iter(self._data)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self._data == other._data

    def __hash__(self) -> int:
        return hash(self._data)

    def __repr__(self) -> str:
        return f"IntMatrix({self.tolist()})"

    @property
    def T(self) -> IntMatrix:
        return IntMatrix(zip(*self._data))

    def __add__(self, other: IntMatrix) -> IntMatrix:
        self._check_same_shape(other)
        return IntMatrix(
            [a + b for a, b in zip(ra, rb)] for ra, rb in zip(self._data, other._data)
        )

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        self._check_same_shape(other)
        return IntMatrix(
            [a - b for a, b in zip(ra, rb)] for ra, rb in zip(self._data, other._data)
        )

    def __neg__(self) -> IntMatrix:
        return IntMatrix([-a for a in r] for r in self._data)

    def scale(self, k: int) -> IntMatrix:
        return IntMatrix([k * a for a in r] for r in self._data)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = list(zip(*other._data))
        return IntMatrix(
            [sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._data
        )

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix-vector product ``self @ v`` on a plain integer sequence."""
        if len(v) != self.cols:
            raise ValueError("vector length does not match column count")
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self._data)

    def mod(self, p: int) -> IntMatrix:
        return IntMatrix([a % p for a in r] for r in self._data)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def _check_same_shape(self, other: IntMatrix) -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")


@dataclass(frozen=True)
class SmithForm:
    """``U @ A @ V == diag(d)`` (padded to the shape of A)."""

    d: tuple[int, ...]
    U: IntMatrix
    V: IntMatrix
    rank: int

    def diagonal_matrix(self, rows: int, cols: int) -> IntMatrix:
        return IntMatrix(
            [self.d[i] if i == j and i < len(self.d) else 0 for j in range(cols)]
            for i in range(rows)
        )

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(x for x in self.d[: self.rank] if x > 1)


def _bareiss(a: list[list[int]]) -> tuple[int, int]:
    """Fraction-free elimination in place.  Returns (rank, sign of the row permutation)."""
    m, n = len(a), len(a[0])
    sign = 1
    prev = 1
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[r], a[piv] = a[piv], a[r]
            sign = -sign
        p = a[r][c]
        for i in range(r + 1, m):
            f = a[i][c]
            row_i, row_r = a[i], a[r]
            for j in range(c + 1, n):
                # exact by Sylvester's identity
                row_i[j] = (p * row_i[j] - f * row_r[j]) // prev
            row_i[c] = 0
        prev = p
        r += 1
    return r, sign


def determinant(A: IntMatrix) -> int:
    if not A.is_square:
        raise ValueError("determinant of a non-square matrix")
    a = A.tolist()
    n = A.rows
    rank, sign = _bareiss(a)
    if rank < n:
        return 0
    return sign * a[n - 1][n - 1]


def rank(A: IntMatrix) -> int:
    """Rank over the rationals."""
    return _bareiss(A.tolist())[0]


def rank_mod_p(A: IntMatrix, p: int) -> int:
    _require_prime(p)
    a = [[x % p for x in r] for r in A]
    m, n = A.rows, A.cols
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [(x * inv) % p for x in a[r]]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
    return r


def _argmin_nonzero(a, t, m, n):
    best = None
    for i in range(t, m):
        for j in range(t, n):
            x = a[i][j]
            if x and (best is None or abs(x) < best[0]):
                best = (abs(x), i, j)
                if best[0] == 1:
                    return best
    return best


def smith_normal_form(A: IntMatrix) -> SmithForm:
    """Smith normal form with explicit unimodular transforms.

    Pivots are chosen by minimal absolute value, then the pivot row and
    column are cleared by Euclidean steps.  A divisibility defect in the
    trailing block is repaired by folding the offending row into the pivot
    row, which strictly lowers the pivot.
    """
    m, n = A.rows, A.cols
    a = A.tolist()
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, k):
        a[i], a[k] = a[k], a[i]
        U[i], U[k] = U[k], U[i]

    def swap_cols(j, k):
        for r in a:
            r[j], r[k] = r[k], r[j]
        for r in V:
            r[j], r[k] = r[k], r[j]

    def add_row(dst, src, q):
        # row_dst -= q * row_src
        a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
        U[dst] = [x - q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for r in a:
            r[dst] -= q * r[src]
        for r in V:
            r[dst] -= q * r[src]

    for t in range(min(m, n)):
        best = _argmin_nonzero(a, t, m, n)
        if best is None:
            break
        _, i0, j0 = best
        swap_rows(t, i0)
        swap_cols(t, j0)
        while True:
            dirty = False
            for i in range(t + 1, m):
                if a[i][t]:
                    add_row(i, t, a[i][t] // a[t][t])
                    if a[i][t]:
                        dirty = True
            for j in range(t + 1, n):
                if a[t][j]:
                    add_col(j, t, a[t][j] // a[t][t])
                    if a[t][j]:
                        dirty = True
            if dirty:
                best = _argmin_nonzero_cross(a, t, m, n)
                if best[1] != t:
                    swap_rows(t, best[1])
                if best[2] != t:
                    swap_cols(t, best[2])
                continue
            piv = a[t][t]
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, -1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            U[t] = [-x for x in U[t]]

    d = tuple(a[i][i] for i in range(min(m, n)))
    r = sum(1 for x in d if x)
    return SmithForm(d=d, U=IntMatrix(U), V=IntMatrix(V), rank=r)


def _argmin_nonzero_cross(a, t, m, n):
    """Smallest nonzero entry in row t / column t (from the pivot on)."""
    cands = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
    cands += [(abs(a[t][j]), t, j) for j in range(t + 1, n) if a[t][j]]
    return min(cands)


def integral_kernel(A: IntMatrix) -> list[tuple[int, ...]]:
    """Lattice basis of ``{x in Z^cols : A x = 0}``.

    The trailing columns of the Smith transform V span the kernel because
    V is unimodular and the corresponding diagonal entries vanish.
    """
    snf = smith_normal_form(A)
    return [snf.V.col(j) for j in range(snf.rank, A.cols)]


def abs_det_from_smith(snf: SmithForm) -> int:
    out = 1
    for x in snf.d:
        out *= x
    return out
