"""Action of twist words on H_1 of a closed genus-g surface.

Conventions (all tests are written relative to these):

* basis e_1..e_2g with form J = [[0, I], [-I, 0]], so <e_i, e_{g+i}> = +1;
* the Dehn twist about a curve of class c acts as T_c(x) = x + <x, c> c;
* a word (c_1, n_1)(c_2, n_2)... evaluates to T_{c_1}^{n_1} T_{c_2}^{n_2} ...,
  i.e. composition with the rightmost letter applied first.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .groups import GroupOracle
from .linalg import IntMatrix, integral_kernel
from .topology import Window

Vector = tuple[int, ...]


def form_matrix(genus: int) -> IntMatrix:
    n = 2 * genus
    rows = [[0] * n for _ in range(n)]
    for i in range(genus):
        rows[i][genus + i] = 1
        rows[genus + i][i] = -1
    return IntMatrix(rows)


def pairing(x: Sequence[int], y: Sequence[int]) -> int:
    """Algebraic intersection <x, y> = x^T J y."""
    g = len(x) // 2
    if len(x) != len(y) or len(x) != 2 * g:
        raise ValueError("classes must have the same even length")
    return sum(x[i] * y[g + i] - x[g + i] * y[i] for i in range(g))


def is_primitive(c: Sequence[int]) -> bool:
    return math.gcd(*c) == 1


def normalize_class(c: Sequence[int]) -> Vector:
    """Representative of +-c whose first nonzero entry is positive."""
    c = tuple(int(x) for x in c)
    lead = next((x for x in c if x), 0)
    return tuple(-x for x in c) if lead < 0 else c


def unit(genus: int, i: int) -> Vector:
    """e_i, 1-based as in the module docstring."""
    return tuple(int(j == i - 1) for j in range(2 * genus))


class SymplecticMap:
    __slots__ = ("matrix", "genus")

    def __init__(self, matrix: IntMatrix | Sequence[Sequence[int]], check: bool = True):
        m = matrix if isinstance(matrix, IntMatrix) else IntMatrix(matrix)
        if not m.is_square or m.rows % 2:
            raise ValueError("symplectic map needs an even square matrix")
        self.matrix = m
        self.genus = m.rows // 2
        if check:
            J = form_matrix(self.genus)
            if m.T @ J @ m != J:
                raise ValueError("matrix does not preserve the symplectic form")

    @classmethod
    def identity(cls, genus: int) -> SymplecticMap:
        return cls(IntMatrix.identity(2 * genus), check=False)

    def __matmul__(self, other: SymplecticMap) -> SymplecticMap:
        return SymplecticMap(self.matrix @ other.matrix, check=False)

    def __call__(self, x: Sequence[int]) -> Vector:
        return self.matrix.apply(x)

    def inverse(self) -> SymplecticMap:
        # M^-1 = J^-1 M^T J = -J M^T J
        J = form_matrix(self.genus)
        return SymplecticMap(-(J @ self.matrix.T @ J), check=False)

    def __pow__(self, n: int) -> SymplecticMap:
        base = self if n >= 0 else self.inverse()
        out = SymplecticMap.identity(self.genus)
        for _ in range(abs(n)):
            out = out @ base
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SymplecticMap) and self.matrix == other.matrix

    def __hash__(self) -> int:
        return hash(self.matrix)

    def __repr__(self) -> str:
        return f"SymplecticMap({self.matrix.tolist()})"

    def is_symplectic(self) -> bool:
        J = form_matrix(self.genus)
        return self.matrix.T @ J @ self.matrix == J


def transvection(c: Sequence[int], n: int = 1) -> SymplecticMap:
    """T_c^n : x -> x + n <x, c> c."""
    c = tuple(int(x) for x in c)
    if any(c) and not is_primitive(c):
        raise ValueError(f"{c} is not primitive; a simple closed curve has primitive class")
    dim = len(c)
    g = dim // 2
    # <x, c> = sum_j x_j (Jc)_j
    Jc = [c[g + j] for j in range(g)] + [-c[j] for j in range(g)]
    rows = [[int(i == j) + n * c[i] * Jc[j] for j in range(dim)] for i in range(dim)]
    return SymplecticMap(IntMatrix(rows), check=False)


@dataclass(frozen=True)
class TwistWord:
    genus: int
    letters: tuple[tuple[Vector, int], ...] = ()

    def __post_init__(self):
        for c, _ in self.letters:
            if len(c) != 2 * self.genus:
                raise ValueError("class length does not match genus")
            if not is_primitive(c):
                raise ValueError(f"{c} is not primitive")

    @classmethod
    def of(cls, genus: int, letters: Iterable[tuple[Sequence[int], int]]) -> TwistWord:
        return cls(genus, tuple((tuple(int(x) for x in c), int(n)) for c, n in letters))

    def __mul__(self, other: TwistWord) -> TwistWord:
        return TwistWord(self.genus, self.letters + other.letters)

    def inverse(self) -> TwistWord:
        return TwistWord(self.genus, tuple((c, -n) for c, n in reversed(self.letters)))

    def reduced(self) -> TwistWord:
        """Merge neighbouring letters about the same curve class, drop zero powers."""
        out: list[list] = []
        for c, n in self.letters:
            c = normalize_class(c)
            if out and out[-1][0] == c:
                out[-1][1] += n
                if out[-1][1] == 0:
                    out.pop()
            elif n:
                out.append([c, n])
        return TwistWord(self.genus, tuple((c, n) for c, n in out))

    def to_json(self) -> str:
        return json.dumps([{"class": list(c), "power": n} for c, n in self.letters])

    @classmethod
    def from_json(cls, text: str | list, genus: int | None = None) -> TwistWord:
        data = json.loads(text) if isinstance(text, str) else text
        if genus is None:
            if not data:
                raise ValueError("genus required for an empty word")
            genus = len(data[0]["class"]) // 2
        return cls.of(genus, ((d["class"], d["power"]) for d in data))


def word_to_matrix(w: TwistWord) -> SymplecticMap:
    out = SymplecticMap.identity(w.genus)
    for c, n in w.letters:
        out = out @ transvection(c, n)
    return out


def chain_curve_classes(genus: int) -> list[Vector]:
    """Classes of a chain c_1, ..., c_{2g+1}.

    Even positions are b_k = e_{g+k}; odd positions are e_1, e_k - e_{k+1}, e_g.
    Consecutive classes pair to +-1, all others to 0.
    """
    if genus < 1:
        raise ValueError("genus must be >= 1")
    g = genus

    def e(i):
        return unit(g, i)

    odd = [e(1)] + [tuple(a - b for a, b in zip(e(k), e(k + 1))) for k in range(1, g)] + [e(g)]
    out: list[Vector] = []
    for k in range(g):
        out.append(odd[k])
        out.append(e(g + k + 1))
    out.append(odd[g])
    return out


def fixed_classes(M: SymplecticMap) -> list[Vector]:
    """Lattice basis of the classes fixed by M; empty means none are."""
    return integral_kernel(M.matrix - IntMatrix.identity(M.matrix.rows))


# -- spectral radius ----------------------------------------------------------

def charpoly(A: IntMatrix) -> list[int]:
    """Characteristic polynomial det(xI - A), coefficients from the leading term down.

    Faddeev-LeVerrier; every division is exact over the integers.
    """
    n = A.rows
    coeffs = [1]
    Mk = IntMatrix.zeros(n, n)
    I = IntMatrix.identity(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + I.scale(coeffs[-1])
        AM = A @ Mk
        tr = sum(AM[i, i] for i in range(n))
        assert tr % k == 0
        coeffs.append(-tr // k)
    return coeffs


def _poly_divmod(a: list[Fraction], b: list[Fraction]):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    while len(a) >= len(b) and any(a):
        f = a[0] / b[0]
        k = len(a) - len(b)
        q[len(q) - 1 - k] = f
        for i, y in enumerate(b):
            a[i] -= f * y
        a.pop(0)
    return q, a


def _strip(p):
    i = 0
    while i < len(p) - 1 and p[i] == 0:
        i += 1
    return p[i:]


def squarefree_part(p: Sequence[int]) -> list[int]:
    """p / gcd(p, p'), scaled to a primitive integer polynomial."""
    P = [Fraction(x) for x in _strip(list(p))]
    n = len(P) - 1
    if n < 1:
        return [int(x) for x in P]
    dP = [P[i] * (n - i) for i in range(n)]
    a, b = P, _strip(dP)
    while any(b):
        _, r = _poly_divmod(a, b)
        a, b = b, _strip(r) if r else [Fraction(0)]
    q, _ = _poly_divmod(P, a)
    den = math.lcm(*(x.denominator for x in q))
    ints = [int(x * den) for x in q]
    g = math.gcd(*ints) * (1 if ints[0] > 0 else -1)
    return [x // g for x in ints]


def spectral_radius_enclosure(M: SymplecticMap | IntMatrix, width: float = 1e-9):
    """Interval ``(lo, hi)`` of mpf values containing the spectral radius.

    Roots of the square-free characteristic polynomial are approximated with
    mpmath, then each approximation z_i gets the inclusion radius
    deg * |Q(z_i) / (lc * prod_{j != i}(z_i - z_j))|.  When these disks are
    pairwise disjoint each holds exactly one root.
    """
    A = M.matrix if isinstance(M, SymplecticMap) else M
    Q = squarefree_part(charpoly(A))
    d = len(Q) - 1
    dps = 50
    while dps <= 800:
        with mpmath.workdps(dps):
            roots = mpmath.polyroots(Q, maxsteps=400, extraprec=4 * dps)
            slack = mpmath.mpf(10) ** (-(dps - 10))
            radii = []
            for i, z in enumerate(roots):
                den = mpmath.mpf(Q[0])
                for j, y in enumerate(roots):
                    if j != i:
                        den *= z - y
                radii.append(d * abs(mpmath.polyval(Q, z) / den) + slack)
            disjoint = all(
                abs(roots[i] - roots[j]) > radii[i] + radii[j]
                for i in range(d)
                for j in range(i + 1, d)
            )
            lo = max(abs(z) - r for z, r in zip(roots, radii))
            hi = max(abs(z) + r for z, r in zip(roots, radii))
            if disjoint and hi - lo <= width:
                return lo, hi
        dps *= 2
    raise ArithmeticError("could not certify the spectral radius")


def stretch_lower_bound(M: SymplecticMap) -> float:
    """Spectral radius of the homology action, a lower bound for the stretch factor.

    det M = 1, so the spectral radius is at least 1.
    """
    lo, hi = spectral_radius_enclosure(M)
    return max(1.0, float((lo + hi) / 2))


# -- scans ----------------------------------------------------------------

@dataclass
class FixedClassScan:
    window: Window
    ranks: dict[int, int]  # n -> rank of the fixed lattice of f T_c^n

    @property
    def exceptional(self) -> list[int]:
        return sorted(n for n, r in self.ranks.items() if r > 0)

    @property
    def confined(self) -> bool:
        """All exceptional n lie in the inner window."""
        return all(self.window.in_inner(n) for n in self.exceptional)

    def to_dict(self) -> dict:
        return {
            "rows": [{"n": n, "fixed_rank": r} for n, r in sorted(self.ranks.items())],
            "exceptional": self.exceptional,
            "confined_to_inner_window": self.confined,
        }


def fixed_class_coset_scan(f: TwistWord, c: Sequence[int], w: Window) -> FixedClassScan:
    vals = w.values()
    ranks: dict[int, int] = {}
    if not vals:
        return FixedClassScan(w, ranks)
    base = word_to_matrix(f)
    T, Tinv = transvection(c), transvection(c, -1)
    ranks[0] = len(fixed_classes(base))
    for step, sign, stop in ((T, 1, vals.stop - 1), (Tinv, -1, -vals.start)):
        cur = base
        for k in range(1, stop + 1):
            cur = cur @ step
            ranks[sign * k] = len(fixed_classes(cur))
    return FixedClassScan(w, ranks)


# -- group oracles for the word-level morphism ---------------------------------

def symplectic_group(genus: int) -> GroupOracle:
    return GroupOracle(
        name=f"Sp({2 * genus},Z)",
        multiply=lambda a, b: a @ b,
        invert=lambda a: a.inverse(),
        identity=SymplecticMap.identity(genus),
        dump=lambda m: m.matrix.tolist(),
    )


def twist_word_group(genus: int) -> GroupOracle:
    """Free group on curve classes; reduced twist words are the canonical forms."""
    return GroupOracle(
        name=f"TwistWords(g={genus})",
        multiply=lambda a, b: (a * b).reduced(),
        invert=lambda a: a.inverse(),
        identity=TwistWord(genus),
        canonical=lambda a: a.reduced(),
        dump=lambda w: json.loads(w.to_json()),
    )
