"""Homology of 3-manifolds given by genus-g Heegaard splittings.

``N_f`` is presented by the 2g x 2g matrix whose rows are the disk classes of
both handlebodies, transported into a common frame by the gluing map M:

* ``pullback`` frame: rows M^-1 a_1..M^-1 a_g, then b_1..b_g;
* ``pushforward`` frame: rows a_1..a_g, then M b_1..M b_g.

The two differ by right multiplication with M^T (determinant 1), so all
invariants agree.  Right composition f -> f T_c^n only moves the first g rows
in the pullback frame; left composition f -> T_c^n f only moves the last g
rows in the pushforward frame.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .homology import (
    SymplecticMap,
    TwistWord,
    Vector,
    is_primitive,
    pairing,
    transvection,
    unit,
    word_to_matrix,
)
from .linalg import IntMatrix, determinant, rank, rank_mod_p, smith_normal_form, is_prime
from .rng import SplitMix64
from .topology import Window

PULLBACK = "pullback"
PUSHFORWARD = "pushforward"
RIGHT = "right"
LEFT = "left"

FRAME_FOR_SIDE = {RIGHT: PULLBACK, LEFT: PUSHFORWARD}


@dataclass(frozen=True)
class DiskSystem:
    classes: tuple[Vector, ...]

    def __post_init__(self):
        cs = self.classes
        g = len(cs)
        if g == 0 or any(len(c) != 2 * g for c in cs):
            raise ValueError("a genus-g disk system has g classes of length 2g")
        if not all(is_primitive(c) for c in cs):
            raise ValueError("disk classes must be primitive")
        if any(pairing(a, b) for a in cs for b in cs):
            raise ValueError("disk classes must be pairwise orthogonal")
        if rank(IntMatrix(cs)) != g:
            raise ValueError("disk classes must be linearly independent")

    @classmethod
    def of(cls, classes) -> DiskSystem:
        return cls(tuple(tuple(int(x) for x in c) for c in classes))

    @property
    def genus(self) -> int:
        return len(self.classes)


def standard_a_system(genus: int) -> DiskSystem:
    return DiskSystem(tuple(unit(genus, i) for i in range(1, genus + 1)))


def standard_b_system(genus: int) -> DiskSystem:
    return DiskSystem(tuple(unit(genus, genus + i) for i in range(1, genus + 1)))


@dataclass(frozen=True)
class HeegaardData:
    genus: int
    a_system: DiskSystem
    b_system: DiskSystem
    gluing: SymplecticMap
    gluing_word: Optional[TwistWord] = field(default=None, compare=False)

    def __post_init__(self):
        if self.a_system.genus != self.genus or self.b_system.genus != self.genus:
            raise ValueError("disk systems do not match the genus")
        if self.gluing.genus != self.genus or not self.gluing.is_symplectic():
            raise ValueError("gluing must be a symplectic map of the right genus")

    @classmethod
    def from_word(
        cls,
        word: TwistWord,
        a_system: Optional[DiskSystem] = None,
        b_system: Optional[DiskSystem] = None,
    ) -> HeegaardData:
        g = word.genus
        return cls(
            g,
            a_system or standard_a_system(g),
            b_system or standard_b_system(g),
            word_to_matrix(word),
            word,
        )

    def compose(self, c: Sequence[int], n: int, side: str = RIGHT) -> HeegaardData:
        """Gluing f T_c^n (right) or T_c^n f (left), rebuilt from scratch."""
        T = transvection(c, n)
        M = self.gluing @ T if side == RIGHT else T @ self.gluing
        word = None
        if self.gluing_word is not None:
            letter = TwistWord.of(self.genus, [(c, n)])
            word = self.gluing_word * letter if side == RIGHT else letter * self.gluing_word
        return HeegaardData(self.genus, self.a_system, self.b_system, M, word)

    def to_dict(self) -> dict:
        d = {
            "genus": self.genus,
            "a_system": [list(c) for c in self.a_system.classes],
            "b_system": [list(c) for c in self.b_system.classes],
        }
        if self.gluing_word is not None:
            d["gluing_word"] = json.loads(self.gluing_word.to_json())
        else:
            d["gluing_matrix"] = self.gluing.matrix.tolist()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> HeegaardData:
        g = int(d["genus"])
        a = DiskSystem.of(d["a_system"]) if "a_system" in d else standard_a_system(g)
        b = DiskSystem.of(d["b_system"]) if "b_system" in d else standard_b_system(g)
        if "gluing_matrix" in d:
            return cls(g, a, b, SymplecticMap(d["gluing_matrix"]))
        word = TwistWord.from_json(d.get("gluing_word", []), genus=g)
        return cls.from_word(word, a, b)

    @classmethod
    def from_json(cls, text: str) -> HeegaardData:
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class PresentationMatrix:
    matrix: IntMatrix
    genus: int
    frame: str = PULLBACK


def presentation_matrix(h: HeegaardData, frame: str = PULLBACK) -> PresentationMatrix:
    M = h.gluing
    if frame == PULLBACK:
        Minv = M.inverse()
        rows = [Minv(a) for a in h.a_system.classes] + list(h.b_system.classes)
    elif frame == PUSHFORWARD:
        rows = list(h.a_system.classes) + [M(b) for b in h.b_system.classes]
    else:
        raise ValueError(f"unknown frame {frame!r}")
    return PresentationMatrix(IntMatrix(rows), h.genus, frame)


@dataclass(frozen=True)
class HomologyInvariants:
    b1: int
    torsion: tuple[int, ...]
    order: Optional[int]  # None when H_1 is infinite

    def to_dict(self) -> dict:
        return {
            "b1": self.b1,
            "torsion": list(self.torsion),
            "order": self.order if self.order is not None else "infinite",
        }


def invariants(A: PresentationMatrix) -> HomologyInvariants:
    snf = smith_normal_form(A.matrix)
    b1 = A.matrix.cols - snf.rank
    det = determinant(A.matrix)
    if det:
        assert math.prod(snf.d) == abs(det)
    return HomologyInvariants(b1, snf.torsion, abs(det) if det else None)


def b1_mod_p(A: PresentationMatrix, p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return A.matrix.cols - rank_mod_p(A.matrix, p)


def twist_update(A: PresentationMatrix, c: Sequence[int], n: int, side: str = RIGHT) -> PresentationMatrix:
    """Presentation of f T_c^n (right) or T_c^n f (left) from that of f.

    Right: in the pullback frame row i <= g becomes r - n <r, c> c.
    Left: in the pushforward frame row g + i becomes r + n <r, c> c.
    """
    c = tuple(int(x) for x in c)
    if not is_primitive(c):
        raise ValueError(f"{c} is not primitive")
    if A.frame != FRAME_FOR_SIDE[side]:
        raise ValueError(f"{side} updates live in the {FRAME_FOR_SIDE[side]} frame")
    g = A.genus
    rows = [list(r) for r in A.matrix]
    idx, sign = (range(g), -1) if side == RIGHT else (range(g, 2 * g), 1)
    for i in idx:
        k = sign * n * pairing(rows[i], c)
        if k:
            rows[i] = [x + k * y for x, y in zip(rows[i], c)]
    return PresentationMatrix(IntMatrix(rows), g, A.frame)


# -- determinant as a polynomial in n ------------------------------------------

@dataclass(frozen=True)
class IntPolynomial:
    coeffs: tuple[int, ...]  # constant term first, no trailing zeros

    @classmethod
    def of(cls, coeffs: Sequence[int]) -> IntPolynomial:
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        return cls(tuple(cs))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __call__(self, n: int) -> int:
        out = 0
        for a in reversed(self.coeffs):
            out = out * n + a
        return out

    def integer_roots(self) -> list[int]:
        """All integer roots; ValueError for the zero polynomial."""
        if self.is_zero:
            raise ValueError("every integer is a root of the zero polynomial")
        cs = self.coeffs
        shift = next(i for i, a in enumerate(cs) if a)
        roots = {0} if shift else set()
        low = abs(cs[shift])
        for d in _divisors(low):
            for r in (d, -d):
                if self(r) == 0:
                    roots.add(r)
        return sorted(roots)


def _divisors(n: int) -> list[int]:
    out = []
    k = 1
    while k * k <= n:
        if n % k == 0:
            out.extend((k, n // k))
        k += 1
    return out


def det_polynomial(h: HeegaardData, c: Sequence[int], side: str = RIGHT) -> IntPolynomial:
    """det of the presentation of f T_c^n (or T_c^n f) as an exact polynomial in n.

    Interpolated from the g + 1 values at n = 0..g.
    """
    P0 = presentation_matrix(h, FRAME_FOR_SIDE[side])
    xs = list(range(h.genus + 1))
    ys = [determinant(twist_update(P0, c, n, side).matrix) for n in xs]
    coeffs = [Fraction(0)] * len(xs)
    for i, xi in enumerate(xs):
        # Lagrange basis polynomial, built up by multiplying linear factors
        basis = [Fraction(1)]
        den = 1
        for j, xj in enumerate(xs):
            if j == i:
                continue
            basis = [Fraction(0)] + basis
            for k in range(len(basis) - 1):
                basis[k] -= xj * basis[k + 1]
            den *= xi - xj
        for k, b in enumerate(basis):
            coeffs[k] += ys[i] * b / den
    if any(x.denominator != 1 for x in coeffs):
        raise ArithmeticError("interpolated determinant is not an integer polynomial")
    return IntPolynomial.of([int(x) for x in coeffs])


# -- coset scans ---------------------------------------------------------------

@dataclass
class ScanRow:
    n: int
    det: int
    b1: int
    torsion: tuple[int, ...]
    b1_mod: dict[int, int]


@dataclass
class ScanReport:
    window: Window
    primes: tuple[int, ...]
    side: str
    rows: list[ScanRow]
    polynomial: Optional[IntPolynomial] = None
    zero_set: list[int] = field(default_factory=list)
    constant_zero: bool = False
    growth_threshold: Optional[int] = None
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {
            "side": self.side,
            "window": {"N": self.window.N, "rho": self.window.rho},
            "primes": list(self.primes),
            "det_polynomial": list(self.polynomial.coeffs) if self.polynomial else None,
            "constant_zero": self.constant_zero,
            "zero_set": self.zero_set,
            "growth_threshold": self.growth_threshold,
            "checks": self.checks,
            "rows": [
                {
                    "n": r.n,
                    "det": r.det,
                    "b1_Z": r.b1,
                    "torsion": list(r.torsion),
                    "b1_F": {str(p): v for p, v in r.b1_mod.items()},
                }
                for r in self.rows
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "det", "b1_Z", "torsion"] + [f"b1_F{p}" for p in self.primes])
        for r in self.rows:
            w.writerow(
                [r.n, r.det, r.b1, " ".join(map(str, r.torsion))] + [r.b1_mod[p] for p in self.primes]
            )
        return buf.getvalue()


def _scan_matrices(P0: PresentationMatrix, c, w: Window, side: str) -> dict[int, PresentationMatrix]:
    vals = w.values()
    if not vals:
        return {}
    out = {0: P0}
    for step, sign, stop in ((1, 1, vals.stop - 1), (-1, -1, -vals.start)):
        cur = P0
        for k in range(1, stop + 1):
            cur = twist_update(cur, c, step, side)
            out[sign * k] = cur
    return out


def coset_scan(
    h: HeegaardData,
    c: Sequence[int],
    w: Window,
    primes: Sequence[int] = (2, 3, 5),
    side: str = RIGHT,
) -> ScanReport:
    primes = tuple(primes)
    for p in primes:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
    P0 = presentation_matrix(h, FRAME_FOR_SIDE[side])
    mats = _scan_matrices(P0, c, w, side)
    report = ScanReport(w, primes, side, rows=[])
    if not mats:
        return report

    consistent = True
    for n in sorted(mats):
        A = mats[n].matrix
        snf = smith_normal_form(A)
        det = determinant(A)
        b1 = A.cols - snf.rank
        row = ScanRow(n, det, b1, snf.torsion, {p: A.cols - rank_mod_p(A, p) for p in primes})
        if b1 == 0 and math.prod(snf.d) != abs(det):
            consistent = False
        if (det == 0) != (b1 > 0):
            consistent = False
        report.rows.append(row)
    dets = {r.n: r.det for r in report.rows}

    poly = det_polynomial(h, c, side)
    report.polynomial = poly
    report.zero_set = sorted(n for n, d in dets.items() if d == 0)
    report.constant_zero = poly.is_zero
    report.checks["consistent"] = consistent
    report.checks["polynomial_matches"] = all(poly(n) == d for n, d in dets.items())
    report.checks["degree_bound"] = poly.degree <= h.genus
    if poly.is_zero:
        report.checks["zero_set_is_roots"] = report.zero_set == sorted(dets)
    else:
        roots = [r for r in poly.integer_roots() if r in dets]
        report.checks["zero_set_is_roots"] = report.zero_set == roots
        report.checks["zero_count_bound"] = len(report.zero_set) <= h.genus

    base = P0.matrix
    by_n = {r.n: r for r in report.rows}
    for p in primes:
        same = all(mats[n].matrix.mod(p) == base.mod(p) for n in mats if n % p == 0)
        periodic = all(by_n[n].b1_mod[p] == by_n[n % p].b1_mod[p] for n in by_n if n % p in by_n)
        report.checks[f"periodic_mod_{p}"] = same and periodic

    d0 = abs(dets[0])
    bad = [abs(n) for n, d in dets.items() if abs(d) < d0]
    threshold = max(bad, default=0)
    report.growth_threshold = threshold if threshold < w.N else None
    return report


# -- builders -------------------------------------------------------------------

def _euclid_word(x: int, y: int) -> list[tuple[Vector, int]]:
    """Letters, in application order, of a product of T_{e1}, T_{e2} powers sending (x, y) to (+-1, 0)."""
    e1, e2 = (1, 0), (0, 1)
    steps = []
    while y != 0:
        if x == 0:
            steps += [(e1, -1), (e2, -1)]
            x, y = y, 0
        elif abs(x) >= abs(y):
            k = x // y
            steps.append((e1, k))
            x -= k * y
        else:
            k = -(y // x)
            steps.append((e2, k))
            y += k * x
    return steps


def lens_space(p: int, q: int) -> HeegaardData:
    """Genus-1 splitting of L(p, q): a meridian glued onto the (q, p) curve.

    Both solid tori use the disk class e_1, and the gluing M satisfies
    M^-1 e_1 = +-(q, p), so H_1 = Z/p.
    """
    if math.gcd(p, q) != 1:
        raise ValueError("p and q must be coprime")
    steps = _euclid_word(q, p)
    word = TwistWord.of(1, [(c, k) for c, k in reversed(steps) if k])
    a = DiskSystem.of([(1, 0)])
    return HeegaardData.from_word(word, a, a)


def random_primitive(rng: SplitMix64, dim: int, bound: int = 3) -> Vector:
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(dim))
        if math.gcd(*v) == 1:
            return v


def random_twist_word(rng: SplitMix64, genus: int, length: int, power_bound: int = 2,
                      class_bound: int = 1) -> TwistWord:
    letters = []
    for _ in range(length):
        n = 0
        while n == 0:
            n = rng.randint(-power_bound, power_bound)
        letters.append((random_primitive(rng, 2 * genus, class_bound), n))
    return TwistWord.of(genus, letters)


def random_heegaard(rng: SplitMix64, genus: int, length: int = 4) -> HeegaardData:
    return HeegaardData.from_word(random_twist_word(rng, genus, length))
