"""Curve graph of the torus (the Farey graph) and Dehn twists acting on it.

Vertices are primitive slopes p/q, edges join slopes meeting once.  The
twist about c acts by the transvection v -> v + n <v, c> c with
<u, v> = u_p v_q - u_q v_p, the genus-1 case of :mod:`twistlab.homology`.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Optional

from .topology import Window


@dataclass(frozen=True, order=True)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        if math.gcd(self.p, self.q) != 1:
            raise ValueError(f"({self.p}, {self.q}) is not primitive")
        if not (self.q > 0 or (self.q == 0 and self.p == 1)):
            raise ValueError(f"({self.p}, {self.q}) is not in canonical sign")

    @classmethod
    def of(cls, p: int, q: int) -> Slope:
        g = math.gcd(p, q)
        if g == 0:
            raise ValueError("zero vector is not a slope")
        p, q = p // g, q // g
        if q < 0 or (q == 0 and p < 0):
            p, q = -p, -q
        return cls(p, q)

    @classmethod
    def parse(cls, text: str) -> Slope:
        p, _, q = text.strip().partition("/")
        return cls.of(int(p), int(q) if q else 1)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"

    @property
    def height(self) -> int:
        return max(abs(self.p), abs(self.q))


INFINITY = Slope(1, 0)


def pairing(u: Slope, v: Slope) -> int:
    return u.p * v.q - u.q * v.p


def intersection_number(u: Slope, v: Slope) -> int:
    return abs(pairing(u, v))


def _to_infinity(u: Slope) -> tuple[int, int, int, int]:
    """Canonical (s, r, -q, p) in SL(2, Z) sending u to 1/0; the dual slope is (-r, s)."""
    p, q = u.p, u.q
    if q == 0:
        return 1, 0, 0, 1
    # s p + r q = 1 with 0 <= s < q
    s = pow(p, -1, q) if q > 1 else 0
    r = (1 - s * p) // q
    return s, r, -q, p


def _apply(m, u: Slope) -> tuple[int, int]:
    a, b, c, d = m
    return a * u.p + b * u.q, c * u.p + d * u.q


def dual_slope(c: Slope) -> Slope:
    s, r, _, _ = _to_infinity(c)
    return Slope.of(-r, s)


def _continued_fraction(p: int, q: int) -> list[int]:
    out = []
    while q:
        a = p // q
        out.append(a)
        p, q = q, p - a * q
    return out


def _from_infinity(x: int, y: int) -> tuple[int, list[tuple[int, int]]]:
    """Distance from 1/0 to x/y and one geodesic, as vectors.

    Walks the ladder of Farey triangles cut by the hyperbolic geodesic:
    fan k has pivot c_k and rim c_{k-1}, c_{k-1} + c_k, ..., c_{k+1}, so
    c_{k+1} is reached either from c_k (one edge) or around the rim from
    c_{k-1} (a_{k+1} edges).  Ties go to the pivot.
    """
    cf = _continued_fraction(x, y)
    prev, cur = (1, 0), (cf[0], 1)
    d_prev, d_cur = 0, 1
    path_prev, path_cur = [prev], [prev, cur]
    for a in cf[1:]:
        nxt = (a * cur[0] + prev[0], a * cur[1] + prev[1])
        if d_cur + 1 <= d_prev + a:
            d_nxt, path_nxt = d_cur + 1, path_cur + [nxt]
        else:
            rim = [(prev[0] + j * cur[0], prev[1] + j * cur[1]) for j in range(1, a + 1)]
            d_nxt, path_nxt = d_prev + a, path_prev + rim
        prev, cur = cur, nxt
        d_prev, d_cur = d_cur, d_nxt
        path_prev, path_cur = path_cur, path_nxt
    return d_cur, path_cur


def distance(u: Slope, v: Slope) -> int:
    if u == v:
        return 0
    x, y = _apply(_to_infinity(u), v)
    if y < 0:
        x, y = -x, -y
    return _from_infinity(x, y)[0]


def geodesic(u: Slope, v: Slope) -> list[Slope]:
    if u == v:
        return [u]
    m = _to_infinity(u)
    x, y = _apply(m, v)
    if y < 0:
        x, y = -x, -y
    _, path = _from_infinity(x, y)
    a, b, c, d = m
    # inverse of [[a, b], [c, d]] with determinant 1
    inv = (d, -b, -c, a)
    return [Slope.of(inv[0] * px + inv[1] * py, inv[2] * px + inv[3] * py) for px, py in path]


def twist(c: Slope, n: int, v: Slope) -> Slope:
    k = n * pairing(v, c)
    return Slope.of(v.p + k * c.p, v.q + k * c.q)


def twisting_coefficient(c: Slope, v: Slope) -> int:
    """Number of turns of v around c, relative to the dual slope of c.

    Write v = x c + y d with d the canonical dual (<c, d> = 1).  The value
    floor(-x / y) grows by exactly n under the n-th twist about c.
    """
    if v == c:
        raise ValueError("no annular projection of c to itself")
    x, y = _apply(_to_infinity(c), v)
    return (-x) // y


def annular_distance(c: Slope, u: Slope, v: Slope) -> int:
    if u == c or v == c:
        raise ValueError("arguments must differ from the core curve")
    return 1 + abs(twisting_coefficient(c, u) - twisting_coefficient(c, v))


def exceptional_bound(a: Slope, b: Slope, c: Slope) -> Optional[int]:
    """B such that d(a, D_c^n b) < d(a, b) forces |n| <= B.

    A shorter path cannot pass through c (that costs d(a, c) + d(c, b) >=
    d(a, b)), and along a path avoiding c the twisting coefficient moves by
    at most one per edge.  Hence |n + t_c(b) - t_c(a)| <= d(a, b) - 1.
    None when a or b is c itself (no annular projection).
    """
    if c in (a, b):
        return None
    return abs(twisting_coefficient(c, a) - twisting_coefficient(c, b)) + max(distance(a, b) - 1, 0)


@dataclass
class FareyScanRow:
    n: int
    slope: Slope
    distance: int
    twisting: Optional[int]


@dataclass
class FareyScan:
    a: Slope
    b: Slope
    c: Slope
    window: Window
    rows: list[FareyScanRow] = field(default_factory=list)
    base_distance: int = 0
    upper_bound: int = 0

    @property
    def exceptional(self) -> list[int]:
        return [r.n for r in self.rows if r.distance < self.base_distance]

    @property
    def upper_bound_holds(self) -> bool:
        return all(r.distance <= self.upper_bound for r in self.rows)

    @property
    def confined(self) -> bool:
        return all(self.window.in_inner(n) for n in self.exceptional)

    @property
    def checks(self) -> dict[str, bool]:
        return {"upper_bound": self.upper_bound_holds, "exceptions_in_inner_window": self.confined}

    def to_dict(self) -> dict:
        return {
            "a": str(self.a),
            "b": str(self.b),
            "c": str(self.c),
            "window": {"N": self.window.N, "rho": self.window.rho},
            "base_distance": self.base_distance,
            "upper_bound": self.upper_bound,
            "exceptional": self.exceptional,
            "checks": self.checks,
            "rows": [
                {"n": r.n, "slope": str(r.slope), "distance": r.distance, "twisting": r.twisting}
                for r in self.rows
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "slope", "distance", "twisting"])
        for r in self.rows:
            w.writerow([r.n, str(r.slope), r.distance, "" if r.twisting is None else r.twisting])
        return buf.getvalue()


def twist_coset_distance_scan(a: Slope, b: Slope, c: Slope, w: Window) -> FareyScan:
    """d(a, D_c^n b) across the window, against d(a, b) and d(a, c) + d(c, b)."""
    scan = FareyScan(a, b, c, w, base_distance=distance(a, b),
                     upper_bound=distance(a, c) + distance(c, b))
    for n in w.values():
        v = twist(c, n, b)
        t = None if v == c else twisting_coefficient(c, v)
        scan.rows.append(FareyScanRow(n, v, distance(a, v), t))
    return scan
