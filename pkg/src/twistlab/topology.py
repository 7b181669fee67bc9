"""Finite-window probes of the cyclically cofinite topology.

A set U is open when, for every g in U and every generator x, the coset
elements ``g x^n`` (and ``x^n g``) lie in U for all but finitely many n.
Nothing here can decide that; every probe makes the weaker, exact statement
that within the window ``[-N, N]`` all exceptions sit inside the inner window
``[-floor(rho N), floor(rho N)]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence

from .groups import Element, GeneratingSet, GroupOracle

LEFT = "left"
RIGHT = "right"


@dataclass(frozen=True)
class SubsetOracle:
    name: str
    contains: Callable[[Element], bool] = field(compare=False)

    def __call__(self, x: Element) -> bool:
        return bool(self.contains(x))

    def __and__(self, other: SubsetOracle) -> SubsetOracle:
        return SubsetOracle(f"({self.name} & {other.name})", lambda x: self(x) and other(x))

    def complement(self) -> SubsetOracle:
        return SubsetOracle(f"~{self.name}", lambda x: not self(x))

    def translate(self, group: GroupOracle, g: Element) -> SubsetOracle:
        """The left translate ``g^-1 U``."""
        return SubsetOracle(f"{g!r}^-1.{self.name}", lambda y: self(group.multiply(g, y)))

    def preimage(self, phi: Callable[[Element], Element], name: str = "phi") -> SubsetOracle:
        return SubsetOracle(f"{name}^-1({self.name})", lambda y: self(phi(y)))


def whole_group() -> SubsetOracle:
    return SubsetOracle("G", lambda x: True)


def empty_set() -> SubsetOracle:
    return SubsetOracle("empty", lambda x: False)


@dataclass(frozen=True)
class Window:
    N: int
    rho: float = 0.5
    _empty: bool = field(default=False, repr=False)

    def __post_init__(self):
        if not self._empty and self.N < 1:
            raise ValueError("window half-width N must be >= 1")
        if not 0 < self.rho < 1:
            raise ValueError("inner fraction rho must lie in (0, 1)")

    @classmethod
    def empty(cls) -> Window:
        return cls(0, 0.5, True)

    @property
    def inner(self) -> int:
        return math.floor(self.rho * self.N)

    def values(self) -> range:
        if self._empty:
            return range(0)
        return range(-self.N, self.N + 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.values())

    def __len__(self) -> int:
        return len(self.values())

    def by_magnitude(self) -> list[int]:
        """0, 1, -1, 2, -2, ... restricted to the window."""
        return sorted(self.values(), key=lambda n: (abs(n), n < 0))

    def in_inner(self, n: int) -> bool:
        return abs(n) <= self.inner


def coset_powers(
    group: GroupOracle, g: Element, x: Element, w: Window, side: str = LEFT
) -> dict[int, Element]:
    """``{n: g x^n}`` (left) or ``{n: x^n g}`` (right) over the window.

    One multiplication per step, walking outwards from n = 0.
    """
    if side not in (LEFT, RIGHT):
        raise ValueError(f"side must be {LEFT!r} or {RIGHT!r}")
    vals = w.values()
    if not vals:
        return {}
    out = {0: g}
    xinv = group.invert(x)
    for step, sign, stop in ((x, 1, vals.stop - 1), (xinv, -1, -vals.start)):
        cur = g
        for k in range(1, stop + 1):
            cur = group.multiply(cur, step) if side == LEFT else group.multiply(step, cur)
            out[sign * k] = cur
    return out


def coset_exception_set(
    group: GroupOracle,
    U: SubsetOracle,
    g: Element,
    x: Element,
    w: Window,
    side: str = LEFT,
) -> frozenset[int]:
    return frozenset(n for n, y in coset_powers(group, g, x, w, side).items() if not U(y))


@dataclass(frozen=True)
class CosetExceptions:
    g: Any
    generator: int  # index into the generating set
    side: str
    exceptions: frozenset[int]


@dataclass
class ExceptionReport:
    subset: str
    window: Window
    entries: list[CosetExceptions]
    vacuous: bool
    verdict: bool  # consistent with open

    def to_dict(self, dump: Callable[[Any], Any] = lambda x: x) -> dict:
        return {
            "subset": self.subset,
            "window": {"N": self.window.N, "rho": self.window.rho, "inner": self.window.inner},
            "vacuous": self.vacuous,
            "verdict": "consistent-with-open" if self.verdict else "not-open",
            "entries": [
                {
                    "g": dump(e.g),
                    "generator": e.generator,
                    "side": e.side,
                    "exceptions": sorted(e.exceptions),
                }
                for e in self.entries
            ],
        }


def openness_probe(
    group: GroupOracle,
    U: SubsetOracle,
    sample: Iterable[Element],
    S: GeneratingSet,
    w: Window,
) -> ExceptionReport:
    entries = []
    for g in sample:
        if not U(g):
            continue
        for idx, gen in enumerate(S.generators):
            for side in (LEFT, RIGHT):
                exc = coset_exception_set(group, U, g, gen.element, w, side)
                entries.append(CosetExceptions(g, idx, side, exc))
    verdict = all(w.in_inner(n) for e in entries for n in e.exceptions)
    return ExceptionReport(U.name, w, entries, vacuous=not entries, verdict=verdict)


@dataclass(frozen=True)
class CollapseResult:
    closure: frozenset
    complete: bool  # closure is the whole group


def finite_order_collapse(
    group: GroupOracle, S: GeneratingSet, seed: Element
) -> CollapseResult:
    """Everything an open set containing ``seed`` is forced to contain.

    With x of order d, the coset elements g x^(1+kd) all equal g x, so an
    open set holding g must hold g x, and likewise g x^-1.
    """
    if not group.is_finite:
        raise ValueError("finite_order_collapse needs a finite group")
    if any(gen.order is None for gen in S.generators):
        raise ValueError("every generator must have finite order")
    S.check_orders(group)
    steps = []
    for gen in S.generators:
        x, d = gen.element, gen.order
        steps.append((x, group.power(x, 1 + d)))
        xinv = group.invert(x)
        steps.append((xinv, group.power(xinv, 1 + d)))
    start = group.canonical(seed)
    seen = {start}
    todo = [start]
    while todo:
        g = todo.pop()
        for x, x_long in steps:
            y = group.canonical(group.multiply(g, x))
            # the forcing identity g x^(1+d) == g x
            assert group.canonical(group.multiply(g, x_long)) == y
            if y not in seen:
                seen.add(y)
                todo.append(y)
    whole = {group.canonical(e) for e in group.elements}
    return CollapseResult(frozenset(seen), seen == whole)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    counterexample: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.ok


def conjugation_transport_check(
    group: GroupOracle,
    S: GeneratingSet,
    sample: Iterable[Element],
    powers: Iterable[int],
) -> CheckResult:
    """Verify ``x^n g == g (g^-1 x g)^n`` and that ``g^-1 x g`` is again in S."""
    if not S.conjugation_closed:
        raise ValueError("generating set is not declared conjugation-closed")
    powers = list(powers)
    for g in sample:
        for gen in S.generators:
            x = gen.element
            y = group.conjugate(x, g)
            if S.member is not None and not S.member(group.canonical(y)):
                return CheckResult(False, {"g": g, "x": x, "conjugate": y, "reason": "not in S"})
            for n in powers:
                lhs = group.multiply(group.power(x, n), g)
                rhs = group.multiply(g, group.power(y, n))
                if not group.equal(lhs, rhs):
                    return CheckResult(False, {"g": g, "x": x, "n": n, "reason": "identity fails"})
    return CheckResult(True)


def _check_decomposition(group, g, h, decomposition):
    prod = g
    for x, i in decomposition:
        prod = group.multiply(prod, group.power(x, i))
    if not group.equal(prod, h):
        raise ValueError("decomposition does not multiply out to h")


def _reduce(group, U, V, g, h, letters, candidates, S, on_step=None):
    """Shorten ``h = g x_1^i_1 ... x_k^i_k`` one letter at a time.

    ``candidates(h, x)`` yields V-side exponents n to try; the U-side
    exponent is m = i_k + n, after which h x^n = (g x^m) * prod (x^-m x_j x^m)^i_j.
    """
    letters = list(letters)
    while letters:
        x, i = letters[-1]
        if on_step is not None:
            on_step(h, x)
        for n in candidates(h, x):
            m = i + n
            h_next = group.multiply(h, group.power(x, n))
            if not V(h_next):
                continue
            xm = group.power(x, m)
            g_next = group.multiply(g, xm)
            if not U(g_next):
                continue
            g, h = g_next, h_next
            letters = [(group.conjugate(y, xm), j) for y, j in letters[:-1]]
            if S is not None and S.member is not None:
                assert all(S.member(group.canonical(y)) for y, _ in letters)
            break
        else:
            return None
    assert group.equal(g, h)
    return group.canonical(g)


def intersection_witness(
    group: GroupOracle,
    U: SubsetOracle,
    V: SubsetOracle,
    g: Element,
    h: Element,
    decomposition: Sequence[tuple[Element, int]],
    budget: int,
    S: Optional[GeneratingSet] = None,
) -> Optional[Element]:
    """A point of U & V reached by the letter-by-letter reduction, or None.

    ``budget`` is the number of exponents tried per letter (0, 1, -1, 2, ...).
    None means the budget ran out, which proves nothing.
    """
    if not U(g) or not V(h):
        raise ValueError("need g in U and h in V")
    _check_decomposition(group, g, h, decomposition)
    order = Window(max(budget, 1)).by_magnitude()[:budget] if budget > 0 else []
    out = _reduce(group, U, V, g, h, decomposition, lambda h_, x: order, S)
    if out is not None:
        assert U(out) and V(out)
    return out


def density_probe(
    group: GroupOracle,
    V: SubsetOracle,
    U: SubsetOracle,
    g: Element,
    h: Element,
    decomposition: Sequence[tuple[Element, int]],
    w: Window,
    hypothesis_check: bool = True,
    S: Optional[GeneratingSet] = None,
) -> Optional[Element]:
    """Like :func:`intersection_witness`, but V need only meet each coset infinitely often.

    The V-side exponents are drawn from T = {m in w : h x^m in V}.  With
    ``hypothesis_check`` each T must reach beyond the inner window, else
    ValueError.
    """
    if not U(g) or not V(h):
        raise ValueError("need g in U and h in V")
    _check_decomposition(group, g, h, decomposition)

    def t_set(h_, x):
        pw = coset_powers(group, h_, x, w, LEFT)
        return [m for m in w.by_magnitude() if V(pw[m])]

    def check(h_, x):
        if hypothesis_check and w.values() and not any(not w.in_inner(m) for m in t_set(h_, x)):
            raise ValueError(f"V meets the coset of {h_!r} only inside the inner window")

    out = _reduce(group, U, V, g, h, decomposition, t_set, S, on_step=check)
    if out is not None:
        assert U(out) and V(out)
    return out


def morphism_pullback_check(
    phi: Callable[[Element], Element],
    G: GroupOracle,
    H: GroupOracle,
    U_H: SubsetOracle,
    samples: Iterable[tuple[Element, Element]],
    w: Window,
    sides: Sequence[str] = (LEFT, RIGHT),
) -> CheckResult:
    """Compare exception sets of phi^-1(U_H) in G with those of U_H in H.

    The G side builds g x^n as words in G and only then applies phi; the H
    side multiplies phi(g) by powers of phi(x) inside H.
    """
    pulled = U_H.preimage(phi)
    for g, x in samples:
        for a, b in ((g, x), (x, g)):
            if not H.equal(phi(G.multiply(a, b)), H.multiply(phi(a), phi(b))):
                return CheckResult(False, {"g": g, "x": x, "reason": "phi is not multiplicative"})
        for side in sides:
            lhs = coset_exception_set(G, pulled, g, x, w, side)
            rhs = coset_exception_set(H, U_H, phi(g), phi(x), w, side)
            if lhs != rhs:
                return CheckResult(
                    False,
                    {"g": g, "x": x, "side": side, "source": sorted(lhs), "image": sorted(rhs)},
                )
    return CheckResult(True)
