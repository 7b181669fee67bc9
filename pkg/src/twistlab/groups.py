"""Groups given by operations, plus the built-in zoo used by the probes."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Any, Callable, Hashable, Optional, Sequence

from .rng import SplitMix64

Element = Hashable


@dataclass(frozen=True)
class GroupOracle:
    name: str
    multiply: Callable[[Element, Element], Element]
    invert: Callable[[Element], Element]
    identity: Element
    canonical: Callable[[Element], Element] = lambda x: x
    elements: Optional[tuple] = None  # full enumeration, finite groups only
    sampler: Optional[Callable[[SplitMix64], Element]] = field(default=None, compare=False)
    parse: Callable[[Any], Element] = field(default=lambda v: v, compare=False)
    dump: Callable[[Element], Any] = field(default=lambda x: x, compare=False)

    @property
    def is_finite(self) -> bool:
        return self.elements is not None

    def mul(self, *xs: Element) -> Element:
        out = self.identity
        for x in xs:
            out = self.multiply(out, x)
        return out

    def power(self, x: Element, n: int) -> Element:
        base = x if n >= 0 else self.invert(x)
        out = self.identity
        for _ in range(abs(n)):
            out = self.multiply(out, base)
        return out

    def conjugate(self, x: Element, g: Element) -> Element:
        """``g^-1 x g``."""
        return self.mul(self.invert(g), x, g)

    def equal(self, a: Element, b: Element) -> bool:
        return self.canonical(a) == self.canonical(b)

    def random_element(self, rng: SplitMix64) -> Element:
        if self.sampler is not None:
            return self.sampler(rng)
        if self.elements is not None:
            return rng.choice(self.elements)
        raise ValueError(f"group {self.name} has no sampler")


@dataclass(frozen=True)
class Generator:
    element: Element
    order: Optional[int] = None  # None means infinite order


@dataclass(frozen=True)
class GeneratingSet:
    generators: tuple[Generator, ...]
    conjugation_closed: bool = False
    # Membership in the (possibly infinite) set S itself, e.g. "is a
    # conjugate of a letter".  Only meaningful when conjugation_closed.
    member: Optional[Callable[[Element], bool]] = field(default=None, compare=False)

    @property
    def elements(self) -> list[Element]:
        return [x.element for x in self.generators]

    def check_orders(self, group: GroupOracle, infinite_horizon: int = 64) -> None:
        """Raise ValueError if a declared order is wrong.

        Infinite orders are checked only up to ``infinite_horizon``.
        """
        e = group.canonical(group.identity)
        for gen in self.generators:
            cur = group.identity
            limit = gen.order if gen.order is not None else infinite_horizon
            for k in range(1, limit + 1):
                cur = group.multiply(cur, gen.element)
                hit = group.canonical(cur) == e
                if hit and (gen.order is None or k < gen.order):
                    raise ValueError(f"{gen.element!r} has order {k}, declared {gen.order}")
                if not hit and gen.order is not None and k == gen.order:
                    raise ValueError(f"{gen.element!r} does not have order {gen.order}")


# -- abelian groups -------------------------------------------------------

def free_abelian(d: int, sample_radius: int = 20) -> GroupOracle:
    zero = (0,) * d
    return GroupOracle(
        name=f"Z^{d}",
        multiply=lambda a, b: tuple(x + y for x, y in zip(a, b)),
        invert=lambda a: tuple(-x for x in a),
        identity=zero,
        sampler=lambda rng: tuple(rng.randint(-sample_radius, sample_radius) for _ in range(d)),
        parse=lambda v: tuple(int(x) for x in v),
        dump=list,
    )


def cyclic(n: int) -> GroupOracle:
    return GroupOracle(
        name=f"Z/{n}",
        multiply=lambda a, b: (a + b) % n,
        invert=lambda a: (-a) % n,
        identity=0,
        canonical=lambda a: a % n,
        elements=tuple(range(n)),
        parse=int,
    )


# -- finite nonabelian ----------------------------------------------------

def dihedral(n: int) -> GroupOracle:
    """Symmetries of the regular n-gon, order 2n.

    ``(k, s)`` stands for rotation^k * reflection^s.
    """

    def mul(a, b):
        k1, s1 = a
        k2, s2 = b
        return ((k1 + (-k2 if s1 else k2)) % n, s1 ^ s2)

    def inv(a):
        k, s = a
        return (k, 1) if s else ((-k) % n, 0)

    return GroupOracle(
        name=f"D{n}",
        multiply=mul,
        invert=inv,
        identity=(0, 0),
        elements=tuple((k, s) for s in (0, 1) for k in range(n)),
        parse=lambda v: (int(v[0]) % n, int(v[1]) & 1),
        dump=list,
    )


def symmetric(n: int) -> GroupOracle:
    def mul(p, q):
        # (p*q)(i) = p(q(i))
        return tuple(p[i] for i in q)

    def inv(p):
        out = [0] * n
        for i, pi in enumerate(p):
            out[pi] = i
        return tuple(out)

    return GroupOracle(
        name=f"S{n}",
        multiply=mul,
        invert=inv,
        identity=tuple(range(n)),
        elements=tuple(permutations(range(n))),
        parse=lambda v: tuple(int(x) for x in v),
        dump=list,
    )


def trivial_group() -> GroupOracle:
    return GroupOracle(
        name="trivial",
        multiply=lambda a, b: 0,
        invert=lambda a: 0,
        identity=0,
        elements=(0,),
        parse=lambda v: 0,
    )


# -- free group -----------------------------------------------------------

def free_reduce(word: Sequence[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word: Sequence[int]) -> tuple[int, ...]:
    w = list(free_reduce(word))
    while len(w) >= 2 and w[0] == -w[-1]:
        w = w[1:-1]
    return tuple(w)


def is_letter_conjugate(word: Sequence[int]) -> bool:
    """True iff the reduced word is a conjugate of a single letter (or its inverse)."""
    return len(cyclic_reduce(word)) == 1


def free_group(rank: int = 2, max_sample_len: int = 6) -> GroupOracle:
    """Free group on letters 1..rank; a negative letter is an inverse."""
    letters = [s * i for i in range(1, rank + 1) for s in (1, -1)]

    def sample(rng):
        length = rng.randint(0, max_sample_len)
        w: list[int] = []
        while len(w) < length:
            x = rng.choice(letters)
            if not w or w[-1] != -x:
                w.append(x)
        return tuple(w)

    return GroupOracle(
        name=f"F{rank}",
        multiply=lambda a, b: free_reduce(a + b),
        invert=lambda a: tuple(-x for x in reversed(a)),
        identity=(),
        canonical=free_reduce,
        sampler=sample,
        parse=lambda v: free_reduce(int(x) for x in v),
        dump=list,
    )


# -- Heisenberg -----------------------------------------------------------

def heisenberg(sample_radius: int = 5) -> GroupOracle:
    """Integer unitriangular 3x3 matrices ``[[1,a,c],[0,1,b],[0,0,1]]`` as (a, b, c)."""
    return GroupOracle(
        name="Heisenberg",
        multiply=lambda x, y: (x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1]),
        invert=lambda x: (-x[0], -x[1], -x[2] + x[0] * x[1]),
        identity=(0, 0, 0),
        sampler=lambda rng: tuple(rng.randint(-sample_radius, sample_radius) for _ in range(3)),
        parse=lambda v: tuple(int(x) for x in v),
        dump=list,
    )


# -- catalog --------------------------------------------------------------

def _unit_vectors(d):
    return tuple(
        Generator(tuple(int(i == j) for j in range(d))) for i in range(d)
    )


def _builtin(name: str) -> tuple[GroupOracle, GeneratingSet]:
    if name in ("Z", "Z1", "Z2", "Z3"):
        d = 1 if name == "Z" else int(name[1:])
        return free_abelian(d), GeneratingSet(_unit_vectors(d), conjugation_closed=True,
                                              member=lambda x: True)
    if name.startswith("Z/"):
        n = int(name[2:])
        return cyclic(n), GeneratingSet((Generator(1 % n, n),), conjugation_closed=True)
    if name[0] == "D" and name[1:].isdigit():
        n = int(name[1:])
        return dihedral(n), GeneratingSet((Generator((0, 1), 2), Generator((1, 1), 2)))
    if name[0] == "S" and name[1:].isdigit():
        n = int(name[1:])
        gens = []
        for i in range(n - 1):
            p = list(range(n))
            p[i], p[i + 1] = p[i + 1], p[i]
            gens.append(Generator(tuple(p), 2))
        return symmetric(n), GeneratingSet(tuple(gens))
    if name == "F2":
        return free_group(2), GeneratingSet(
            tuple(Generator((x,)) for x in (1, 2)),
            conjugation_closed=True,
            member=is_letter_conjugate,
        )
    if name == "Heisenberg":
        return heisenberg(), GeneratingSet((Generator((1, 0, 0)), Generator((0, 1, 0))))
    if name == "trivial":
        return trivial_group(), GeneratingSet((Generator(0, 1),))
    raise KeyError(f"unknown group {name!r}")


BUILTIN_GROUPS = ("Z", "Z2", "Z3", "Z/5", "D4", "D6", "S3", "S4", "F2", "Heisenberg", "trivial")


def builtin_group(name: str) -> tuple[GroupOracle, GeneratingSet]:
    """Look up a zoo group and its default generating set.

    Any ``Z/n``, ``Dn`` or ``Sn`` is accepted, not only the catalogued ones.
    """
    return _builtin(name)
