import math
from collections import deque
from fractions import Fraction

import pytest

from twistlab.farey import Slope, intersection_number


def cofactor_det(rows):
    """Laplace expansion along the first row; independent of the elimination code."""
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j]:
            minor = [r[:j] + r[j + 1:] for r in rows[1:]]
            total += (-1) ** j * rows[0][j] * cofactor_det(minor)
    return total


def rational_rank(rows):
    """Gaussian elimination over Q with Fractions."""
    a = [[Fraction(x) for x in r] for r in rows]
    m, n = len(a), len(a[0])
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(m):
            if i != r and a[i][c]:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
        if r == m:
            break
    return r


def all_slopes(height):
    out = [Slope(1, 0)]
    for q in range(1, height + 1):
        for p in range(-height, height + 1):
            if math.gcd(p, q) == 1:
                out.append(Slope(p, q))
    return out


class FareyOracle:
    """Breadth-first search in the Farey graph truncated at a height bound."""

    def __init__(self, height):
        self.slopes = all_slopes(height)
        self.index = {s: i for i, s in enumerate(self.slopes)}
        self.adj = [[] for _ in self.slopes]
        for i, u in enumerate(self.slopes):
            for j in range(i + 1, len(self.slopes)):
                if intersection_number(u, self.slopes[j]) == 1:
                    self.adj[i].append(j)
                    self.adj[j].append(i)
        self._cache = {}

    def distances_from(self, u):
        if u not in self._cache:
            src = self.index[u]
            dist = [-1] * len(self.slopes)
            dist[src] = 0
            dq = deque([src])
            while dq:
                x = dq.popleft()
                for y in self.adj[x]:
                    if dist[y] < 0:
                        dist[y] = dist[x] + 1
                        dq.append(y)
            self._cache[u] = dist
        return self._cache[u]

    def distance(self, u, v):
        return self.distances_from(u)[self.index[v]]


@pytest.fixture(scope="session")
def farey_oracle():
    return FareyOracle(40)


# -- acceptance reporting ---------------------------------------------------

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion; see the terminal summary."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])
