import random

import pytest

from netcreate.graph import OwnedGraph


def star(n, centre=0, centre_owns=True):
    g = OwnedGraph(n)
    for v in range(n):
        if v != centre:
            if centre_owns:
                g.add_edge(centre, v)
            else:
                g.add_edge(v, centre)
    return g


def path(n):
    g = OwnedGraph(n)
    for v in range(n - 1):
        g.add_edge(v, v + 1)
    return g


def complete(n):
    g = OwnedGraph(n)
    for i in range(n):
        for j in range(i + 1, n):
            g.add_edge(i, j)
    return g


def three_centre(n, hubs=(0, 1, 2)):
    """Hubs a, b, c with edges a-b and b-c; others alternate over hub pairs."""
    a, b, c = hubs
    g = OwnedGraph(n)
    g.add_edge(a, b)
    g.add_edge(b, c)
    pairs = [(a, b), (b, c), (a, c)]
    others = [v for v in range(n) if v not in hubs]
    for k, v in enumerate(others):
        for h in pairs[k % 3]:
            g.add_edge(v, h)
    return g


def random_graph(n, p, seed, ensure_connected=False):
    rnd = random.Random(seed)
    g = OwnedGraph(n)
    if ensure_connected:
        order = list(range(n))
        rnd.shuffle(order)
        for k in range(1, n):
            u, v = order[k], order[rnd.randrange(k)]
            g.add_edge(*((u, v) if rnd.random() < 0.5 else (v, u)))
    for i in range(n):
        for j in range(i + 1, n):
            if not g.has_edge(i, j) and rnd.random() < p:
                g.add_edge(*((i, j) if rnd.random() < 0.5 else (j, i)))
    return g


@pytest.fixture
def rnd():
    return random.Random(12345)


# criterion number -> (passed, detail), filled in by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
