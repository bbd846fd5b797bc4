from __future__ import annotations

from functools import lru_cache

from hypothesis import strategies as st

from ukp.core import Instance

COUNTEREXAMPLE = Instance.from_pairs(6, [(1, 1), (2, 10)])
FIG_ITEMS = [(3, 2), (5, 5), (6, 1), (12, 9), (14, 11), (16, 13), (17, 19)]


def brute_force_opt(instance: Instance) -> int:
    """Exhaustive search over multiplicities; kept independent of the package."""
    items = [(it.weight, it.profit) for it in instance.items]

    @lru_cache(maxsize=None)
    def best(i: int, room: int) -> int:
        if i == len(items):
            return 0
        w, p = items[i]
        return max(k * p + best(i + 1, room - k * w) for k in range(room // w + 1))

    return best(0, instance.capacity)


@st.composite
def instances(draw, max_n=8, max_w=30, max_p=40, max_c=200):
    n = draw(st.integers(1, max_n))
    pairs = draw(st.lists(st.tuples(st.integers(1, max_w), st.integers(1, max_p)),
                          min_size=n, max_size=n))
    c = draw(st.integers(1, max_c))
    return Instance.from_pairs(c, pairs)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
