import pytest
from hypothesis import given, settings, strategies as st

from ukp.bb import (
    continuous_bound,
    first_leaf,
    greedy_bound,
    initial_core_size,
    solve_mtu1,
    solve_mtu2,
)
from ukp.core import Instance, Solution, Termination, efficiency_order, evaluate
from ukp.dp import solve_naive_dp
from ukp.gen import gen_breq

from conftest import COUNTEREXAMPLE, FIG_ITEMS, brute_force_opt, instances


def test_greedy_examples():
    inst = Instance.from_pairs(7, [(5, 5), (3, 2)])
    assert greedy_bound(inst) == (Solution.from_counts({0: 1}, inst), 5)
    single = Instance.from_pairs(12, [(5, 7)])
    assert greedy_bound(single) == (Solution.from_counts({0: 2}, single), 14)
    assert greedy_bound(Instance.from_pairs(2, [(5, 7), (3, 1)])) == (Solution(), 0)


def test_continuous_bound_examples():
    assert continuous_bound(0, 7, (5, 5)) == 7
    assert continuous_bound(10, 0, (3, 8)) == 10
    assert continuous_bound(0, 6, (10, 2)) == 30
    assert continuous_bound(0, 7, (2, 3)) == 4


@pytest.mark.parametrize("solver", [solve_mtu1, solve_mtu2])
def test_counterexample(solver):
    out = solver(COUNTEREXAMPLE)
    assert out.optimal_value == 30 and out.solution.normalized() == {1: 3}


def test_figure_items_at_24():
    inst = Instance.from_pairs(24, FIG_ITEMS)
    assert solve_mtu1(inst).optimal_value == solve_naive_dp(inst).optimal_value
    assert solve_mtu1(inst).optimal_value == brute_force_opt(inst)


@settings(max_examples=300, deadline=None)
@given(instances(max_n=12, max_w=60, max_p=80, max_c=400), st.integers(1, 4))
def test_oracle_equivalence(inst, core):
    ref = solve_naive_dp(inst).optimal_value
    for out in (solve_mtu1(inst), solve_mtu2(inst), solve_mtu2(inst, core_size=core)):
        assert out.optimal_value == ref
        w, p, feasible = evaluate(out.solution, inst)
        assert feasible and p == ref


@settings(max_examples=150, deadline=None)
@given(instances(max_n=10, max_w=40, max_c=200))
def test_first_leaf_is_greedy(inst):
    out = solve_mtu1(inst, warm_start=False)
    assert first_leaf(out, inst) == greedy_bound(inst)[0]
    assert out.optimal_value == solve_naive_dp(inst).optimal_value


@settings(max_examples=100, deadline=None)
@given(instances(max_n=10, max_w=40, max_c=200))
def test_incumbent_never_decreases(inst):
    trace: list[int] = []
    solve_mtu1(inst, warm_start=False, trace=trace)
    assert trace == sorted(trace)


@settings(max_examples=200, deadline=None)
@given(instances(max_n=10, max_w=40, max_c=200), st.data())
def test_bound_covers_subtree(inst, data):
    """For any fixed prefix of counts, the bound is at least the best completion."""
    order = efficiency_order(inst.weights, inst.profits)
    depth = data.draw(st.integers(0, len(order) - 1))
    room, profit = inst.capacity, 0
    for i in order[:depth]:
        k = data.draw(st.integers(0, room // inst.items[i].weight))
        room -= k * inst.items[i].weight
        profit += k * inst.items[i].profit
    rest = inst.subset(order[depth:]).with_capacity(max(room, 1))
    best = brute_force_opt(rest) if room > 0 else 0
    nxt = inst.items[order[depth]]
    assert continuous_bound(profit, room, (nxt.profit, nxt.weight)) >= profit + best


def test_mtu2_full_core_equals_mtu1():
    inst = gen_breq(100, 4)
    assert initial_core_size(100) >= 100
    a, b = solve_mtu1(inst), solve_mtu2(inst)
    assert a.optimal_value == b.optimal_value and b.stats["rounds"] == 1


def test_mtu2_grows_core_when_needed():
    # the optimum needs an item outside a one-item core
    inst = Instance.from_pairs(10, [(3, 4), (4, 5), (5, 6), (10, 11)])
    out = solve_mtu2(inst, core_size=1)
    assert out.optimal_value == solve_naive_dp(inst).optimal_value == brute_force_opt(inst)
    assert out.stats["rounds"] > 1


def test_stats_and_timeout():
    inst = Instance.from_pairs(10**7 + 3, [(w, w - 5) for w in range(110000, 110400, 3)])
    out = solve_mtu1(inst, timeout=0.05)
    assert out.terminated_by is Termination.TIMEOUT
    assert set(out.stats) == {"nodes_expanded", "pruned_by_bound"}
    w, _, feasible = evaluate(out.solution, inst)
    assert feasible and out.solution.total_profit == out.optimal_value
