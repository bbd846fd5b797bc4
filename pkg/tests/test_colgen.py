import csv
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from ukp.colgen import (
    ColGenConfig,
    ColGenError,
    CspInstance,
    MasterLPError,
    Pattern,
    column_generation,
    initial_patterns,
    parse_bpp_instance,
    price,
    solve_master,
    write_trace,
)
from ukp.core import InstanceError, ParseError

VARIANTS = [
    ColGenConfig(sort_by=s, profit=p) for s in ("efficiency", "weight") for p in ("native", "scaled")
] + [ColGenConfig(pricer="mtu1")]


def all_patterns(inst: CspInstance) -> list[tuple[int, ...]]:
    out = []

    def rec(i, room, cur):
        if i == inst.n:
            if any(cur):
                out.append(tuple(cur))
            return
        for a in range(room // inst.sizes[i] + 1):
            rec(i + 1, room - a * inst.sizes[i], cur + [a])

    rec(0, inst.bin_capacity, [])
    return out


def full_lp(inst: CspInstance) -> float:
    """LP over every feasible pattern, solved by HiGHS."""
    A = np.array(all_patterns(inst)).T
    res = linprog(np.ones(A.shape[1]), A_ub=-A, b_ub=-np.array(inst.demands),
                  bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun


@st.composite
def csp_instances(draw, max_n=8, max_c=30):
    c = draw(st.integers(4, max_c))
    lo = max(1, c // 8)
    sizes = draw(st.lists(st.integers(lo, c), min_size=1, max_size=max_n, unique=True))
    demands = draw(st.lists(st.integers(1, 6), min_size=len(sizes), max_size=len(sizes)))
    return CspInstance(c, sizes, demands)


def test_parse_examples():
    assert parse_bpp_instance("2\n10\n6\n4") == CspInstance(10, (6, 4), (1, 1))
    assert parse_bpp_instance("1\n10\n3 7") == CspInstance(10, (3,), (7,))
    with pytest.raises(ParseError, match="exceeds capacity"):
        parse_bpp_instance("1\n5\n6")


def test_parse_merges_repeated_sizes():
    assert parse_bpp_instance("3\n10\n4\n6\n4").demands == (2, 1)


def test_instance_validation():
    with pytest.raises(InstanceError):
        CspInstance(10, (4, 4), (1, 1))
    with pytest.raises(InstanceError):
        CspInstance(10, (11,), (1,))


def test_initial_patterns():
    assert initial_patterns(CspInstance(10, (6, 4), (1, 1))) == [Pattern((1, 0)), Pattern((0, 2))]
    assert initial_patterns(CspInstance(10, (3,), (7,))) == [Pattern((3,))]
    assert initial_patterns(CspInstance(10, (10,), (1,))) == [Pattern((1,))]


def test_master_examples():
    value, x, duals = solve_master([Pattern((3,))], CspInstance(10, (3,), (7,)))
    assert value == pytest.approx(7 / 3) and duals == pytest.approx([1 / 3])
    inst = CspInstance(10, (6, 4), (1, 1))
    value, x, duals = solve_master([Pattern((1, 0)), Pattern((0, 2)), Pattern((1, 1))], inst)
    assert value == pytest.approx(1.0)
    assert min(duals) >= 0


def test_master_uncovered_size():
    with pytest.raises(MasterLPError, match="infeasible") as err:
        solve_master([Pattern((1, 0))], CspInstance(10, (6, 4), (1, 1)))
    assert isinstance(err.value.trace, list)


@pytest.mark.parametrize("variant", VARIANTS)
def test_price_examples(variant):
    inst = CspInstance(10, (6, 4), (1, 1))
    assert price([0.0, 0.0], inst, variant)[0] is None
    assert price([1 / 3], CspInstance(10, (3,), (7,)), variant)[0] is None
    pattern, seconds = price([1.0, 1.0], inst, variant)
    # {6, 4} and {4, 4} both price at 2; either is an improving column
    assert pattern in (Pattern((1, 1)), Pattern((0, 2))) and seconds >= 0
    assert sum(pattern.multiplicities) == 2 and pattern.weight(inst) <= 10


def test_mtu1_needs_scaled_profits():
    with pytest.raises(ValueError, match="integer profits"):
        ColGenConfig(pricer="mtu1", profit="native")


@pytest.mark.parametrize("variant", VARIANTS)
def test_column_generation_examples(variant):
    assert column_generation(CspInstance(10, (6, 4), (1, 1)), variant).lp_value == pytest.approx(1)
    assert column_generation(CspInstance(10, (3,), (7,)), variant).lp_value == pytest.approx(7 / 3)
    big = CspInstance(10, (6, 7, 9), (2, 3, 1))
    assert column_generation(big, variant).lp_value == pytest.approx(6)


@settings(max_examples=60, deadline=None)
@given(csp_instances())
def test_matches_full_pattern_lp(inst):
    ref = full_lp(inst)
    for variant in VARIANTS:
        state = column_generation(inst, variant)
        assert abs(state.lp_value - ref) <= 1e-9
        assert all(b <= a + 1e-9 for a, b in zip(state.lp_values, state.lp_values[1:]))
        assert all(p.weight(inst) <= inst.bin_capacity for p in state.patterns)
        assert min(state.duals) >= 0


def test_variants_agree_at_desk_scale():
    rng = random.Random(11)
    for _ in range(5):
        c = rng.randint(500, 3000)
        sizes = rng.sample(range(c // 20, c // 2), 25)
        inst = CspInstance(c, sizes, [rng.randint(1, 5) for _ in sizes])
        values = [column_generation(inst, v).lp_value for v in VARIANTS]
        assert max(values) - min(values) <= 2.0**-18 * max(values)


def test_iteration_cap_keeps_partial_state():
    rng = random.Random(2)
    sizes = rng.sample(range(50, 400), 20)
    inst = CspInstance(1000, sizes, [1] * 20)
    with pytest.raises(ColGenError) as err:
        column_generation(inst, ColGenConfig(max_iterations=2))
    assert err.value.state.iterations == 2


def test_trace_csv(tmp_path):
    state = column_generation(CspInstance(10, (6, 4, 3), (2, 1, 3)))
    path = tmp_path / "trace.csv"
    write_trace(state, path)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["iteration", "pricing_s", "master_s", "lp_value"]
    assert len(rows) == state.iterations + 1
    assert float(rows[-1][3]) == state.lp_value
