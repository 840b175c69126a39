import itertools
import random

import pytest

from rncca.convert import convert
from rncca.engine import (
    BiPeriodic,
    Cyclic,
    Finite,
    canonicalize,
    cell_at,
    make_rule,
    run,
    step,
    window_growth,
)
from rncca.rpca import example_rpca


def right_shift():
    return make_rule(2, (-1,), lambda x: x, 0)


def identity_rule(states=2):
    return make_rule(states, (0,), lambda x: x, 0)


def xor_ncca():
    return convert(example_rpca("xor"))


def test_make_rule_rejects_moving_quiescent():
    with pytest.raises(ValueError):
        make_rule(2, (0,), lambda x: 1 - x, 0)


def test_make_rule_rejects_duplicate_offsets():
    with pytest.raises(ValueError):
        make_rule(2, (0, 0), lambda a, b: a, 0)


def test_make_rule_rejects_out_of_range_table():
    table = {(0,): 0, (1,): 2}
    with pytest.raises(ValueError):
        make_rule(2, (0,), table, 0)


def test_make_rule_rejects_partial_table():
    with pytest.raises(ValueError):
        make_rule(2, (0,), {(0,): 0}, 0)


def test_make_rule_accepts_computed_locals():
    rule = xor_ncca()
    assert rule.state_count == 16
    assert rule.local(0, 0, 0, 0) == 0


def test_cell_at_finite_outside_support():
    cfg = Finite(0, [5, 10], 0)
    assert cell_at(cfg, -3) == 0
    assert cell_at(cfg, 1) == 10


def test_cell_at_cyclic_wraps():
    assert cell_at(Cyclic([0, 15]), 7) == 15


def test_cell_at_biperiodic():
    cfg = BiPeriodic([0, 15], [5, 10], 0, [0, 15])
    assert cell_at(cfg, 1) == 10
    assert cell_at(cfg, -1) == 15
    assert cell_at(cfg, 2) == 0


def test_right_shift_moves_support():
    out = step(right_shift(), Finite(0, [1], 0))
    assert out == Finite(1, (1,), 0)


def test_right_shift_run_five():
    traj = run(right_shift(), Finite(0, [1], 0), 5)
    assert traj.configs[-1] == Finite(5, (1,), 0)


def test_identity_run_is_constant():
    cfg = Finite(2, [1, 0, 1], 0)
    traj = run(identity_rule(), cfg, 3)
    assert len(traj.configs) == 4
    assert all(c == canonicalize(cfg) for c in traj.configs)


def test_quiescent_cyclic_fixed_point():
    rule = xor_ncca()
    assert step(rule, Cyclic([0])) == Cyclic((0,))


def test_step_rejects_out_of_range_state():
    with pytest.raises(ValueError):
        step(right_shift(), Finite(0, [2], 0))


def test_step_rejects_mismatched_background():
    with pytest.raises(ValueError):
        step(right_shift(), Finite(0, [1], 1))


def test_worked_biperiodic_step():
    # One encoded source cell; the first derived step computed by hand.
    rule = xor_ncca()
    cfg = BiPeriodic([0, 15], [5, 10], 0, [0, 15])
    out = step(rule, cfg)
    assert out.left == (3, 12)
    assert out.right == (3, 12)
    assert cell_at(out, -2) == 3  # even positions hold 3
    assert [cell_at(out, x) for x in range(-1, 4)] == [12, 7, 9, 2, 12]
    # cell -1 equals the stepped background, so the canonical center drops it
    assert out == BiPeriodic((3, 12), (7, 9, 2), 0, (3, 12))


def test_canonicalize_finite_strips_quiescent_ends():
    assert canonicalize(Finite(0, [0, 1, 0], 0)) == Finite(1, (1,), 0)
    assert canonicalize(Finite(7, [0, 0], 0)) == Finite(0, (), 0)


def test_canonicalize_biperiodic_shrinks_center():
    cfg = BiPeriodic([0, 15], [0, 15, 5, 10], 0, [0, 15])
    assert canonicalize(cfg) == BiPeriodic((0, 15), (5, 10), 2, (0, 15))


def test_canonicalize_biperiodic_reduces_periods():
    cfg = BiPeriodic([0, 15, 0, 15], [5], 0, [0, 15])
    assert canonicalize(cfg) == BiPeriodic((0, 15), (5,), 0, (0, 15))


def test_canonicalize_empty_center_equal_backgrounds():
    cfg = BiPeriodic([0, 15], [], 6, [0, 15])
    out = canonicalize(cfg)
    assert out.center == ()
    assert out.center_offset == 0


def test_canonicalize_empty_center_distinct_backgrounds_minimal_boundary():
    left, right = (1, 2), (5, 2)
    cfg = BiPeriodic(left, [], 4, right)
    out = canonicalize(cfg)
    # position 3 holds 2 under either background, position 2 differs
    assert out.center_offset == 3
    for x in range(-6, 8):
        assert cell_at(out, x) == cell_at(cfg, x)


def test_canonicalize_cyclic_unchanged():
    assert canonicalize(Cyclic([0, 15])) == Cyclic((0, 15))


def test_shift_equivariance():
    rule = xor_ncca()
    rng = random.Random(11)
    for _ in range(30):
        word = [rng.randrange(16) for _ in range(rng.randint(1, 6))]
        base = step(rule, Finite(0, word, 0))
        for shift in (-5, 3):
            moved = step(rule, Finite(shift, word, 0))
            assert moved == canonicalize(Finite(base.offset + shift, base.word, 0))


def test_cyclic_finite_consistency():
    # A support that fits in the ring with quiescent padding steps the same way.
    rule = xor_ncca()
    rng = random.Random(5)
    for _ in range(25):
        word = [rng.randrange(16) for _ in range(3)]
        n = 12
        ring = word + [0] * (n - len(word))
        stepped_ring = step(rule, Cyclic(ring))
        stepped_fin = step(rule, Finite(0, word, 0))
        for x in range(n):
            expect = cell_at(stepped_fin, x if x < n // 2 else x - n)
            assert stepped_ring.word[x] == expect


def brute_step_cells(rule, cfg, lo, hi):
    # Independent route: evaluate the local rule straight from the
    # definition at every position, with no window or canonical logic.
    out = []
    for x in range(lo, hi + 1):
        out.append(rule.local(*(cell_at(cfg, x + n) for n in rule.neighborhood)))
    return out


def test_biperiodic_background_correctness():
    rule = xor_ncca()
    rng = random.Random(3)
    for _ in range(20):
        center = [rng.randrange(16) for _ in range(rng.randint(0, 5))]
        cfg = BiPeriodic([0, 15], center, rng.randint(-4, 4), [0, 15])
        out = step(rule, cfg)
        expect = brute_step_cells(rule, cfg, -30, 30)
        got = [cell_at(out, x) for x in range(-30, 31)]
        assert got == expect


def test_empty_center_biperiodic_step_matches_brute_force():
    rule = xor_ncca()
    cfg = BiPeriodic([0, 15], [], 3, [5, 11])
    out = step(rule, cfg)
    expect = brute_step_cells(rule, cfg, -20, 20)
    assert [cell_at(out, x) for x in range(-20, 21)] == expect


def test_window_growth():
    assert window_growth((-2, -1, 0, 1)) == (1, 2)
    assert window_growth((-1,)) == (0, 1)
    assert window_growth((0,)) == (0, 0)


def test_run_rejects_negative_steps():
    with pytest.raises(ValueError):
        run(identity_rule(), Finite(0, [1], 0), -1)


def test_determinism():
    rule = xor_ncca()
    cfg = BiPeriodic([0, 15], [5, 10], 0, [0, 15])
    a = run(rule, cfg, 6)
    b = run(rule, cfg, 6)
    assert a.configs == b.configs


def test_trajectory_invariant():
    rule = xor_ncca()
    traj = run(rule, BiPeriodic([0, 15], [5, 10], 0, [0, 15]), 5)
    for before, after in itertools.pairwise(traj.configs):
        assert step(rule, before) == after


def test_configs_equal_sees_through_noncanonical_values():
    from rncca.engine import configs_equal

    a = Finite(0, [0, 1, 0], 0)
    b = Finite(1, [1], 0)
    assert configs_equal(a, b)
    c = BiPeriodic([0, 15, 0, 15], [0, 15, 5, 10], 0, [0, 15])
    d = BiPeriodic([0, 15], [5, 10], 2, [0, 15])
    assert configs_equal(c, d)
    assert not configs_equal(a, Finite(0, [1], 0))


def test_canonical_form_unique_across_redundant_descriptions():
    # expanding background periods and absorbing background cells into
    # the center must not change the canonical value
    rng = random.Random(21)
    for _ in range(50):
        left = tuple(rng.randrange(16) for _ in range(rng.randint(1, 3)))
        right = tuple(rng.randrange(16) for _ in range(rng.randint(1, 3)))
        center = tuple(rng.randrange(16) for _ in range(rng.randint(0, 4)))
        offset = rng.randint(-5, 5)
        base = canonicalize(BiPeriodic(left, center, offset, right))
        variants = []
        for expand_l in (1, 2, 3):
            for expand_r in (1, 2):
                variants.append(
                    BiPeriodic(base.left * expand_l, base.center, base.center_offset, base.right * expand_r)
                )
        c0 = base.center_offset
        grown = (cell_at(base, c0 - 1),) + base.center + (cell_at(base, c0 + len(base.center)),)
        variants.append(BiPeriodic(base.left, grown, c0 - 1, base.right))
        for variant in variants:
            for x in range(c0 - 8, c0 + len(base.center) + 8):
                assert cell_at(variant, x) == cell_at(base, x)
            assert canonicalize(variant) == base


def test_step_with_mixed_background_periods():
    # backgrounds of different primitive periods on the two sides
    rule = xor_ncca()
    cfg = BiPeriodic([0, 15], [7, 9], 0, [0, 15, 0])
    out = step(rule, cfg)
    expect = brute_step_cells(rule, cfg, -25, 25)
    assert [cell_at(out, x) for x in range(-25, 26)] == expect
