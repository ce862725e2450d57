import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from locpress.potentials import (
    BoundaryCurve,
    FishGeometry,
    FishPotential,
    JointPotential,
    LocallyConstantPotential,
    affine_combination,
    constant,
    fish_block_contribution,
    fish_lipschitz_constant,
    fish_lipschitz_valid_bound,
    indicator,
    perturb_fish,
    symbol_class,
    truncate_to_locally_constant,
)
from locpress.shift import PeriodicOrbit, TransitionSystem, WordLengthError, word_metric

FULL2 = TransitionSystem.preset("full2")
FULL4 = TransitionSystem.preset("full4")
FISH = FishPotential.figure1()
GEOM = FISH.geometry
W0 = GEOM.w0_vec


class TestFigure1Geometry:
    def test_base_point(self):
        assert np.allclose(W0, [37 / 72, 0.0])

    def test_diameter(self):
        assert GEOM.gamma == 4.0

    def test_marker_rule(self):
        assert GEOM.x(1) == 1.0
        assert GEOM.x(2) == pytest.approx(6.0**-2)
        assert GEOM.x(5) == pytest.approx(6.0**-5)

    def test_arc_points(self):
        assert np.allclose(GEOM.v(1, 1), [1.0, -2.0])
        assert np.allclose(GEOM.v(2, 1), [1.0, 2.0])

    def test_hypotheses_hold_where_promised(self):
        warnings = GEOM.validate()
        # the run-length hypothesis l(x1) > (alpha+1) l(x2) holds, the
        # geometric arc bound fails at small k only
        assert not any("l(x1)" in w for w in warnings)
        assert any("|v(2)|" in w for w in warnings)
        assert all(GEOM.v_norm(k) < 2.0**-k for k in range(6, 30))

    def test_norms_decrease(self):
        assert all(GEOM.v_norm(k + 1) < GEOM.v_norm(k) for k in range(1, 40))


class TestLocallyConstant:
    def test_indicator(self):
        pot = indicator(FULL2, (1,))
        assert pot.value((1, 0, 1))[0] == 1.0
        assert pot.value((0, 1))[0] == 0.0
        v, osc = pot.evaluate((1, 1))
        assert v[0] == 1.0 and osc == 0.0

    def test_short_word_raises(self):
        pot = indicator(FULL2, (1, 1))
        with pytest.raises(WordLengthError) as err:
            pot.value((1,))
        assert err.value.required == 2

    def test_birkhoff_cyclic(self):
        pot = indicator(FULL2, (1,))
        assert pot.birkhoff_average(PeriodicOrbit((0, 1)))[0] == 0.5
        pot2 = indicator(FULL2, (1, 1))
        # (011) cyclically: windows 01, 11, 10 -> one hit in three
        assert pot2.birkhoff_average(PeriodicOrbit((0, 1, 1)))[0] == pytest.approx(1 / 3)

    def test_affine_combination_reblocks(self):
        phi = indicator(FULL2, (1, 1))
        Phi = indicator(FULL2, (1,))
        combo = affine_combination(FULL2, [(2.0, phi), (np.array([3.0]), Phi)])
        assert combo.depth == 2
        assert combo.value((1, 1))[0] == pytest.approx(5.0)
        assert combo.value((1, 0))[0] == pytest.approx(3.0)


class TestFishEvaluation:
    def test_run_exits_inside_word(self):
        v, osc = FISH.evaluate((0, 0, 0, 2))
        assert np.allclose(v, GEOM.v(1, 1)) and osc == 0.0

    def test_mixed_head_is_base_point(self):
        v, osc = FISH.evaluate((0, 2, 0))
        assert np.allclose(v, W0) and osc == 0.0

    def test_pure_word_gets_tail_with_bound(self):
        v, osc = FISH.evaluate((0,) * 25)
        assert np.allclose(v, [0.0, 0.0])
        assert 0 < osc < 1e-8

    def test_pure_word_too_short(self):
        with pytest.raises(WordLengthError) as err:
            FISH.evaluate((2, 2, 3))
        assert err.value.required == FISH.truncation_depth

    def test_oscillation_dominates_continuations(self):
        word = (0,) * 20
        value, osc = FISH.evaluate(word)
        for extra in range(1, 6):
            cont = word + (2,) * extra  # resolves to an arc point
            v, _ = FISH.evaluate(cont)
            assert np.linalg.norm(v - value) <= osc + 1e-15


class TestBirkhoffAndBlocks:
    def test_pure_orbit_hits_tail(self):
        assert np.allclose(FISH.birkhoff_average(PeriodicOrbit((0,))), [0.0, 0.0])

    def test_four_cycle_is_base_point(self):
        assert np.allclose(FISH.birkhoff_average(PeriodicOrbit((0, 1, 2, 3))), W0)

    def test_block_contributions(self):
        expected = 2 * W0 + GEOM.v(1, 1) + GEOM.v(1, 2) + GEOM.v(1, 3)
        assert np.allclose(fish_block_contribution(FISH, 1, 5), expected)
        assert np.allclose(fish_block_contribution(FISH, 1, 2), 2 * W0)
        got = fish_block_contribution(FISH, 1, 3)
        assert np.allclose(got, [2 * 37 / 72 + 1, -2.0])

    def _direct_sum(self, word):
        # independent route: per-shift cyclic run lookup
        p = len(word)
        total = np.zeros(2)
        for j in range(p):
            c = symbol_class(word[j])
            L = 1
            while L <= 2 * p and symbol_class(word[(j + L) % p]) == c:
                L += 1
            total += FISH.run_value(c, L)
        return total

    def test_block_identity_exhaustive_small(self):
        # every mixed cyclic word up to period 8 (by primitive orbits)
        from locpress.shift import enumerate_periodic_orbits

        for orbit in enumerate_periodic_orbits(FULL4, 8):
            word = orbit.generator
            if FISH.cyclic_runs(word) is None:
                continue
            lhs = orbit.period * FISH.birkhoff_average(orbit)
            assert np.allclose(lhs, self._direct_sum(word), atol=1e-12)

    @settings(max_examples=150, deadline=None)
    @given(word=st.lists(st.integers(0, 3), min_size=9, max_size=14))
    def test_block_identity_sampled_long(self, word):
        word = tuple(word)
        if FISH.cyclic_runs(word) is None:
            return
        lhs = len(word) * FISH.birkhoff_average(word)
        assert np.allclose(lhs, self._direct_sum(word), atol=1e-12)


class TestLipschitz:
    def test_contract_constant(self):
        assert fish_lipschitz_constant(FISH) == 32.0

    def test_small_body_floor(self):
        small = FishPotential(
            FishGeometry(alpha=3, curve=BoundaryCurve(0.05, 0.1), x1=0.05, tail_base=8.0)
        )
        assert fish_lipschitz_constant(small) == 4.0

    def test_certified_bound_for_reference_geometry(self):
        # the concrete arc spread makes the true constant 2^4 |v(1)|
        assert fish_lipschitz_valid_bound(FISH) == pytest.approx(16 * math.sqrt(5))

    def test_sampled_ratios_under_certified_bound(self):
        rng = np.random.default_rng(1)
        bound = fish_lipschitz_valid_bound(FISH)
        worst = 0.0
        for _ in range(10_000):
            x = tuple(rng.integers(0, 4, 30).tolist())
            y = tuple(rng.integers(0, 4, 30).tolist())
            d = float(word_metric(x, y, 0.5))
            if d == 0.0:
                continue
            fx, _ = FISH.evaluate(x)
            fy, _ = FISH.evaluate(y)
            worst = max(worst, float(np.linalg.norm(fx - fy)) / d)
        assert worst <= bound

    def test_deep_within_arc_pairs_match_paperlike_rate(self):
        # far down the arc the distortion against a pure word drops
        # below the within-arc constant 4
        x = (0,) * 30
        fx, _ = FISH.evaluate(x)
        for k in range(12, 26):
            y = (0,) * k + (2,) * (30 - k)
            fy, _ = FISH.evaluate(y)
            d = float(word_metric(x, y, 0.5))
            assert float(np.linalg.norm(fx - fy)) <= 4.0 * d


class TestPerturbation:
    def test_degenerate_identity(self):
        same = perturb_fish(FISH, 1.0, w_eps=(0.0, 0.0))
        assert not same.perturbed

    def test_tail_moves(self):
        pert = perturb_fish(FISH, 0.1)
        assert np.linalg.norm(pert.tail_value(2)) == pytest.approx(0.05)
        assert np.allclose(pert.tail_value(1), [0.0, 0.0])
        assert np.allclose(
            pert.birkhoff_average(PeriodicOrbit((2,))), pert.tail_value(2)
        )

    def test_sup_distance_under_epsilon(self):
        pert = perturb_fish(FISH, 0.1)
        rng = np.random.default_rng(3)
        sup = 0.0
        for _ in range(4000):
            length = int(rng.integers(1, 21))
            word = tuple(rng.integers(0, 4, length).tolist())
            try:
                a, _ = FISH.evaluate(word)
                b, _ = pert.evaluate(word)
            except WordLengthError:
                continue
            sup = max(sup, float(np.linalg.norm(a - b)))
        for s in range(4):  # pure words realize the tail change itself
            for length in (20, 24):
                a, _ = FISH.evaluate((s,) * length)
                b, _ = pert.evaluate((s,) * length)
                sup = max(sup, float(np.linalg.norm(a - b)))
        assert 0 < sup < 0.1

    def test_mixed_prefixes_unchanged(self):
        pert = perturb_fish(FISH, 0.1)
        rng = np.random.default_rng(4)
        K = FISH.truncation_depth
        for _ in range(2000):
            word = rng.integers(0, 4, K)
            if len({symbol_class(s) for s in word}) < 2:
                continue  # needs both classes within the first K symbols
            a, _ = FISH.evaluate(tuple(word))
            b, _ = pert.evaluate(tuple(word))
            assert np.array_equal(a, b)

    def test_refit_points_near_new_tail(self):
        pert = perturb_fish(FISH, 0.1)
        tail = pert.tail_value(2)
        assert pert.refit_start is not None
        for k in range(pert.refit_start, pert.refit_start + 20):
            assert np.linalg.norm(pert.v(2, k) - tail) < 2.0**-k

    def test_off_curve_rejected(self):
        with pytest.raises(ValueError):
            perturb_fish(FISH, 0.1, w_eps=(0.01, 0.01))

    def test_too_far_rejected(self):
        point = GEOM.boundary_point_near_origin(2, 0.2)
        with pytest.raises(ValueError):
            perturb_fish(FISH, 0.1, w_eps=point)


class TestTruncation:
    def test_error_bound_decays(self):
        bounds = [truncate_to_locally_constant(FISH, K)[1] for K in (4, 6, 8, 10)]
        assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))

    def test_mixed_words_exact(self):
        pot, _ = truncate_to_locally_constant(FISH, 3)
        assert np.allclose(pot.value((0, 2, 0)), W0)

    def test_pure_words_take_tail(self):
        pot, _ = truncate_to_locally_constant(FISH, 6)
        assert np.allclose(pot.value((0,) * 6), [0.0, 0.0])

    def test_sup_distance_below_bound(self):
        K = 6
        pot, bound = truncate_to_locally_constant(FISH, K)
        rng = np.random.default_rng(5)
        for _ in range(3000):
            word = tuple(rng.integers(0, 4, 25).tolist())
            exact, _ = FISH.evaluate(word)
            assert np.linalg.norm(pot.value(word[:K]) - exact) <= bound + 1e-15

    def test_birkhoff_consistency(self):
        from locpress.shift import enumerate_periodic_orbits

        K = 6
        pot, bound = truncate_to_locally_constant(FISH, K)
        for orbit in enumerate_periodic_orbits(FULL4, 7):
            exact = FISH.birkhoff_average(orbit)
            table = pot.birkhoff_average(orbit)
            assert np.linalg.norm(exact - table) <= bound + 1e-12


class TestJointPotential:
    def test_stacking(self):
        jp = JointPotential(indicator(FULL2, (1, 1)), indicator(FULL2, (1,)))
        assert jp.dim == 2
        avg = jp.birkhoff_average(PeriodicOrbit((0, 1)))
        assert np.allclose(avg, [0.0, 0.5])
