"""Degeneracy diagnostics: DLP solve, the non-degeneracy count identity,
strict complementary slackness, dual uniqueness, and their equivalence on a
corpus of random discrete instances with a unique primal optimum."""

import json

import numpy as np
import pytest
from scipy.optimize import linprog

from olpce.degeneracy import (
    degeneracy_verdict,
    dlp_nondegeneracy_check,
    dual_uniqueness_check,
    make_degenerate_inventory,
    solve_dlp,
    strict_cs_check,
)
from olpce.distributions import (
    Discrete,
    GapMultisecretary,
    HyperCube,
    MultisecretaryBeta,
    TwoPointConsumption,
    UnitSquareShifted,
)
from olpce.errors import ConfigError, DimensionMismatch
from olpce.seeding import derive_seed, make_rng

# two unit-consumption atoms with rewards 1.0 and 0.5
TWO_ATOM = Discrete([[1.0], [1.0]], [1.0, 0.5], [0.5, 0.5])


def _random_instance(seed):
    rng = make_rng(seed)
    n = int(rng.integers(2, 6))
    m = int(rng.integers(1, 3))
    A = 0.5 + 1.5 * rng.random((n, m))
    R = 0.2 + rng.random(n)
    p = 0.2 + rng.random(n)
    p = p / p.sum()
    dist = Discrete(A, R, p)
    d = (0.2 + rng.random(m)) * (p @ A)
    return dist, d


def _primal_is_unique(dist, d, x_ref):
    """Re-solve with slightly perturbed rewards; a unique vertex is stable."""
    rng = make_rng(derive_seed("perturb", int(1e6 * float(np.sum(x_ref)))))
    weighted_a = dist.p[:, None] * dist.A
    for _ in range(3):
        tweak = 1.0 + 1e-7 * rng.random(dist.n_atoms)
        res = linprog(
            c=-dist.p * dist.R * tweak,
            A_ub=weighted_a.T,
            b_ub=np.atleast_1d(d),
            bounds=[(0.0, 1.0)] * dist.n_atoms,
            method="highs",
        )
        if not res.success or np.max(np.abs(res.x - x_ref)) > 1e-5:
            return False
    return True


# -- DLP solve --------------------------------------------------------------


def test_solve_dlp_point_values():
    sol = solve_dlp(TWO_ATOM, [0.75])
    assert sol.x == pytest.approx([1.0, 0.5])
    assert sol.lam[0] == pytest.approx(0.5)
    assert sol.primal_value == pytest.approx(0.625)
    assert sol.dual_value == pytest.approx(0.625)


def test_solve_dlp_abundant_and_empty():
    sol = solve_dlp(TWO_ATOM, [2.0])  # d >= total consumption: everything in
    assert sol.x == pytest.approx([1.0, 1.0])
    assert sol.lam[0] == 0.0
    assert sol.primal_value == pytest.approx(0.75)
    sol = solve_dlp(TWO_ATOM, [0.0])
    assert sol.x == pytest.approx([0.0, 0.0])
    assert sol.primal_value == pytest.approx(0.0)


def test_solve_dlp_m2():
    dist = Discrete(
        [[1.0, 0.5], [0.5, 1.0], [1.0, 1.0]], [1.0, 0.8, 0.4], [0.4, 0.4, 0.2]
    )
    sol = solve_dlp(dist, [0.3, 0.3])
    assert abs(sol.primal_value - sol.dual_value) <= 1e-7
    assert np.all(sol.x >= -1e-9) and np.all(sol.x <= 1.0 + 1e-9)
    load = (dist.p[:, None] * dist.A).T @ sol.x
    assert np.all(load <= np.array([0.3, 0.3]) + 1e-9)


def test_solve_dlp_requires_discrete():
    with pytest.raises(ConfigError):
        solve_dlp(MultisecretaryBeta(0.0), [0.5])
    with pytest.raises(DimensionMismatch):
        solve_dlp(TWO_ATOM, [0.5, 0.5])


# -- the three diagnostics on hand-built instances --------------------------


def test_nondegenerate_inventory_all_checks_true():
    verdict = degeneracy_verdict(TWO_ATOM, [0.75])
    assert verdict.dlp_nondegenerate
    assert verdict.strict_cs
    assert verdict.dual_unique
    assert verdict.nondeg_count == TWO_ATOM.n_atoms


def test_degenerate_inventory_all_checks_false():
    # d = 0.5 makes the top atom exactly fill the capacity: the constraint is
    # binding with the rejected atom priced exactly at its reward, and the
    # dual optimum is the whole segment [0.5, 1]
    verdict = degeneracy_verdict(TWO_ATOM, [0.5])
    assert not verdict.dlp_nondegenerate
    assert not verdict.strict_cs
    assert not verdict.dual_unique
    assert verdict.nondeg_count != TWO_ATOM.n_atoms


def test_count_identity_details():
    sol = solve_dlp(TWO_ATOM, [0.75])
    ok, count = dlp_nondegeneracy_check(sol, TWO_ATOM, [0.75])
    assert ok and count == 2  # one basic variable + one binding constraint
    sol = solve_dlp(TWO_ATOM, [0.5])
    ok, count = dlp_nondegeneracy_check(sol, TWO_ATOM, [0.5])
    assert not ok and count == 3  # both x at bounds plus a binding constraint


def test_strict_cs_continuous_families():
    # interior optimum with a strictly positive density: lam > 0, slack = 0
    assert strict_cs_check(MultisecretaryBeta(0.0), [0.5], [0.5])
    # UnitSquareShifted at d = E a: lam = 0 with zero slack fails strictness
    assert not strict_cs_check(UnitSquareShifted(), [1.5], [0.0])
    # redundant resource: huge d_i with lam_i = 0 keeps strictness intact
    dist = HyperCube(2)
    lam = np.array([0.4, 0.0])
    d = np.array([float(dist.consumption(lam)[0]), 10.0])
    assert strict_cs_check(dist, d, lam)


def test_dual_uniqueness_hand_instances():
    assert not dual_uniqueness_check(TwoPointConsumption(), [0.5])
    assert not dual_uniqueness_check(GapMultisecretary(), [0.5])
    assert dual_uniqueness_check(MultisecretaryBeta(0.0), [0.5])
    assert dual_uniqueness_check(GapMultisecretary(), [0.75])


def test_verdict_json_roundtrip():
    verdict = degeneracy_verdict(TWO_ATOM, [0.75])
    blob = json.loads(verdict.to_json())
    assert blob["dlp_nondegenerate"] is True
    assert blob["strict_cs"] is True
    assert blob["dual_unique"] is True
    assert blob["nondeg_count"] == 2


def test_continuous_verdict_has_no_count():
    verdict = degeneracy_verdict(MultisecretaryBeta(0.0), [0.5])
    assert verdict.nondeg_count == -1
    assert verdict.dlp_nondegenerate and verdict.strict_cs and verdict.dual_unique


# -- equivalence corpus -----------------------------------------------------


def test_diagnostics_agree_on_unique_primal_corpus():
    """On discrete instances with a perturbation-stable (unique) primal
    vertex the three diagnostics must return identical verdicts."""
    checked = 0
    for i in range(50):
        dist, d = _random_instance(derive_seed("degen-corpus", i))
        sol = solve_dlp(dist, d)
        assert abs(sol.primal_value - sol.dual_value) <= 1e-7  # strong duality
        if not _primal_is_unique(dist, d, sol.x):
            continue
        verdict = degeneracy_verdict(dist, d)
        assert verdict.dlp_nondegenerate == verdict.strict_cs == verdict.dual_unique, (
            f"instance {i}: {verdict}"
        )
        checked += 1
    assert checked >= 40  # the generator produces generic instances


# -- degenerate inventory construction --------------------------------------


def test_make_degenerate_inventory_values():
    assert make_degenerate_inventory(UnitSquareShifted(), [0.0])[0] == (
        pytest.approx(1.5)
    )
    assert make_degenerate_inventory(MultisecretaryBeta(0.0), [0.0])[0] == (
        pytest.approx(1.0)
    )
    # every reward is priced out on the first resource: demand vanishes
    d = make_degenerate_inventory(HyperCube(2), [1.0, 0.0])
    assert d == pytest.approx([0.0, 0.0], abs=1e-12)


def test_make_degenerate_inventory_breaks_strict_cs():
    for dist, lam in [
        (UnitSquareShifted(), [0.0]),
        (MultisecretaryBeta(0.0), [0.0]),
        (GapMultisecretary(), [0.0]),
        (HyperCube(2), [0.3, 0.0]),
    ]:
        d = make_degenerate_inventory(dist, lam)
        assert not strict_cs_check(dist, d, lam)


def test_make_degenerate_inventory_validates_lam():
    with pytest.raises(ConfigError):
        make_degenerate_inventory(UnitSquareShifted(), [0.5])  # no zero coordinate
    with pytest.raises(DimensionMismatch):
        make_degenerate_inventory(HyperCube(2), [0.0])
