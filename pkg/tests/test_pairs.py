"""Pair encoding, energy measure, and the string coordinate change."""

import math

import numpy as np
import pytest

from chflow.errors import PairFormatError, SingularInterpolation
from chflow.pairs import (MeasureSpec, NonEventWarning, PeakonPair, StringData,
                          eval_u, exp_coefficients, from_string, mu_interval,
                          pair_from_json, pair_to_json, project_to_peakons,
                          reflect, to_string)


def test_eval_u_single_peakon():
    pair = PeakonPair([0.5], [2.0], [0.0])
    assert eval_u(pair, 0.5) == pytest.approx(2.0)
    assert eval_u(pair, 1.5) == pytest.approx(2.0 * math.exp(-1.0))
    assert eval_u(pair, -0.5) == pytest.approx(2.0 * math.exp(-1.0))


def test_eval_u_zero_pair():
    assert eval_u(PeakonPair.zero(), 1.0) == 0.0
    assert np.all(eval_u(PeakonPair.zero(), np.linspace(-1, 1, 5)) == 0.0)


def test_validation_rejects_bad_pairs():
    with pytest.raises(PairFormatError):
        PeakonPair([1.0, 0.0], [1.0, 1.0], [0.0, 0.0])
    with pytest.raises(PairFormatError):
        PeakonPair([0.0], [1.0], [-0.5])
    with pytest.raises(PairFormatError):
        PeakonPair([0.0, 1.0], [1.0], [0.0])


def test_exp_coefficients_reproduce_u():
    rng = np.random.default_rng(3)
    pair = PeakonPair(np.sort(rng.uniform(-2, 2, 5)), rng.uniform(-1, 1, 5),
                      np.zeros(5))
    A, B = exp_coefficients(pair)
    cuts = np.concatenate(([-4.0], pair.sites, [4.0]))
    for j in range(pair.n + 1):
        x = 0.5 * (cuts[j] + cuts[j + 1])
        assert A[j] * math.exp(x) + B[j] * math.exp(-x) == pytest.approx(
            eval_u(pair, x), abs=1e-13)


def test_energy_total_closed_form():
    # int u^2 + u'^2 dx = 2 sum_ij p_i p_j e^{-|x_i - x_j|}
    rng = np.random.default_rng(4)
    sites = np.sort(rng.uniform(-2, 2, 4))
    p = rng.uniform(-1, 1, 4)
    h = rng.uniform(0, 1, 4)
    pair = PeakonPair(sites, p, h)
    gram = np.exp(-np.abs(sites[:, None] - sites[None, :]))
    expected = 2.0 * p @ gram @ p + h.sum()
    assert mu_interval(pair, -np.inf, np.inf) == pytest.approx(expected)


def test_energy_subinterval_additive():
    pair = PeakonPair([-1.0, 1.0], [1.0, 0.5], [0.3, 0.0])
    total = mu_interval(pair, -np.inf, np.inf)
    split = (mu_interval(pair, -np.inf, 0.3) + mu_interval(pair, 0.3, np.inf))
    assert split == pytest.approx(total)
    # half-open convention: the atom at -1 belongs to the interval starting there
    assert mu_interval(pair, -1.0, -0.999) >= 0.3


def test_reflect_is_involution_and_mirrors_u():
    pair = PeakonPair([-0.5, 1.0], [1.0, -2.0], [0.1, 0.2])
    r = reflect(pair)
    assert reflect(r) == pair
    for x in (-1.3, 0.0, 2.1):
        assert eval_u(r, x) == pytest.approx(eval_u(pair, -x))


def test_string_single_peakon():
    p, y = 1.5, 0.4
    s = to_string(PeakonPair([y], [p], [0.0]), "minus")
    assert s.n == 1
    assert s.lengths[0] == pytest.approx(math.exp(y))
    assert s.values[0] == pytest.approx(-2.0 * p * math.exp(-y))
    assert s.masses[0] == 0.0


def test_string_masses_carry_atoms():
    s = to_string(PeakonPair([0.3], [0.0], [2.0]), "minus")
    assert s.masses[0] == pytest.approx(2.0 * math.exp(-0.3))


def test_string_round_trip_random():
    rng = np.random.default_rng(9)
    for _ in range(20):
        n = int(rng.integers(1, 7))
        pair = PeakonPair(np.sort(rng.uniform(-3, 3, n)) + np.arange(n) * 0.05,
                          rng.uniform(-2, 2, n), rng.uniform(0, 1, n))
        for side in ("minus", "plus"):
            back = from_string(to_string(pair, side))
            assert np.allclose(back.sites, pair.sites, atol=1e-12)
            assert np.allclose(back.weights, pair.weights, atol=1e-12)
            assert np.allclose(back.atoms, pair.atoms, atol=1e-12)


def test_from_string_merges_non_events():
    s = StringData("minus", [1.0, 1.0], [2.0, 2.0], [0.0, 0.5])
    with pytest.warns(NonEventWarning):
        pair = from_string(s)
    # the first event carries no step and no mass; only the second survives
    assert pair.n == 1
    assert pair.atoms[0] == pytest.approx(2.0 * 0.5)


def test_zero_pair_string_is_empty():
    assert to_string(PeakonPair.zero()).n == 0
    assert from_string(StringData.empty()) == PeakonPair.zero()


def test_project_recovers_exact_peakon_samples():
    pair = PeakonPair([-1.0, 0.5], [1.2, -0.7], [0.0, 0.0])
    # the sample grid must contain the kinks for the interpolated targets
    # to be exact
    x = np.sort(np.concatenate((np.linspace(-6, 6, 400), pair.sites)))
    out = project_to_peakons(x, eval_u(pair, x), None, 2,
                             nodes=pair.sites)
    assert np.allclose(out.weights, pair.weights, atol=1e-10)


def test_project_lumps_atoms_to_nearest_node():
    spec = MeasureSpec(atoms=((0.45, 0.8),))
    out = project_to_peakons(np.linspace(-2, 2, 50),
                             np.zeros(50), spec, 2, nodes=[-1.0, 0.5])
    assert out.atoms[1] == pytest.approx(0.8)
    with pytest.raises(SingularInterpolation):
        project_to_peakons([0.0, 1.0], [1.0, 1.0], None, 2, nodes=[0.5, 0.5])


def test_pair_json_round_trip():
    pair = PeakonPair([-1.0, 2.0], [0.5, -0.25], [0.0, 1.5])
    assert pair_from_json(pair_to_json(pair)) == pair


def test_pair_json_rejects_malformed():
    with pytest.raises(PairFormatError):
        pair_from_json("{not json")
    with pytest.raises(PairFormatError):
        pair_from_json({"peaks": [{"x": 0.0}]})
    with pytest.raises(PairFormatError):
        pair_from_json({"sites": []})
