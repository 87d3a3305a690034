from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbca_lab.errors import AlphabetError, ParameterError
from pbca_lab.markov import successor_distribution
from pbca_lab.ring import RingConfig, canonical_rotation, enumerate_binary
from pbca_lab.rules import ModelParams
from pbca_lab.simulate import batch_means_stderr, make_rng, random_ring, random_species_ring, run, step

from conftest import binary_rings, species_rings

MODELS = [ModelParams("pbca", 0.6), ModelParams("epbca1", 0.7, 0.2)]


def test_streams_are_reproducible_and_distinct():
    a = make_rng(5, 0).random(4)
    assert np.array_equal(a, make_rng(5, 0).random(4))
    assert not np.array_equal(a, make_rng(5, 1).random(4))
    assert not np.array_equal(a, make_rng(6, 0).random(4))


def test_run_equals_repeated_step():
    params = ModelParams("epbca1", 0.7, 0.3)
    x0 = RingConfig.parse("1101001110010100")
    rng = make_rng(11, 3)
    x, hops = x0, 0
    for _ in range(200):
        x, k = step(x, params, rng)
        hops += k
    stats = run(x0, params, 200, seed=11, stream=3, from_zero=True)
    assert stats.final == x
    assert stats.empirical_flux == pytest.approx(hops / (200 * x0.L), abs=1e-15)


def test_run_is_deterministic():
    params = ModelParams("pbca", 0.5)
    x0 = random_ring(20, 9, make_rng(1))
    a = run(x0, params, 1000, seed=3)
    b = run(x0, params, 1000, seed=3)
    assert a.to_json() == b.to_json()
    assert a.histogram == b.histogram


@settings(max_examples=30, deadline=None)
@given(binary_rings(min_L=3), st.integers(0, 2**32), st.sampled_from(MODELS))
def test_particle_number_is_conserved(x, seed, params):
    stats = run(x, params, 50, seed=seed, from_zero=True)
    assert stats.final.count(1) == x.count(1)
    assert 0 <= stats.empirical_flux <= min(x.count(1), x.count(0)) / x.L


@settings(max_examples=30, deadline=None)
@given(species_rings(), st.integers(0, 2**32))
def test_species_sequence_is_preserved_up_to_rotation(x, seed):
    params = ModelParams("epbca2", 0.6, 0.4)
    y = run(x, params, 60, seed=seed, from_zero=True).final
    word = lambda r: canonical_rotation(RingConfig(r.particle_sequence(), "0AB"))
    assert word(y) == word(x)


def test_frozen_and_full_rings_have_zero_flux():
    for text in ("0000", "1111"):
        stats = run(RingConfig.parse(text), ModelParams("pbca", 0.9), 100)
        assert stats.empirical_flux == 0.0
        assert stats.flux_stderr == 0.0


def test_alpha_one_is_deterministic_rule_184():
    stats = run(RingConfig.parse("1100"), ModelParams("pbca", 1.0), 10, from_zero=True)
    # 1100 -> 1010 -> 0101 -> 1010 ...: flux settles at 1/2
    assert stats.histogram == {"1010": 5, "0101": 5}


def test_step_law_from_1100():
    params = ModelParams("pbca", 0.3)
    rng = make_rng(42)
    n = 20000
    hits = Counter(str(step(RingConfig.parse("1100"), params, rng)[0]) for _ in range(n))
    assert set(hits) == {"1100", "1010"}
    assert abs(hits["1010"] / n - 0.3) < 4 * np.sqrt(0.21 / n)


def test_step_frequencies_match_successor_distribution():
    params = ModelParams("epbca1", 0.6, 0.3)
    x = RingConfig.parse("10100110")
    law = {str(y): p for y, p in successor_distribution(x, params)}
    rng = make_rng(7)
    n = 40000
    hits = Counter(str(step(x, params, rng)[0]) for _ in range(n))
    assert set(hits) <= set(law)
    for y, p in law.items():
        assert abs(hits[y] / n - p) < 5 * np.sqrt(p * (1 - p) / n) + 1e-12


def test_histogram_keys_by_space_and_coverage():
    space = enumerate_binary(6, 3)
    stats = run(space.configs[0], ModelParams("pbca", 0.5), 5000, seed=2, space=space)
    assert set(stats.histogram) == set(range(len(space)))
    assert sum(stats.histogram.values()) == 5000 - stats.burn_in
    csv = stats.histogram_csv().splitlines()
    assert csv[0] == "state,count"


def test_long_rings_skip_histogram():
    x0 = random_ring(100, 40, make_rng(0))
    stats = run(x0, ModelParams("pbca", 0.8), 300, seed=1)
    assert stats.histogram is None


def test_burn_in_default_and_validation():
    x0 = RingConfig.parse("0101")
    assert run(x0, ModelParams("pbca", 0.5), 100).burn_in == 10
    assert run(x0, ModelParams("pbca", 0.5), 100, from_zero=True).burn_in == 0
    with pytest.raises(ParameterError):
        run(x0, ModelParams("pbca", 0.5), 10, burn_in=10)


def test_alphabet_mismatch_rejected():
    with pytest.raises(AlphabetError):
        run(RingConfig.parse("0A0"), ModelParams("pbca", 0.5), 10)
    with pytest.raises(AlphabetError):
        run(RingConfig.parse("010"), ModelParams("epbca2", 0.5, 0.5), 10)


def test_random_rings_have_requested_counts():
    rng = make_rng(3)
    assert random_ring(10, 4, rng).count(1) == 4
    y = random_species_ring(10, 3, 2, rng)
    assert (y.count(1), y.count(2)) == (3, 2)


def test_batch_means_stderr_on_iid_data():
    rng = np.random.default_rng(0)
    x = rng.normal(size=64000)
    assert batch_means_stderr(x) == pytest.approx(1 / np.sqrt(64000), rel=0.35)
    assert batch_means_stderr(np.ones(100)) == 0.0


def test_stats_json_fields():
    stats = run(RingConfig.parse("0AB00"), ModelParams("epbca2", 0.5, 0.4), 100, seed=1)
    d = stats.to_dict()
    assert (d["mA"], d["mB"]) == (1, 1)
    assert {"flux", "flux_stderr", "density", "seed", "steps", "burn_in"} <= set(d)
