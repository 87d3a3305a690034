import csv
import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbca_lab.errors import ParameterError
from pbca_lab.flux import (CSV_HEADER, FluxPoint, fd_closed_form, fd_csv, fd_limit,
                           fd_monte_carlo, flux_epbca1, flux_epbca2, flux_epbca2_tally,
                           flux_exact_chain, flux_limit_pbca, flux_monte_carlo, flux_pbca,
                           worker_count)
from pbca_lab.ring import RingConfig, enumerate_binary, enumerate_species_reachable
from pbca_lab.rules import ModelParams


def test_hand_value_for_four_sites():
    assert flux_pbca(4, 2, 0.5).flux == 0.1875
    assert flux_pbca(4, 2, Fraction(1, 2)).flux == Fraction(3, 16)


@pytest.mark.parametrize("L,m", [(5, 2), (6, 3), (8, 3), (9, 5)])
def test_closed_form_matches_exact_chain(L, m):
    space = enumerate_binary(L, m)
    for model, a, b in (("pbca", 0.7, None), ("epbca1", 0.8, 0.1), ("epbca1", 0.4, 0.8)):
        params = ModelParams(model, a, b)
        chain = flux_exact_chain(space, params).flux
        closed = (flux_pbca(L, m, a) if model == "pbca" else flux_epbca1(L, m, a, b)).flux
        assert closed == pytest.approx(chain, rel=1e-11)


def test_epbca1_exact_mode_matches_chain_exactly():
    space = enumerate_binary(7, 4)
    a, b = Fraction(3, 4), Fraction(1, 3)
    assert flux_epbca1(7, 4, a, b).flux == flux_exact_chain(space, ModelParams("epbca1", a, b)).flux


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 40).flatmap(lambda L: st.tuples(st.just(L), st.integers(1, L - 1))),
       st.floats(0.05, 0.95))
def test_epbca1_with_equal_rates_is_pbca(Lm, a):
    L, m = Lm
    assert flux_epbca1(L, m, a, a).flux == pytest.approx(flux_pbca(L, m, a).flux, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 60).flatmap(lambda L: st.tuples(st.just(L), st.integers(1, L - 1))),
       st.floats(0.05, 0.95))
def test_pbca_particle_hole_symmetry(Lm, a):
    L, m = Lm
    assert flux_pbca(L, m, a).flux == pytest.approx(flux_pbca(L, L - m, a).flux, rel=1e-12)


@pytest.mark.parametrize("seed", ["AABAAB00", "AABA000", "A0BB0A00B"])
def test_epbca2_closed_forms_match_chain(seed):
    space = enumerate_species_reachable(RingConfig.parse(seed))
    params = ModelParams("epbca2", 0.3, 0.6)
    chain = flux_exact_chain(space, params).flux
    assert flux_epbca2(space, 0.3, 0.6).flux == pytest.approx(chain, rel=1e-11)
    mA, mB = space.counts
    # the flux does not depend on the particle sequence
    assert flux_epbca2_tally(space.L, mA, mB, 0.3, 0.6).flux == pytest.approx(chain, rel=1e-11)


def test_epbca2_without_b_is_pbca():
    f = flux_epbca2_tally(12, 5, 0, 0.6, 0.2).flux
    assert f == pytest.approx(flux_pbca(12, 5, 0.6).flux, rel=1e-12)


def test_large_ring_is_finite():
    f = flux_pbca(2000, 1000, 0.8).flux
    assert math.isfinite(f)
    assert abs(f - flux_limit_pbca(0.5, 0.8).flux) < 1e-3


def test_limit_properties():
    rhos = np.linspace(0.01, 0.99, 99)
    for a in (0.2, 0.5, 0.9):
        q = np.array([p.flux for p in fd_limit(a, rhos)])
        assert np.allclose(q, q[::-1], atol=1e-15)
        assert np.all(np.diff(q, 2) < 0)
        assert np.all(q <= np.minimum(rhos, 1 - rhos))
    assert flux_limit_pbca(0.0, 0.5).flux == 0.0
    assert flux_limit_pbca(0.5, 1.0).flux == 0.5
    with pytest.raises(ParameterError):
        flux_limit_pbca(1.5, 0.5)


def test_finite_size_flux_approaches_limit_monotonically():
    gaps = [flux_pbca(L, L // 2, 0.8).flux - 0.2763932022500210 for L in (50, 100, 200, 400)]
    assert all(g > 0 for g in gaps)
    assert gaps == sorted(gaps, reverse=True)


def test_monte_carlo_flux_near_chain():
    space = enumerate_binary(10, 4)
    params = ModelParams("epbca1", 0.6, 0.3)
    mc = flux_monte_carlo(space.configs[0], params, 50000, seed=5)
    exact = flux_exact_chain(space, params).flux
    assert abs(mc.flux - exact) < 4 * mc.stderr + 1e-3
    assert mc.provenance == "monte-carlo"


def test_sweeps_share_the_density_grid():
    closed = fd_closed_form("epbca2", 10, 0.3, 0.6, rho_b=0.3)
    mc = fd_monte_carlo("epbca2", 10, 0.3, 0.6, steps=2000, seed=1, rho_b=0.3)
    assert [p.density for p in closed] == [p.density for p in mc]
    assert all(p.rho_b == 0.3 for p in mc)
    again = fd_monte_carlo("epbca2", 10, 0.3, 0.6, steps=2000, seed=1, rho_b=0.3)
    assert [p.flux for p in again] == [p.flux for p in mc]


def test_thread_pool_gives_same_sweep(monkeypatch):
    monkeypatch.setenv("PCA_THREADS", "1")
    assert worker_count() == 1
    serial = fd_monte_carlo("pbca", 12, 0.5, steps=1000, seed=3)
    monkeypatch.setenv("PCA_THREADS", "4")
    threaded = fd_monte_carlo("pbca", 12, 0.5, steps=1000, seed=3)
    assert [p.flux for p in serial] == [p.flux for p in threaded]


def test_csv_layout():
    pts = fd_closed_form("pbca", 4, 0.5) + [flux_limit_pbca(0.5, 0.5)]
    rows = list(csv.reader(io.StringIO(fd_csv(pts))))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 5
    assert rows[-1][1] == "inf"
    assert rows[2][CSV_HEADER.index("flux")] == "0.1875"


def test_unknown_provenance_rejected():
    with pytest.raises(ParameterError):
        FluxPoint(0.5, 0.1, "guess")
