"""Fundamental diagrams: closed-form finite-size flux, the infinite-size
PBCA limit, exact-chain and Monte Carlo estimates, and sweep/CSV helpers.

Large partition sums are accumulated in log space: every term is positive,
so terms are shifted by the largest log and summed with ``math.fsum``.
"""
from __future__ import annotations

import io
import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .conjecture import (count_k1_zero_epbca1, count_N_epbca1, count_N_epbca2,
                         count_N_pbca, epbca1_ratios, pbca_ratio, weight)
from .errors import ParameterError
from .markov import build_matrix, stationary
from .ring import ConfigSpace, RingConfig, tally_species
from .rules import ModelParams, movable_particles
from .simulate import make_rng, random_ring, random_species_ring, run

CSV_HEADER = ["model", "L", "alpha", "beta", "rho", "rhoA", "rhoB", "flux", "provenance", "stderr"]
PROVENANCES = ("monte-carlo", "exact-chain", "closed-form", "limit")


@dataclass(frozen=True)
class FluxPoint:
    """One point of a fundamental diagram.

    ``L`` is ``None`` for the infinite-size limit.  ``rho_a``/``rho_b`` are
    set for the two-species model only; ``stderr`` for Monte Carlo only.
    """

    density: float
    flux: float
    provenance: str
    model: str = "pbca"
    L: int | None = None
    alpha: float | None = None
    beta: float | None = None
    rho_a: float | None = None
    rho_b: float | None = None
    stderr: float | None = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ParameterError(f"unknown provenance {self.provenance!r}")

    def row(self) -> list:
        def fmt(v):
            return "" if v is None else repr(float(v))

        return [self.model, "inf" if self.L is None else str(self.L), fmt(self.alpha),
                fmt(self.beta), fmt(self.density), fmt(self.rho_a), fmt(self.rho_b),
                fmt(self.flux), self.provenance, fmt(self.stderr)]


def _log_ratio_sum(terms):
    """Given ``(log_weight, observable)`` pairs return ``sum(w*obs)/sum(w)``."""
    terms = list(terms)
    top = max(lw for lw, _ in terms)
    ws = [math.exp(lw - top) for lw, _ in terms]
    return math.fsum(w * o for w, (_, o) in zip(ws, terms)) / math.fsum(ws)


def _check_sizes(L, m):
    if not 0 < m < L:
        raise ParameterError(f"need 0 < m < L, got L={L}, m={m}")


def flux_pbca(L: int, m: int, alpha) -> FluxPoint:
    """Steady-state PBCA flux ``E[alpha #10] / L`` from the closed-form weights."""
    _check_sizes(L, m)
    p = ModelParams("pbca", alpha)
    p.require_interior()
    lam = pbca_ratio(p.alpha)
    ks = range(1, min(m, L - m) + 1)
    if p.exact:
        num = sum((k * count_N_pbca(L, m, k) * lam ** k for k in ks), Fraction(0))
        den = sum((count_N_pbca(L, m, k) * lam ** k for k in ks), Fraction(0))
        q = p.alpha * num / (L * den)
    else:
        log_lam = math.log(lam)
        q = p.alpha / L * _log_ratio_sum(
            (math.log(count_N_pbca(L, m, k)) + k * log_lam, k) for k in ks)
    return FluxPoint(m / L, q, "closed-form", "pbca", L, p.alpha, None)


def flux_epbca1(L: int, m: int, alpha, beta) -> FluxPoint:
    """Steady-state EPBCA1 flux ``E[alpha #100 + beta #101] / L``.

    Rings with ``#100 = 0`` are included through
    :func:`~pbca_lab.conjecture.count_k1_zero_epbca1`.
    """
    _check_sizes(L, m)
    if L < 3:
        raise ParameterError("epbca1 needs L >= 3")
    p = ModelParams("epbca1", alpha, beta)
    p.require_interior()
    a, b = p.alpha, p.beta
    u, v = epbca1_ratios(a, b)
    groups = []
    holes = L - m
    for k1 in range(1, holes // 2 + 1):
        for k2 in range(0, holes - 2 * k1 + 1):
            n = count_N_epbca1(L, m, k1, k2)
            if n:
                groups.append((n, k1, k2))
    n0 = count_k1_zero_epbca1(L, m)
    if n0:
        groups.append((n0, 0, holes))
    if p.exact:
        num = sum((n * u ** k1 * v ** k2 * (a * k1 + b * k2) for n, k1, k2 in groups), Fraction(0))
        den = sum((n * u ** k1 * v ** k2 for n, k1, k2 in groups), Fraction(0))
        q = num / (L * den)
    else:
        lu, lv = math.log(u), math.log(v)
        q = _log_ratio_sum(
            (math.log(n) + k1 * lu + k2 * lv, a * k1 + b * k2) for n, k1, k2 in groups) / L
    return FluxPoint(m / L, q, "closed-form", "epbca1", L, a, b)


def flux_epbca2(space: ConfigSpace, alpha, beta) -> FluxPoint:
    """Steady-state two-species flux by direct summation over ``space``."""
    p = ModelParams("epbca2", alpha, beta)
    p.require_interior()
    a, b = p.alpha, p.beta
    terms = []
    for x in space.configs:
        t = tally_species(x)
        terms.append((weight(x, p), a * t.kA + b * t.kB))
    if p.exact:
        num = sum((w.rational_weight * o for w, o in terms), Fraction(0))
        den = sum((w.rational_weight for w, _ in terms), Fraction(0))
        q = num / den / space.L
    else:
        q = _log_ratio_sum((w.log_weight, o) for w, o in terms) / space.L
    mA, mB = space.counts
    L = space.L
    return FluxPoint((mA + mB) / L, q, "closed-form", "epbca2", L, a, b, mA / L, mB / L)


def flux_epbca2_tally(L: int, mA: int, mB: int, alpha, beta) -> FluxPoint:
    """Two-species flux summed over species tallies instead of configurations.

    Tally ``(kA, kB, nA, nB)`` occurs in proportion to
    :func:`~pbca_lab.conjecture.count_N_epbca2`; the proportionality constant
    depends on the particle sequence only and cancels.  The result therefore
    depends on ``(L, mA, mB)`` and not on the order of the particles.
    """
    if mA < 0 or mB < 0 or mA + mB < 1 or mA + mB > L:
        raise ParameterError(f"need mA, mB >= 0 and 1 <= mA + mB <= L, got {mA}, {mB}, {L}")
    p = ModelParams("epbca2", alpha, beta)
    p.require_interior()
    a, b = p.alpha, p.beta
    zeros = L - mA - mB
    exact = p.exact
    terms = []
    for nA in range(zeros + 1):
        nB = zeros - nA
        for kA in range(min(nA, mA) + 1):
            for kB in range(min(nB, mB) + 1):
                n = count_N_epbca2(kA, kB, nA, nB, mA, mB)
                if not n:
                    continue
                if exact:
                    w = n * (1 - b) ** (nB - kB) / (1 - a) ** (kA + nB) * (a / b) ** nB
                else:
                    w = (math.log(n) + (nB - kB) * math.log(1 - b)
                         - (kA + nB) * math.log(1 - a) + nB * math.log(a / b))
                terms.append((w, a * kA + b * kB))
    if exact:
        q = sum((w * o for w, o in terms), Fraction(0)) / sum((w for w, _ in terms), Fraction(0)) / L
    else:
        q = _log_ratio_sum(terms) / L
    return FluxPoint((mA + mB) / L, q, "closed-form", "epbca2", L, a, b, mA / L, mB / L)


def flux_limit_pbca(rho, alpha) -> FluxPoint:
    """Infinite-size PBCA flux ``(1 - sqrt(1 - 4 alpha rho (1-rho))) / 2``."""
    rho = float(rho)
    alpha = float(alpha)
    if not 0 <= rho <= 1 or not 0 <= alpha <= 1:
        raise ParameterError(f"need rho, alpha in [0, 1], got {rho}, {alpha}")
    # 1 - 4 a r (1-r) rewritten without cancellation near rho = 1/2
    disc = (1 - 2 * rho) ** 2 + 4 * (1 - alpha) * rho * (1 - rho)
    # product of the two roots of Q^2 - Q + a r (1-r) is a r (1-r)
    q = alpha * rho * (1 - rho) / (0.5 * (1 + math.sqrt(disc)))
    return FluxPoint(rho, q, "limit", "pbca", None, alpha, None)


def flux_exact_chain(space: ConfigSpace, params: ModelParams) -> FluxPoint:
    """Flux from the exact stationary law: expected hops per site per update."""
    pi = stationary(build_matrix(space, params)).probabilities
    total = 0
    for x, p in zip(space.configs, pi):
        total += p * sum((q for _, q in movable_particles(x, params)), 0)
    L = space.L
    rho = sum(space.counts) / L
    rho_a = rho_b = None
    if params.model == "epbca2":
        rho_a, rho_b = space.counts[0] / L, space.counts[1] / L
    beta = None if params.model == "pbca" else params.beta
    return FluxPoint(rho, total / L, "exact-chain", params.model, L, params.alpha, beta,
                     rho_a, rho_b)


def flux_monte_carlo(x0: RingConfig, params: ModelParams, steps: int, seed: int, *,
                     stream: int = 0, burn_in: int | None = None,
                     from_zero: bool = True) -> FluxPoint:
    """Flux estimate from one seeded simulation run, with batch-means error."""
    stats = run(x0, params, steps, burn_in, seed, stream=stream, from_zero=from_zero,
                histogram=False)
    L = x0.L
    rho_a = rho_b = None
    if params.model == "epbca2":
        rho_a, rho_b = stats.counts[0] / L, stats.counts[1] / L
    beta = None if params.model == "pbca" else params.beta
    return FluxPoint(stats.empirical_density, stats.empirical_flux, "monte-carlo",
                     params.model, L, params.alpha, beta, rho_a, rho_b, stats.flux_stderr)


def worker_count() -> int:
    """Worker pool size, capped by the ``PCA_THREADS`` environment variable."""
    cap = os.environ.get("PCA_THREADS")
    n = os.cpu_count() or 1
    if cap:
        n = max(1, min(n, int(cap)))
    return n


def _pool_map(fn, items):
    items = list(items)
    workers = worker_count()
    if workers == 1 or len(items) < 2:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def fd_closed_form(model: str, L: int, alpha, beta=None, *, rho_b: float | None = None) -> list:
    """Closed-form sweep over every particle number ``m = 1 .. L-1``.

    For ``epbca2`` the B density is held at ``rho_b`` and the number of A
    particles runs over ``0 .. L - 1 - mB``; without ``rho_b`` the full
    ``(mA, mB)`` surface is returned.
    """
    if model == "pbca":
        return [flux_pbca(L, m, alpha) for m in range(1, L)]
    if model == "epbca1":
        return [flux_epbca1(L, m, alpha, beta) for m in range(1, L)]
    if model == "epbca2":
        return [flux_epbca2_tally(L, mA, mB, alpha, beta) for mA, mB in _species_grid(L, rho_b)]
    raise ParameterError(f"unknown model {model!r}")


def _species_grid(L, rho_b):
    if rho_b is None:
        return [(mA, mB) for mB in range(L) for mA in range(L - mB) if mA + mB >= 1]
    mB = round(rho_b * L)
    return [(mA, mB) for mA in range(L - mB) if mA + mB >= 1]


def fd_monte_carlo(model: str, L: int, alpha, beta=None, *, steps: int = 50_000, seed: int = 0,
                   rho_b: float | None = None, burn_in: int | None = None) -> list:
    """Monte Carlo sweep on the same grid as :func:`fd_closed_form`.

    Grid point ``i`` uses random stream ``i`` both for its random initial
    configuration and for its dynamics, so sweeps are reproducible and the
    points are independent.  Averages start at the first update unless
    ``burn_in`` is given.
    """
    from_zero = burn_in is None
    if model == "epbca2":
        params = ModelParams(model, alpha, beta)
        grid = _species_grid(L, rho_b)

        def job(item):
            i, (mA, mB) = item
            x0 = random_species_ring(L, mA, mB, make_rng(seed, 2 * i + 1))
            return flux_monte_carlo(x0, params, steps, seed, stream=2 * i, burn_in=burn_in,
                                    from_zero=from_zero)
    else:
        params = ModelParams(model, alpha, beta)
        grid = range(1, L)

        def job(item):
            i, m = item
            x0 = random_ring(L, m, make_rng(seed, 2 * i + 1))
            return flux_monte_carlo(x0, params, steps, seed, stream=2 * i, burn_in=burn_in,
                                    from_zero=from_zero)
    return _pool_map(job, enumerate(grid))


def fd_limit(alpha, rhos) -> list:
    """Infinite-size PBCA curve sampled at ``rhos``."""
    return [flux_limit_pbca(r, alpha) for r in rhos]


def fd_csv(points) -> str:
    """CSV text with the stable header ``CSV_HEADER``."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for p in points:
        writer.writerow(p.row())
    return buf.getvalue()
