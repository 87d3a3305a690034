"""Closed-form steady-state weights, configuration counts and their check
against exact stationary distributions.

Unnormalised weights depend on a configuration only through its local
pattern counts:

* PBCA: ``(1/(1-a))**#10``
* EPBCA1: ``(a(1-b)/((1-a)**2 b))**#100 * (a/((1-a) b))**#101``
* EPBCA2: ``(1-b)**(nB-kB) / (1-a)**(kA+nB) * (a/b)**nB``
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import comb, factorial

from .errors import ParameterError
from .markov import build_matrix, stationary
from .ring import ConfigSpace, RingConfig, count_10, count_100_101, tally_species
from .rules import ModelParams


@dataclass(frozen=True)
class ConjectureWeight:
    """Unnormalised weight as a natural log and, in exact mode, a rational."""

    log_weight: float
    rational_weight: Fraction | None = None

    @property
    def value(self):
        if self.rational_weight is not None:
            return self.rational_weight
        return math.exp(self.log_weight)


def _power_weight(factors) -> ConjectureWeight:
    """Weight ``prod base**exp`` from ``(base, exponent)`` pairs."""
    log_w = 0.0
    exact = all(isinstance(b, Fraction) for b, _ in factors)
    rational = Fraction(1) if exact else None
    for base, exponent in factors:
        if exponent:
            log_w += exponent * math.log(base)
            if exact:
                rational *= base ** exponent
    return ConjectureWeight(log_w, rational)


def pbca_ratio(alpha):
    """``lambda = 1/(1-alpha)``, the weight of one ``10`` pattern."""
    return 1 / (1 - alpha)


def epbca1_ratios(alpha, beta):
    """Weights of one ``100`` and one ``101`` pattern."""
    u = alpha * (1 - beta) / ((1 - alpha) ** 2 * beta)
    v = alpha / ((1 - alpha) * beta)
    return u, v


def weight_pbca(x: RingConfig, alpha) -> ConjectureWeight:
    p = ModelParams("pbca", alpha)
    p.require_interior()
    return _power_weight([(pbca_ratio(p.alpha), count_10(x))])


def weight_epbca1(x: RingConfig, alpha, beta) -> ConjectureWeight:
    p = ModelParams("epbca1", alpha, beta)
    p.require_interior()
    u, v = epbca1_ratios(p.alpha, p.beta)
    c100, c101 = count_100_101(x)
    return _power_weight([(u, c100), (v, c101)])


def weight_epbca2(x: RingConfig, alpha, beta) -> ConjectureWeight:
    p = ModelParams("epbca2", alpha, beta)
    p.require_interior()
    t = tally_species(x)
    a, b = p.alpha, p.beta
    return _power_weight([
        (1 - b, t.nB - t.kB),
        (1 / (1 - a), t.kA + t.nB),
        (a / b, t.nB),
    ])


def weight(x: RingConfig, params: ModelParams) -> ConjectureWeight:
    """Conjectured weight of ``x`` under ``params.model``."""
    if params.model == "pbca":
        return weight_pbca(x, params.alpha)
    if params.model == "epbca1":
        return weight_epbca1(x, params.alpha, params.beta)
    return weight_epbca2(x, params.alpha, params.beta)


def count_N_pbca(L: int, m: int, k: int) -> int:
    """Number of rings with ``L`` sites, ``m`` particles and ``#10 = k``."""
    if not 0 < m < L or not 1 <= k <= min(m, L - m):
        return 0
    num = L * factorial(m - 1) * factorial(L - m - 1)
    den = factorial(m - k) * factorial(k - 1) * factorial(k) * factorial(L - m - k)
    q, r = divmod(num, den)
    assert r == 0
    return q


def count_N_epbca1(L: int, m: int, k1: int, k2: int) -> int:
    """Number of rings with ``#100 = k1 >= 1`` and ``#101 = k2``.

    Returns 0 outside ``k1 >= 1, k2 >= 0, k1 + k2 <= m, 2 k1 + k2 <= L - m``.
    Rings with ``#100 = 0`` are counted by :func:`count_k1_zero_epbca1`.
    """
    if k1 < 1 or k2 < 0 or k1 + k2 > m or 2 * k1 + k2 > L - m or m < 1:
        return 0
    num = L * factorial(L - m - k1 - k2 - 1) * factorial(m - 1)
    den = (factorial(k1) * factorial(k2) * factorial(L - m - 2 * k1 - k2)
           * factorial(k1 - 1) * factorial(m - k1 - k2))
    q, r = divmod(num, den)
    assert r == 0
    return q


def count_k1_zero_epbca1(L: int, m: int) -> int:
    """Number of rings with ``#100 = 0``, i.e. every empty site isolated.

    All of them have ``#101 = L - m``.
    """
    if m < 1 or L - m > m:
        return 0
    holes = L - m
    q, r = divmod(L * comb(m, holes), m)
    assert r == 0
    return q


def _comp(n: int, k: int) -> int:
    """Compositions of ``n`` into ``k`` positive parts (1 for ``n = k = 0``)."""
    if n == 0 and k == 0:
        return 1
    if n < 1 or k < 1:
        return 0
    return comb(n - 1, k - 1)


def count_N_epbca2(kA: int, kB: int, nA: int, nB: int, mA: int, mB: int) -> int:
    """Relative number of configurations with the given species tally.

    Equals the gap-vector count ``C(mA,kA) comp(nA,kA) C(mB,kB) comp(nB,kB)``;
    the absolute count in a reachable space is this times a constant that
    depends only on the space and cancels in every normalised quantity.
    """
    if min(kA, kB, nA, nB, mA, mB) < 0 or kA > mA or kB > mB:
        return 0
    return comb(mA, kA) * _comp(nA, kA) * comb(mB, kB) * _comp(nB, kB)


@dataclass
class VerificationReport:
    """Largest relative gap between normalised weights and the exact chain."""

    model: str
    L: int
    counts: list
    params: dict
    max_rel_dev: float
    argmax_state: str
    n_states: int

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def normalized_weights(space: ConfigSpace, params: ModelParams) -> list:
    """Conjectured probabilities over ``space`` (exact when possible)."""
    ws = [weight(x, params) for x in space.configs]
    if all(w.rational_weight is not None for w in ws):
        total = sum((w.rational_weight for w in ws), Fraction(0))
        return [w.rational_weight / total for w in ws]
    top = max(w.log_weight for w in ws)
    vals = [math.exp(w.log_weight - top) for w in ws]
    total = math.fsum(vals)
    return [v / total for v in vals]


def verify_conjecture(space: ConfigSpace, params: ModelParams) -> VerificationReport:
    """Compare normalised conjecture weights with the exact stationary law."""
    params.require_interior()
    pi = stationary(build_matrix(space, params)).probabilities
    conj = normalized_weights(space, params)
    worst, arg = -1.0, 0
    for i, (p, q) in enumerate(zip(pi, conj)):
        if p == 0:
            raise ParameterError(f"state {space.configs[i]} is transient; no conjecture applies")
        dev = abs(q - p) / p
        dev = float(dev)
        if dev > worst:
            worst, arg = dev, i
    return VerificationReport(
        model=params.model,
        L=space.L,
        counts=list(space.counts),
        params={"alpha": str(params.alpha), "beta": str(params.beta)},
        max_rel_dev=worst,
        argmax_state=str(space.configs[arg]),
        n_states=len(space),
    )
