"""The two GKZ series behind the PBCA fundamental diagram.

With ``lam = 1/(1-alpha)`` the partition sum and the ``#10``-weighted sum of
PBCA are, up to a common factor,

    F1(lam) = sum_k lam**(k-1) / ((m-k)! (k-1)! k! (L-m-k)!)
    F0(lam) = sum_k lam**(k-1) / ((m-k)! (k-1)! (k-1)! (L-m-k)!)

for ``k = 1 .. min(m, L-m)``, so the finite-size flux is
``(alpha/L) F0/F1``.  F1 solves

    lam (1-lam) F1'' + ((L-3) lam + 2) F1' - (m-1)(L-m-1) F1 = 0

and the two series are linked by ``F0 = F1 + lam F1'`` and

    F0' = ((m-1)(L-m-1) F1 - (L-1) lam F1') / (1-lam).

Only this specific pair of series is implemented, not GKZ systems in general.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import factorial, lgamma

from .errors import ParameterError
from .flux import FluxPoint, flux_pbca

F1 = "F1"
F0 = "F0"


@dataclass(frozen=True)
class GkzSeries:
    """Value and first two derivatives of F1 or F0 at ``lam``.

    The true values are ``exp(log_scale)`` times ``value``, ``d1``, ``d2``;
    ``log_scale`` is 0 in exact (Fraction) mode.
    """

    role: str
    L: int
    m: int
    lam: object
    log_scale: float
    value: object
    d1: object
    d2: object

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def true_value(self) -> float:
        return math.exp(self.log_scale) * float(self.value)


def gkz_F(role: str, L: int, m: int, lam) -> GkzSeries:
    """Evaluate F1 (``role="F1"``) or F0 (``role="F0"``) and its derivatives.

    A Fraction ``lam`` gives exact rationals; otherwise terms are summed in
    log space and rescaled by the largest term.
    """
    if role not in (F1, F0):
        raise ParameterError(f"role must be 'F1' or 'F0', got {role!r}")
    if not 0 < m < L:
        raise ParameterError(f"need 0 < m < L, got L={L}, m={m}")
    if not lam > 0:
        raise ParameterError(f"need lam > 0, got {lam}")
    ks = range(1, min(m, L - m) + 1)
    last = (lambda k: k) if role == F1 else (lambda k: k - 1)
    if isinstance(lam, Fraction):
        val = d1 = d2 = Fraction(0)
        for k in ks:
            c = Fraction(1, factorial(m - k) * factorial(k - 1) * factorial(last(k))
                         * factorial(L - m - k))
            val += c * lam ** (k - 1)
            if k >= 2:
                d1 += c * (k - 1) * lam ** (k - 2)
            if k >= 3:
                d2 += c * (k - 1) * (k - 2) * lam ** (k - 3)
        return GkzSeries(role, L, m, lam, 0.0, val, d1, d2)
    lam = float(lam)
    log_lam = math.log(lam)
    dens = [(k, factorial(m - k) * factorial(k - 1) * factorial(last(k)) * factorial(L - m - k))
            for k in ks]
    if max(d for _, d in dens).bit_length() < 900 and (len(ks) - 1) * log_lam < 600:
        # everything fits in double range: sum directly, no rescaling
        terms = [(k, lam ** (k - 1) / d) for k, d in dens]
        val = math.fsum(t for _, t in terms)
        d1 = math.fsum((k - 1) * t for k, t in terms) / lam
        d2 = math.fsum((k - 1) * (k - 2) * t for k, t in terms) / lam ** 2
        return GkzSeries(role, L, m, lam, 0.0, val, d1, d2)
    logs = [(k, (k - 1) * log_lam - lgamma(m - k + 1) - lgamma(k) - lgamma(last(k) + 1)
             - lgamma(L - m - k + 1)) for k in ks]
    top = max(lt for _, lt in logs)
    terms = [(k, math.exp(lt - top)) for k, lt in logs]
    val = math.fsum(t for _, t in terms)
    d1 = math.fsum((k - 1) * t for k, t in terms) / lam
    d2 = math.fsum((k - 1) * (k - 2) * t for k, t in terms) / lam ** 2
    return GkzSeries(role, L, m, lam, top, val, d1, d2)


@dataclass(frozen=True)
class GkzResiduals:
    """Relative residuals of the F1/F0 identities at one ``(L, m, lam)``.

    ``neighbordel`` and ``plus_sign`` are ``None`` at ``lam = 1``.
    ``plus_sign`` is the derivative relation with ``+(L-1) lam/(1-lam)`` in
    place of the minus sign; it is reported for reference and is expected to
    be non-zero.  ``flux`` compares ``(alpha/L) F0/F1`` with the
    closed-form flux and is ``None`` unless ``lam > 1``.
    """

    L: int
    m: int
    lam: float
    ode: float
    neighbor: float
    neighbordel: float | None
    plus_sign: float | None
    flux: float | None

    def max_residual(self) -> float:
        vals = [self.ode, self.neighbor, self.neighbordel, self.flux]
        return max(v for v in vals if v is not None)


def _rel(lhs, rhs_terms):
    """``|lhs - sum(rhs)|`` over the sum of absolute magnitudes."""
    diff = lhs - sum(rhs_terms)
    scale = abs(lhs) + sum(abs(t) for t in rhs_terms)
    return float(abs(diff) / scale) if scale else 0.0


def gkz_check_identities(L: int, m: int, lam) -> GkzResiduals:
    """Residuals of the ODE, ``F0 = F1 + lam F1'``, the derivative relation
    and the flux identity, each relative to the magnitude of its terms.

    Values of F0 are brought to the scale of F1 before comparing.
    """
    f1 = gkz_F(F1, L, m, lam)
    f0 = gkz_F(F0, L, m, lam)
    lam = f1.lam
    shift = f0.log_scale - f1.log_scale
    k = math.exp(shift) if not f1.exact else 1
    v0, d0 = f0.value * k, f0.d1 * k
    F, dF, ddF = f1.value, f1.d1, f1.d2
    c = (m - 1) * (L - m - 1)

    ode = _rel(lam * (1 - lam) * ddF, [-((L - 3) * lam + 2) * dF, c * F])
    neighbor = _rel(v0, [F, lam * dF])
    neighbordel = plus = None
    if lam != 1:
        neighbordel = _rel(d0, [c * F / (1 - lam), -(L - 1) * lam * dF / (1 - lam)])
        plus = _rel(d0, [c * F / (1 - lam), (L - 1) * lam * dF / (1 - lam)])
    flux = None
    if lam > 1:
        alpha = 1 - 1 / lam
        via_series = alpha / L * v0 / F
        direct = flux_pbca(L, m, alpha).flux
        flux = float(abs(via_series - direct) / abs(direct))
    return GkzResiduals(L, m, float(lam), ode, neighbor, neighbordel, plus, flux)


def g1_roots(rho: float, alpha: float) -> tuple:
    """Both roots of ``lam(1-lam) g^2 + (lam/rho) g + 1 - 1/rho = 0``."""
    lam = 1 / (1 - alpha)
    a = lam * (1 - lam)
    b = lam / rho
    c = 1 - 1 / rho
    disc = b * b - 4 * a * c
    if disc < 0:
        raise ParameterError("no real root for g1")
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    return (q / a, c / q)


def gkz_limit(rho: float, alpha: float) -> FluxPoint:
    """Infinite-size PBCA flux from the leading coefficient ``g1`` of
    ``F1'/F1 = g1 m + O(1)``.

    Of the two roots only one gives a flux ``alpha rho lam g1`` inside
    ``[0, min(rho, 1-rho)]``; that one is used.
    """
    if not 0 < rho < 1 or not 0 < alpha < 1:
        raise ParameterError(f"need 0 < rho < 1 and 0 < alpha < 1, got {rho}, {alpha}")
    lam = 1 / (1 - alpha)
    cap = min(rho, 1 - rho)
    slack = 1e-12
    admissible = []
    for g in g1_roots(rho, alpha):
        q = alpha * rho * lam * g
        if -slack <= q <= cap + slack:
            admissible.append(q)
    assert len(admissible) == 1, "expected exactly one admissible g1 root"
    return FluxPoint(rho, min(max(admissible[0], 0.0), cap), "limit", "pbca", None, alpha, None)
