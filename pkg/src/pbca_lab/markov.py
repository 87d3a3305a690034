"""Exact transition matrices, stationary distributions and rotation lumping.

Probabilities stay exact when the model parameters are Fractions; with
floats everything runs in double precision.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import gcd

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import CapacityError, ClosureError, ErgodicityError, LumpabilityError
from .ring import ConfigSpace, RingConfig, canonical_rotation
from .rules import ModelParams, apply_moves, movable_particles

DENSE_LIMIT = 4096
MAX_MOVERS = 62


def successor_distribution(x: RingConfig, params: ModelParams) -> list:
    """All one-step successors of ``x`` with their probabilities.

    Each subset of the movable particles fires with the product of hop
    probabilities of its members and stay probabilities of the rest.
    """
    movers = movable_particles(x, params)
    if len(movers) > MAX_MOVERS:
        raise CapacityError(f"{len(movers)} movable particles is beyond enumeration")
    one = Fraction(1) if params.exact else 1.0
    out = {}
    for choice in product((False, True), repeat=len(movers)):
        prob = one
        sites = []
        for (j, p), hop in zip(movers, choice):
            if hop:
                prob *= p
                sites.append(j)
            else:
                prob *= one - p
        y = apply_moves(x, sites)
        # distinct subsets give distinct successors
        assert y not in out
        out[y] = prob
    return list(out.items())


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic matrix over a configuration space.

    ``rows[i]`` lists ``(j, probability)`` pairs with positive probability.
    """

    space: ConfigSpace
    params: ModelParams | None
    rows: tuple

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def exact(self) -> bool:
        return any(isinstance(p, Fraction) for row in self.rows for _, p in row)

    def to_dense(self) -> np.ndarray:
        P = np.zeros((self.n, self.n))
        for i, row in enumerate(self.rows):
            for j, p in row:
                P[i, j] += float(p)
        return P

    def to_sparse(self) -> sp.csr_matrix:
        r, c, v = [], [], []
        for i, row in enumerate(self.rows):
            for j, p in row:
                r.append(i)
                c.append(j)
                v.append(float(p))
        return sp.csr_matrix((v, (r, c)), shape=(self.n, self.n))

    def entry(self, i: int, j: int):
        return sum((p for k, p in self.rows[i] if k == j), 0)

    def row_sums(self) -> list:
        return [sum((p for _, p in row), 0) for row in self.rows]

    def coo_csv(self) -> str:
        lines = ["row,col,prob"]
        for i, row in enumerate(self.rows):
            for j, p in row:
                lines.append(f"{i},{j},{p}")
        return "\n".join(lines) + "\n"


def build_matrix(space: ConfigSpace, params: ModelParams) -> TransitionMatrix:
    """Transition matrix of ``params.model`` restricted to ``space``."""
    rows = []
    for x in space.configs:
        row = []
        for y, p in successor_distribution(x, params):
            if p == 0:
                continue
            j = space.index.get(y)
            if j is None:
                raise ClosureError(f"{x} -> {y} leaves the configuration space")
            row.append((j, p))
        row.sort()
        rows.append(tuple(row))
    return TransitionMatrix(space, params, tuple(rows))


@dataclass(frozen=True)
class StationaryDist:
    """Stationary vector over state ids and its residual ``max|pi P - pi|``."""

    probabilities: tuple
    residual: float

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.probabilities])

    def csv(self, space: ConfigSpace) -> str:
        lines = ["state,probability"]
        for x, p in zip(space.configs, self.probabilities):
            lines.append(f"{x},{p}")
        return "\n".join(lines) + "\n"


def _recurrent_class(mat: TransitionMatrix) -> np.ndarray:
    """Members of the unique closed communicating class; raises otherwise."""
    n = mat.n
    if n == 1:
        return np.array([0])
    pattern = mat.to_sparse()
    pattern.data[:] = 1.0
    n_scc, labels = connected_components(pattern, directed=True, connection="strong")
    closed = np.ones(n_scc, dtype=bool)
    coo = pattern.tocoo()
    leaving = labels[coo.row] != labels[coo.col]
    closed[np.unique(labels[coo.row[leaving]])] = False
    n_closed = int(closed.sum())
    if n_closed != 1:
        raise ErgodicityError(
            f"chain has {n_closed} closed communicating classes among {n_scc} "
            "strongly connected components; the stationary law is not unique"
        )
    members = np.flatnonzero(labels == np.flatnonzero(closed)[0])
    period = _period(mat, members)
    if period != 1:
        raise ErgodicityError(f"recurrent class is periodic with period {period}")
    return members


def _period(mat: TransitionMatrix, members: np.ndarray) -> int:
    inside = set(members.tolist())
    root = int(members[0])
    level = {root: 0}
    frontier = [root]
    g = 0
    while frontier:
        nxt = []
        for i in frontier:
            for j, _ in mat.rows[i]:
                if j not in inside:
                    continue
                if j in level:
                    g = gcd(g, level[i] + 1 - level[j])
                else:
                    level[j] = level[i] + 1
                    nxt.append(j)
        frontier = nxt
    return g or 1


def stationary(mat: TransitionMatrix) -> StationaryDist:
    """Unique stationary distribution of ``mat``.

    Uses exact Gaussian elimination for rational matrices, a dense solve with
    the normalisation row for up to ``DENSE_LIMIT`` states, and power
    iteration beyond that.

    Raises
    ------
    ErgodicityError
        If there is not exactly one closed class or that class is periodic.
    """
    _recurrent_class(mat)
    if mat.exact:
        pi = _solve_exact(mat)
        residual = _residual(mat, pi)
        return StationaryDist(tuple(pi), float(residual))
    if mat.n <= DENSE_LIMIT:
        P = mat.to_dense()
        M = P.T - np.eye(mat.n)
        M[-1, :] = 1.0
        rhs = np.zeros(mat.n)
        rhs[-1] = 1.0
        pi = np.linalg.solve(M, rhs)
        pi = np.clip(pi, 0.0, None)
        pi /= pi.sum()
    else:
        pi = _power_iteration(mat.to_sparse())
    return StationaryDist(tuple(pi.tolist()), float(_residual(mat, pi)))


def _power_iteration(P: sp.csr_matrix, tol: float = 1e-13, maxiter: int = 1_000_000) -> np.ndarray:
    PT = P.T.tocsr()
    pi = np.full(P.shape[0], 1.0 / P.shape[0])
    prev_delta = np.inf
    for _ in range(maxiter):
        new = PT @ pi
        new /= new.sum()
        delta = np.abs(new - pi).max()
        if delta <= tol:
            return new
        if delta >= prev_delta and delta > 1e3 * tol:
            # oscillation guard: a Cesaro average damps any periodic component
            new = 0.5 * (new + pi)
        prev_delta = delta
        pi = new
    raise ErgodicityError("power iteration did not converge")


def _solve_exact(mat: TransitionMatrix) -> list:
    n = mat.n
    # equations: sum_i pi_i (P_ij - delta_ij) = 0 for j < n-1, sum_i pi_i = 1
    eqs = [dict() for _ in range(n)]
    for i, row in enumerate(mat.rows):
        for j, p in row:
            if j < n - 1:
                eqs[j][i] = eqs[j].get(i, Fraction(0)) + p
    for j in range(n - 1):
        eqs[j][j] = eqs[j].get(j, Fraction(0)) - 1
    eqs[n - 1] = {i: Fraction(1) for i in range(n)}
    rhs = [Fraction(0)] * (n - 1) + [Fraction(1)]

    order = []
    pending = list(range(n))
    for col in range(n):
        pivot = min((r for r in pending if eqs[r].get(col)), key=lambda r: len(eqs[r]), default=None)
        if pivot is None:
            raise ErgodicityError("singular stationary system")
        pending.remove(pivot)
        order.append((col, pivot))
        prow = eqs[pivot]
        pval = prow[col]
        for r in pending:
            f = eqs[r].get(col)
            if not f:
                continue
            f = f / pval
            row = eqs[r]
            for k, v in prow.items():
                nv = row.get(k, Fraction(0)) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            rhs[r] -= f * rhs[pivot]
    pi = [Fraction(0)] * n
    for col, pivot in reversed(order):
        row = eqs[pivot]
        acc = rhs[pivot] - sum((v * pi[k] for k, v in row.items() if k != col), Fraction(0))
        pi[col] = acc / row[col]
    return pi


def _residual(mat: TransitionMatrix, pi) -> float:
    acc = [0] * mat.n
    for i, row in enumerate(mat.rows):
        for j, p in row:
            acc[j] += pi[i] * p
    return max(abs(float(a - b)) for a, b in zip(acc, pi))


def lump_by_rotation(mat: TransitionMatrix, tol: float = 1e-12) -> TransitionMatrix:
    """Quotient chain over rotation classes.

    The row of a class is the row of its representative summed over target
    classes; every other member must give the same sums.

    Raises
    ------
    LumpabilityError
        If the space is not closed under rotation or row masses differ.
    """
    space = mat.space
    if not space.is_rotation_closed():
        raise LumpabilityError("space is not closed under rotation")
    cls = space.class_of
    lumped_space = ConfigSpace.from_configs(space.representatives)
    rows = []
    for ci, members in enumerate(space.classes):
        sums = []
        for i in members:
            acc = {}
            for j, p in mat.rows[i]:
                acc[cls[j]] = acc.get(cls[j], 0) + p
            sums.append(acc)
        ref = sums[0]
        for other in sums[1:]:
            keys = set(ref) | set(other)
            if any(abs(float(ref.get(k, 0) - other.get(k, 0))) > tol for k in keys):
                raise LumpabilityError(f"class {space.representatives[ci]} is not lumpable")
        rows.append(tuple(sorted(ref.items())))
    return TransitionMatrix(lumped_space, mat.params, tuple(rows))


def stationary_class_vector(lumped: TransitionMatrix, reference: int | None = None,
                            value=1) -> list:
    """Stationary vector of a lumped chain, optionally rescaled so that class
    ``reference`` carries ``value``."""
    pi = list(stationary(lumped).probabilities)
    if reference is None:
        return pi
    scale = value / pi[reference]
    return [p * scale for p in pi]


def class_masses(space: ConfigSpace, pi) -> list:
    """Sum a per-state vector over rotation classes."""
    return [sum((pi[i] for i in members), 0) for members in space.classes]


def representative_class(space: ConfigSpace, x: RingConfig | str) -> int:
    """Index of the rotation class of ``x`` in ``space`` (any member works)."""
    if isinstance(x, str):
        x = RingConfig.parse(x, space.alphabet)
    rep = canonical_rotation(x)
    return space.representatives.index(rep)
