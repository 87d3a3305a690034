"""Seeded Monte Carlo simulation of the parallel-update models.

Random numbers come from a counter-based Philox generator keyed by
``(seed, stream)``.  Exactly one uniform variate is consumed per movable
particle, in ascending site order, and a particle hops when its variate is
below its hop probability.  :func:`run` and repeated :func:`step` calls on a
generator from :func:`make_rng` therefore produce the same trajectory.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import ParameterError
from .ring import BINARY, SPECIES, A, B, ConfigSpace, RingConfig
from .rules import ModelParams, apply_moves, movable_particles

__all__ = [
    "ModelParams",
    "SimStats",
    "make_rng",
    "random_ring",
    "random_species_ring",
    "step",
    "run",
]

_BUFFER = 1 << 16
_CODE_LIMIT = {BINARY: 62, SPECIES: 39}


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Philox generator for run ``stream`` under master ``seed``."""
    ss = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(ss))


def random_ring(L: int, m: int, rng: np.random.Generator) -> RingConfig:
    """Binary ring with ``m`` particles on uniformly chosen sites."""
    if not 0 <= m <= L:
        raise ParameterError(f"need 0 <= m <= L, got L={L}, m={m}")
    cells = np.zeros(L, dtype=np.int64)
    cells[rng.choice(L, size=m, replace=False)] = 1
    return RingConfig(tuple(cells.tolist()), BINARY)


def random_species_ring(L: int, mA: int, mB: int, rng: np.random.Generator) -> RingConfig:
    """Species ring with ``mA`` A's and ``mB`` B's on a uniform random arrangement."""
    if mA < 0 or mB < 0 or mA + mB > L:
        raise ParameterError(f"need mA, mB >= 0 and mA + mB <= L, got {mA}, {mB}, {L}")
    cells = np.array([A] * mA + [B] * mB + [0] * (L - mA - mB), dtype=np.int64)
    rng.shuffle(cells)
    return RingConfig(tuple(cells.tolist()), SPECIES)


def step(x: RingConfig, params: ModelParams, rng: np.random.Generator):
    """One parallel update.

    Returns
    -------
    y : RingConfig
        The successor configuration.
    moves : int
        Number of particles that hopped.
    """
    movers = movable_particles(x, params)
    if not movers:
        return x, 0
    u = rng.random(len(movers))
    hop = [j for (j, p), v in zip(movers, u) if v < float(p)]
    return apply_moves(x, hop), len(hop)


@njit(cache=True, nogil=True)
def _advance(cells, model, alpha, beta, start, stop, burn_in, u, pos,
             moves_out, codes_out, record, base):
    L = cells.shape[0]
    sites = np.empty(L, np.int64)
    probs = np.empty(L, np.float64)
    t = start
    while t < stop:
        if u.shape[0] - pos < L:
            break
        nm = 0
        for j in range(L):
            c = cells[j]
            if c != 0 and cells[(j + 1) % L] == 0:
                if model == 0:
                    p = alpha
                elif model == 1:
                    p = alpha if cells[(j + 2) % L] == 0 else beta
                else:
                    p = alpha if c == 1 else beta
                sites[nm] = j
                probs[nm] = p
                nm += 1
        moved = 0
        for i in range(nm):
            if u[pos] < probs[i]:
                sites[moved] = sites[i]
                moved += 1
            pos += 1
        # targets are empty in the current configuration, so in-place is safe
        for i in range(moved):
            j = sites[i]
            cells[(j + 1) % L] = cells[j]
            cells[j] = 0
        moves_out[t] = moved
        if record and t >= burn_in:
            code = 0
            for j in range(L):
                code = code * base + cells[j]
            codes_out[t - burn_in] = code
        t += 1
    return t, pos


@dataclass
class SimStats:
    """Summary of one simulation run.

    ``histogram`` maps state id (when a space was supplied) or configuration
    literal to visit count over the post-burn-in steps; it is ``None`` when
    the ring is too long to key configurations exactly.
    """

    model: str
    L: int
    counts: tuple
    alpha: float
    beta: float
    seed: int
    stream: int
    steps: int
    burn_in: int
    empirical_flux: float
    flux_stderr: float
    empirical_density: float
    histogram: dict | None = field(default=None, repr=False)
    final: RingConfig | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = {
            "model": self.model,
            "L": self.L,
        }
        if self.model == "epbca2":
            out["mA"], out["mB"] = self.counts
        else:
            out["m"] = self.counts[0]
        out.update(
            alpha=self.alpha,
            beta=self.beta,
            seed=self.seed,
            steps=self.steps,
            burn_in=self.burn_in,
            flux=self.empirical_flux,
            flux_stderr=self.flux_stderr,
            density=self.empirical_density,
        )
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def histogram_csv(self) -> str:
        lines = ["state,count"]
        for key in sorted(self.histogram, key=lambda k: (isinstance(k, str), k)):
            lines.append(f"{key},{self.histogram[key]}")
        return "\n".join(lines) + "\n"


def batch_means_stderr(samples: np.ndarray, n_batches: int = 32) -> float:
    """Standard error of the mean of a correlated series by batch means."""
    n = samples.shape[0]
    if n < 2 * n_batches:
        n_batches = max(n // 2, 1)
    if n_batches < 2:
        return 0.0
    size = n // n_batches
    means = samples[: size * n_batches].reshape(n_batches, size).mean(axis=1)
    return float(means.std(ddof=1) / np.sqrt(n_batches))


def run(x0: RingConfig, params: ModelParams, steps: int, burn_in: int | None = None,
        seed: int = 0, *, stream: int = 0, space: ConfigSpace | None = None,
        from_zero: bool = False, histogram: bool = True) -> SimStats:
    """Iterate :func:`step` ``steps`` times and collect statistics.

    Parameters
    ----------
    x0 : RingConfig
        Initial configuration.
    params : ModelParams
    steps : int
        Total number of parallel updates.
    burn_in : int, optional
        Updates discarded before averaging; defaults to 10 % of ``steps``.
    seed, stream : int
        Random stream key, see :func:`make_rng`.
    space : ConfigSpace, optional
        When given, histogram keys are state ids of this space.
    from_zero : bool
        Average from the first update (forces ``burn_in = 0``).
    histogram : bool
        Record visited configurations.

    Notes
    -----
    The empirical flux is the number of hops per site and per update,
    averaged over the updates after burn-in; ``flux_stderr`` is its batch
    means standard error.
    """
    params.check_alphabet(x0)
    steps = int(steps)
    if from_zero:
        burn_in = 0
    elif burn_in is None:
        burn_in = steps // 10
    burn_in = int(burn_in)
    if not steps > burn_in >= 0:
        raise ParameterError(f"need steps > burn_in >= 0, got steps={steps}, burn_in={burn_in}")
    L = x0.L
    base = len(x0.alphabet)
    record = histogram and L <= _CODE_LIMIT[x0.alphabet]

    rng = make_rng(seed, stream)
    cells = np.array(x0.cells, dtype=np.int64)
    moves = np.zeros(steps, dtype=np.int64)
    codes = np.zeros(steps - burn_in if record else 1, dtype=np.int64)
    u = rng.random(_BUFFER)
    pos = 0
    t = 0
    while t < steps:
        t, pos = _advance(cells, params.code, float(params.alpha), float(params.beta),
                          t, steps, burn_in, u, pos, moves, codes, record, base)
        if t < steps:
            u = np.concatenate([u[pos:], rng.random(_BUFFER)])
            pos = 0

    hist = None
    if record:
        values, freq = np.unique(codes, return_counts=True)
        decoded = [_decode(int(v), L, x0.alphabet) for v in values]
        if space is not None:
            hist = {space.index[x]: int(f) for x, f in zip(decoded, freq)}
        else:
            hist = {str(x): int(f) for x, f in zip(decoded, freq)}

    per_step = moves[burn_in:] / L
    if x0.is_binary:
        counts = (x0.count(1),)
    else:
        counts = (x0.count(A), x0.count(B))
    return SimStats(
        model=params.model,
        L=L,
        counts=counts,
        alpha=float(params.alpha),
        beta=float(params.beta),
        seed=int(seed),
        stream=int(stream),
        steps=steps,
        burn_in=burn_in,
        empirical_flux=float(per_step.mean()),
        flux_stderr=batch_means_stderr(per_step),
        empirical_density=sum(counts) / L,
        histogram=hist,
        final=RingConfig(tuple(cells.tolist()), x0.alphabet),
    )


def _decode(code: int, L: int, alphabet: str) -> RingConfig:
    base = len(alphabet)
    cells = [0] * L
    for j in range(L - 1, -1, -1):
        code, cells[j] = divmod(code, base)
    return RingConfig(tuple(cells), alphabet)
