"""Cyclic configurations, local pattern counts and configuration spaces.

A ring is stored as a tuple of small integers.  Binary rings use ``0``/``1``;
species rings use ``0`` (empty), ``1`` (particle A) and ``2`` (particle B).
Text literals read left to right starting at site 1, e.g. ``"0011"`` or
``"00AABAAB"``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .errors import AlphabetError, ParameterError, UndefinedTallyError

BINARY = "01"
SPECIES = "0AB"

EMPTY, A, B = 0, 1, 2


@dataclass(frozen=True)
class RingConfig:
    """A configuration on a periodic ring of ``L`` sites.

    Parameters
    ----------
    cells : tuple of int
        Site values, site 1 first.
    alphabet : str
        ``BINARY`` (``"01"``) or ``SPECIES`` (``"0AB"``).
    """

    cells: tuple
    alphabet: str = BINARY

    def __post_init__(self):
        if self.alphabet not in (BINARY, SPECIES):
            raise AlphabetError(f"unknown alphabet {self.alphabet!r}")
        cells = tuple(int(c) for c in self.cells)
        if not cells:
            raise ParameterError("a ring needs at least one site")
        top = len(self.alphabet)
        if any(c < 0 or c >= top for c in cells):
            raise AlphabetError(f"cell value outside alphabet {self.alphabet!r}")
        object.__setattr__(self, "cells", cells)

    @classmethod
    def parse(cls, text: str, alphabet: str | None = None) -> "RingConfig":
        """Build a ring from a literal such as ``"0101"`` or ``"0AAB0"``.

        Without an explicit alphabet, a literal containing ``A`` or ``B`` is a
        species ring and anything else is binary.
        """
        text = text.strip()
        if alphabet is None:
            alphabet = SPECIES if set(text) & {"A", "B"} else BINARY
        try:
            cells = tuple(alphabet.index(ch) for ch in text)
        except ValueError:
            raise AlphabetError(f"{text!r} is not a word over {alphabet!r}") from None
        return cls(cells, alphabet)

    def __str__(self) -> str:
        return "".join(self.alphabet[c] for c in self.cells)

    def __repr__(self) -> str:
        return f"RingConfig({str(self)!r})"

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def L(self) -> int:
        return len(self.cells)

    @property
    def is_binary(self) -> bool:
        return self.alphabet == BINARY

    @property
    def code(self) -> int:
        """Positional integer code; ordering of codes is lexicographic order."""
        base = len(self.alphabet)
        value = 0
        for c in self.cells:
            value = value * base + c
        return value

    def count(self, value: int) -> int:
        return self.cells.count(value)

    def rotate(self, shift: int) -> "RingConfig":
        """Rotate left by ``shift`` sites (site ``shift+1`` becomes site 1)."""
        s = shift % self.L
        return RingConfig(self.cells[s:] + self.cells[:s], self.alphabet)

    def particle_sequence(self) -> tuple:
        """Particle labels read around the ring, starting at site 1."""
        return tuple(c for c in self.cells if c != EMPTY)


def _require_binary(x: RingConfig) -> None:
    if not x.is_binary:
        raise AlphabetError(f"{x} is a species ring; a binary ring is required")


def count_10(x: RingConfig) -> int:
    """Number of cyclic ``10`` patterns."""
    _require_binary(x)
    c = x.cells
    L = len(c)
    return sum(1 for j in range(L) if c[j] == 1 and c[(j + 1) % L] == 0)


def count_100_101(x: RingConfig) -> tuple[int, int]:
    """Numbers of cyclic ``100`` and ``101`` patterns."""
    _require_binary(x)
    c = x.cells
    L = len(c)
    if L < 3:
        raise ParameterError("100/101 patterns need L >= 3")
    c100 = c101 = 0
    for j in range(L):
        if c[j] == 1 and c[(j + 1) % L] == 0:
            if c[(j + 2) % L] == 0:
                c100 += 1
            else:
                c101 += 1
    return c100, c101


@dataclass(frozen=True)
class SpeciesTally:
    """Local-pattern tally of a species ring.

    ``kA``/``kB`` count ``A0``/``B0`` patterns, ``nA``/``nB`` count empty
    sites whose nearest particle to the left is A/B, and ``mA``/``mB`` are the
    particle numbers.
    """

    kA: int
    kB: int
    nA: int
    nB: int
    mA: int
    mB: int


def tally_species(x: RingConfig) -> SpeciesTally:
    """Tally ``A0``/``B0`` patterns and the empty sites owned by each species.

    Every maximal run of empty sites belongs to the particle on its left.
    For ``BAAA00A0B0BB00A000`` this gives ``kA=3, kB=2``; the values 5 and
    4 sometimes quoted for that ring are ``mA`` and ``mB``.
    """
    if x.is_binary:
        raise AlphabetError(f"{x} is binary; a species ring is required")
    c = x.cells
    L = len(c)
    mA = c.count(A)
    mB = c.count(B)
    if mA + mB == 0:
        raise UndefinedTallyError("an all-empty ring has no particle to own its empty sites")
    kA = kB = nA = nB = 0
    # start right after some particle so every run is seen with its owner
    start = next(j for j in range(L) if c[j] != EMPTY)
    owner = c[start]
    for step in range(1, L + 1):
        v = c[(start + step) % L]
        if v == EMPTY:
            if owner == A:
                nA += 1
            else:
                nB += 1
        else:
            owner = v
    for j in range(L):
        if c[(j + 1) % L] == EMPTY:
            if c[j] == A:
                kA += 1
            elif c[j] == B:
                kB += 1
    return SpeciesTally(kA, kB, nA, nB, mA, mB)


def rotations(x: RingConfig) -> list[RingConfig]:
    """All ``L`` left rotations of ``x`` (with repetitions for periodic rings)."""
    return [x.rotate(s) for s in range(x.L)]


def canonical_rotation(x: RingConfig) -> RingConfig:
    """Lexicographically smallest rotation (0 < 1, 0 < A < B)."""
    c = x.cells
    L = len(c)
    best = min(range(L), key=lambda s: c[s:] + c[:s])
    return x.rotate(best)


def orbit(x: RingConfig) -> list[RingConfig]:
    """Distinct rotations of ``x``, starting with ``x`` and shifting left."""
    seen = []
    found = set()
    for s in range(x.L):
        y = x.rotate(s)
        if y.cells in found:
            break
        found.add(y.cells)
        seen.append(y)
    return seen


@dataclass(frozen=True)
class ConfigSpace:
    """An ordered, duplicate-free set of ring configurations.

    State ids are list positions.  Configurations are grouped by rotation
    class; classes are ordered by their representative (the canonical
    rotation) and members within a class by successive left rotation of the
    representative, as far as they lie in the space.
    """

    configs: tuple
    L: int
    counts: tuple
    index: dict = field(repr=False, compare=False)
    classes: tuple = field(repr=False, compare=False)
    representatives: tuple = field(repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.configs)

    def __iter__(self):
        return iter(self.configs)

    def __contains__(self, x: RingConfig) -> bool:
        return x in self.index

    def id_of(self, x: RingConfig | str) -> int:
        if isinstance(x, str):
            x = RingConfig.parse(x, self.alphabet)
        return self.index[x]

    @property
    def alphabet(self) -> str:
        return self.configs[0].alphabet

    @property
    def class_of(self) -> list[int]:
        """Class index for every state id."""
        out = [0] * len(self.configs)
        for ci, members in enumerate(self.classes):
            for i in members:
                out[i] = ci
        return out

    def class_index(self, x: RingConfig | str) -> int:
        """Class index of the rotation class containing ``x``."""
        return self.class_of[self.id_of(x)]

    def is_rotation_closed(self) -> bool:
        return all(y in self.index for x in self.configs for y in orbit(x))

    @classmethod
    def from_configs(cls, configs: Iterable[RingConfig]) -> "ConfigSpace":
        pool = set(configs)
        if not pool:
            raise ParameterError("empty configuration space")
        reps = sorted({canonical_rotation(x) for x in pool}, key=lambda r: r.cells)
        ordered = []
        classes = []
        for rep in reps:
            members = [y for y in orbit(rep) if y in pool]
            classes.append(tuple(range(len(ordered), len(ordered) + len(members))))
            ordered.extend(members)
        first = ordered[0]
        Ls = {x.L for x in ordered}
        alphabets = {x.alphabet for x in ordered}
        if len(Ls) != 1 or len(alphabets) != 1:
            raise ParameterError("configurations differ in length or alphabet")
        if first.is_binary:
            counts = (first.count(1),)
        else:
            counts = (first.count(A), first.count(B))
        for x in ordered:
            here = (x.count(1),) if x.is_binary else (x.count(A), x.count(B))
            if here != counts:
                raise ParameterError("configurations differ in particle counts")
        return cls(
            configs=tuple(ordered),
            L=first.L,
            counts=counts,
            index={x: i for i, x in enumerate(ordered)},
            classes=tuple(classes),
            representatives=tuple(reps),
        )


def enumerate_binary(L: int, m: int) -> ConfigSpace:
    """All ``C(L, m)`` binary rings of length ``L`` with ``m`` particles."""
    if L < 1 or m < 0 or m > L:
        raise ParameterError(f"need 0 <= m <= L and L >= 1, got L={L}, m={m}")
    configs = []
    for ones in combinations(range(L), m):
        cells = [0] * L
        for j in ones:
            cells[j] = 1
        configs.append(RingConfig(tuple(cells), BINARY))
    return ConfigSpace.from_configs(configs)


def _species_successor_support(x: RingConfig) -> list[RingConfig]:
    # every subset of the A0/B0 movers has positive probability for 0 < alpha, beta < 1
    c = x.cells
    L = len(c)
    movers = [j for j in range(L) if c[j] != EMPTY and c[(j + 1) % L] == EMPTY]
    out = []
    for r in range(len(movers) + 1):
        for subset in combinations(movers, r):
            cells = list(c)
            for j in subset:
                cells[(j + 1) % L] = c[j]
                cells[j] = EMPTY
            out.append(RingConfig(tuple(cells), SPECIES))
    return out


def enumerate_species_reachable(x0: RingConfig) -> ConfigSpace:
    """Closure of ``{x0}`` under the positive-probability moves of the
    two-species model (any ``A0`` or ``B0`` pair may fire)."""
    if x0.is_binary:
        raise AlphabetError(f"{x0} is binary; a species ring is required")
    if x0.count(A) + x0.count(B) == 0:
        raise ParameterError("the initial ring needs at least one particle")
    seen = {x0}
    queue = deque([x0])
    while queue:
        x = queue.popleft()
        for y in _species_successor_support(x):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return ConfigSpace.from_configs(seen)


def species_space_size(sequence: Sequence[int], zeros: int) -> int:
    """Number of rings whose cyclic particle sequence is ``sequence`` and
    that contain ``zeros`` empty sites (``zeros >= 1``).

    A ring is fixed by the site of a marked particle plus the gap after each
    particle; marked particles equivalent under the sequence's own rotation
    symmetry give the same ring.
    """
    M = len(sequence)
    if M == 0 or zeros < 1:
        raise ParameterError("need at least one particle and one empty site")
    seq = tuple(sequence)
    period = next(p for p in range(1, M + 1) if M % p == 0 and seq[p:] + seq[:p] == seq)
    L = M + zeros
    return L * period * comb(zeros + M - 1, M - 1) // M
