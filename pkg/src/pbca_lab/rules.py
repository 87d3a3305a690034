"""Model parameters and the parallel-update motion rules.

PBCA
    a particle in ``10`` hops right with probability ``alpha``.
EPBCA1
    a particle heading ``100`` hops with ``alpha``, heading ``101`` with
    ``beta``; nothing else moves.
EPBCA2
    an A in ``A0`` hops with ``alpha``, a B in ``B0`` with ``beta``.

All hop decisions of one time step are taken from the same configuration.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import AlphabetError, ParameterError
from .ring import EMPTY, A, RingConfig

MODELS = ("pbca", "epbca1", "epbca2")
MODEL_CODES = {name: i for i, name in enumerate(MODELS)}


def as_probability(value, name="probability"):
    """Coerce a float, int, Fraction or ``"p/q"`` string to a probability.

    Fractions (and fraction strings) are kept exact.
    """
    if isinstance(value, str):
        value = Fraction(value) if "/" in value else float(value)
    elif isinstance(value, int):
        value = Fraction(value)
    if not isinstance(value, Fraction):
        value = float(value)
    if not 0 <= value <= 1:
        raise ParameterError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Model name and hopping probabilities.

    ``beta`` is ignored by PBCA.  Probabilities may be floats or Fractions;
    Fractions switch the exact engines to rational arithmetic.
    """

    model: str
    alpha: object
    beta: object = None

    def __post_init__(self):
        model = self.model.lower()
        if model not in MODELS:
            raise ParameterError(f"unknown model {self.model!r}; expected one of {MODELS}")
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "alpha", as_probability(self.alpha, "alpha"))
        if model == "pbca":
            beta = self.alpha if self.beta is None else self.beta
        else:
            if self.beta is None:
                raise ParameterError(f"{model} needs beta")
            beta = self.beta
        object.__setattr__(self, "beta", as_probability(beta, "beta"))

    @property
    def exact(self) -> bool:
        return isinstance(self.alpha, Fraction) and isinstance(self.beta, Fraction)

    @property
    def code(self) -> int:
        return MODEL_CODES[self.model]

    def require_interior(self, *, use_beta: bool | None = None) -> None:
        """Reject endpoint probabilities that closed-form weights cannot take."""
        if use_beta is None:
            use_beta = self.model != "pbca"
        names = [("alpha", self.alpha)] + ([("beta", self.beta)] if use_beta else [])
        for name, value in names:
            if not 0 < value < 1:
                raise ParameterError(f"{name} must lie strictly inside (0, 1), got {value}")

    def check_alphabet(self, x: RingConfig) -> None:
        if self.model == "epbca2":
            if x.is_binary:
                raise AlphabetError(f"epbca2 needs a species ring, got {x}")
        elif not x.is_binary:
            raise AlphabetError(f"{self.model} needs a binary ring, got {x}")
        if self.model == "epbca1" and x.L < 3:
            raise ParameterError("epbca1 needs L >= 3")


def movable_particles(x: RingConfig, params: ModelParams) -> list:
    """Sites of particles allowed to hop, ascending, with their hop probability."""
    params.check_alphabet(x)
    c = x.cells
    L = len(c)
    out = []
    if params.model == "pbca":
        for j in range(L):
            if c[j] == 1 and c[(j + 1) % L] == 0:
                out.append((j, params.alpha))
    elif params.model == "epbca1":
        for j in range(L):
            if c[j] == 1 and c[(j + 1) % L] == 0:
                out.append((j, params.alpha if c[(j + 2) % L] == 0 else params.beta))
    else:
        for j in range(L):
            if c[j] != EMPTY and c[(j + 1) % L] == EMPTY:
                out.append((j, params.alpha if c[j] == A else params.beta))
    return out


def apply_moves(x: RingConfig, sites) -> RingConfig:
    """Shift the particles at ``sites`` one site to the right."""
    cells = list(x.cells)
    L = len(cells)
    for j in sites:
        cells[(j + 1) % L] = x.cells[j]
        cells[j] = EMPTY
    return RingConfig(tuple(cells), x.alphabet)
