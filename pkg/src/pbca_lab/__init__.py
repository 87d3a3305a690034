"""Probabilistic Burgers cellular automata and two extensions.

Three engines cross-check each other:

* :mod:`pbca_lab.simulate` -- seeded parallel-update Monte Carlo,
* :mod:`pbca_lab.markov` -- exact transition matrices and stationary laws,
* :mod:`pbca_lab.conjecture`, :mod:`pbca_lab.flux`, :mod:`pbca_lab.gkz` --
  closed-form steady-state weights, fundamental diagrams and the
  infinite-size limit.
"""
from .errors import (AlphabetError, CapacityError, ClosureError, ErgodicityError,
                     LumpabilityError, ParameterError, PBCAError, UndefinedTallyError)
from .ring import (BINARY, SPECIES, ConfigSpace, RingConfig, SpeciesTally, canonical_rotation,
                   count_10, count_100_101, enumerate_binary, enumerate_species_reachable,
                   tally_species)
from .rules import ModelParams
from .simulate import SimStats, make_rng, run, step
from .markov import (StationaryDist, TransitionMatrix, build_matrix, lump_by_rotation,
                     stationary, stationary_class_vector, successor_distribution)
from .conjecture import (ConjectureWeight, count_k1_zero_epbca1, count_N_epbca1,
                         count_N_epbca2, count_N_pbca, verify_conjecture, weight_epbca1,
                         weight_epbca2, weight_pbca)
from .flux import (FluxPoint, flux_epbca1, flux_epbca2, flux_epbca2_tally, flux_limit_pbca,
                   flux_pbca)
from .gkz import GkzSeries, gkz_check_identities, gkz_F, gkz_limit

__version__ = "0.1.0"
