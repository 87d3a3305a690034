from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pbca_lab.errors import AlphabetError, ParameterError, UndefinedTallyError
from pbca_lab.ring import (RingConfig, canonical_rotation, count_10, count_100_101,
                           enumerate_binary, enumerate_species_reachable, orbit, rotations,
                           species_space_size, tally_species)

from conftest import binary_rings, species_rings


def test_parse_roundtrip_and_alphabet_inference():
    x = RingConfig.parse("0AAB0")
    assert str(x) == "0AAB0"
    assert not x.is_binary
    assert RingConfig.parse("0110").is_binary
    with pytest.raises(AlphabetError):
        RingConfig.parse("012")
    with pytest.raises(AlphabetError):
        RingConfig.parse("0A", "01")


def test_rotate_is_left_shift():
    x = RingConfig.parse("1100")
    assert str(x.rotate(1)) == "1001"
    assert str(x.rotate(-1)) == "0110"
    assert x.rotate(4) == x


def test_pattern_counts_on_small_rings():
    assert count_10(RingConfig.parse("0101")) == 2
    assert count_10(RingConfig.parse("0011")) == 1
    assert count_10(RingConfig.parse("0000")) == 0
    # cyclic: the trailing 1 sees the leading 0
    assert count_100_101(RingConfig.parse("00110")) == (1, 0)
    assert count_100_101(RingConfig.parse("0101")) == (0, 2)
    with pytest.raises(ParameterError):
        count_100_101(RingConfig.parse("10"))


def test_species_tally_of_worked_example():
    t = tally_species(RingConfig.parse("BAAA00A0B0BB00A000"))
    assert (t.kA, t.kB, t.nA, t.nB, t.mA, t.mB) == (3, 2, 6, 3, 5, 4)


def test_species_tally_rejects_empty_ring():
    with pytest.raises(UndefinedTallyError):
        tally_species(RingConfig.parse("000", "0AB"))


def test_binary_order_groups_rotations():
    space = enumerate_binary(4, 2)
    assert [str(x) for x in space] == ["0011", "0110", "1100", "1001", "0101", "1010"]


@pytest.mark.parametrize("L,m,reps", [
    (8, 4, "00001111 00010111 00011011 00011101 00100111 00101011 00101101 00110011 "
           "00110101 01010101"),
    (9, 3, "000000111 000001011 000001101 000010011 000010101 000011001 000100011 "
           "000100101 000101001 001001001"),
])
def test_representatives_are_sorted_necklaces(L, m, reps):
    space = enumerate_binary(L, m)
    assert [str(r) for r in space.representatives] == reps.split()


@pytest.mark.parametrize("seed,n,classes", [("AABAAB00", 84, 12), ("AABA000", 140, 20)])
def test_species_examples_sizes(seed, n, classes):
    space = enumerate_species_reachable(RingConfig.parse(seed))
    assert len(space) == n
    assert len(space.classes) == classes
    assert space.is_rotation_closed()


@given(st.integers(1, 12).flatmap(lambda L: st.tuples(st.just(L), st.integers(0, L))))
def test_binary_space_size(Lm):
    L, m = Lm
    space = enumerate_binary(L, m)
    assert len(space) == comb(L, m)
    assert len(set(space.configs)) == len(space)
    assert sum(len(c) for c in space.classes) == len(space)


@given(binary_rings(min_L=3))
def test_count_10_splits_into_100_and_101(x):
    c100, c101 = count_100_101(x)
    assert count_10(x) == c100 + c101


@given(binary_rings(), st.integers(-20, 20))
def test_pattern_counts_rotation_invariant(x, s):
    assert count_10(x.rotate(s)) == count_10(x)
    if x.L >= 3:
        assert count_100_101(x.rotate(s)) == count_100_101(x)


@given(species_rings(), st.integers(-20, 20))
def test_species_tally_rotation_invariant_and_sums_to_L(x, s):
    t = tally_species(x)
    assert t == tally_species(x.rotate(s))
    assert t.mA + t.mB + t.nA + t.nB == x.L


@given(binary_rings(), st.integers(-20, 20))
def test_canonical_rotation_is_idempotent_minimum(x, s):
    c = canonical_rotation(x)
    assert canonical_rotation(c) == c
    assert canonical_rotation(x.rotate(s)) == c
    assert c.cells == min(r.cells for r in rotations(x))
    assert len(orbit(x)) == len(set(rotations(x)))


@settings(max_examples=40, deadline=None)
@given(species_rings(max_L=8))
def test_species_space_is_bfs_fixed_point(x):
    space = enumerate_species_reachable(x)
    assert x in space
    assert enumerate_species_reachable(space.configs[-1]).configs == space.configs
    # the cyclic particle sequence is shared by every member
    word = lambda y: canonical_rotation(RingConfig(y.particle_sequence(), "0AB")).cells
    assert {word(y) for y in space} == {word(x)}
    zeros = x.count(0)
    assert species_space_size(x.particle_sequence(), zeros) == len(space)
