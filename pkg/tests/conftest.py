from hypothesis import strategies as st

from pbca_lab.ring import BINARY, SPECIES, RingConfig


@st.composite
def binary_rings(draw, min_L=1, max_L=12):
    cells = draw(st.lists(st.integers(0, 1), min_size=min_L, max_size=max_L))
    return RingConfig(tuple(cells), BINARY)


@st.composite
def species_rings(draw, min_L=2, max_L=9, need_empty=True):
    L = draw(st.integers(min_L, max_L))
    cells = draw(st.lists(st.integers(0, 2), min_size=L, max_size=L))
    if all(c == 0 for c in cells):
        cells[draw(st.integers(0, L - 1))] = draw(st.integers(1, 2))
    if need_empty and 0 not in cells:
        cells[draw(st.integers(0, L - 1))] = 0
        if all(c == 0 for c in cells):
            cells[0] = 1
    return RingConfig(tuple(cells), SPECIES)
