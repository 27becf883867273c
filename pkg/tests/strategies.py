"""Hypothesis strategies for cube tables."""
import numpy as np
from hypothesis import strategies as st

from localtail.cube import TabulatedFunction


@st.composite
def tables(draw, rs=(2, 3, 4, 5), max_points=729, integer=False):
    r = draw(st.sampled_from(rs))
    n_max = 1
    while r ** (n_max + 1) <= max_points:
        n_max += 1
    n = draw(st.integers(1, n_max))
    if integer:
        elems = st.integers(-3, 3).map(float)
    else:
        elems = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
    values = draw(st.lists(elems, min_size=r**n, max_size=r**n))
    return TabulatedFunction(r, n, np.array(values, dtype=np.float64))
