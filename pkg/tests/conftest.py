import math

import numpy as np
from hypothesis import settings, strategies as st

from rodsym.piecewise import Interval, StepFunction

settings.register_profile("ci", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("ci")

PI = math.pi


@st.composite
def step_functions(draw, lo=-PI, hi=PI, nonneg=False, max_pieces=8):
    """Random step function with well-separated breakpoints."""
    k = draw(st.integers(min_value=0, max_value=max_pieces - 1))
    width = hi - lo
    offsets = draw(
        st.lists(
            st.floats(min_value=0.02, max_value=0.98),
            min_size=k,
            max_size=k,
            unique_by=lambda t: round(t, 2),
        )
    )
    inner = sorted(lo + width * t for t in offsets)
    low_val = 0.0 if nonneg else -3.0
    vals = draw(
        st.lists(
            st.floats(min_value=low_val, max_value=3.0),
            min_size=k + 1,
            max_size=k + 1,
        )
    )
    return StepFunction(Interval(lo, hi), [lo] + inner + [hi], vals)


def random_step(rng, lo, hi, kind="nonneg", max_interior=12):
    k = int(rng.integers(1, max_interior + 1))
    inner = np.sort(rng.uniform(lo, hi, size=k))
    bp = np.concatenate([[lo], inner, [hi]])
    bp = bp[np.concatenate([[True], np.diff(bp) > 1e-9])]
    if kind == "signed":
        vals = rng.uniform(-1.5, 1.5, size=len(bp) - 1)
    else:
        vals = rng.uniform(0.0, 3.0, size=len(bp) - 1)
    f = StepFunction(Interval(lo, hi), bp, vals)
    if kind == "zero_mean":
        f = f.with_values(f.values - f.integrate() / (hi - lo))
    return f
