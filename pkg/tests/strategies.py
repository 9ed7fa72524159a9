"""Hypothesis strategies shared by the engine tests."""

import os
import sys

from hypothesis import strategies as st

sys.path.append(os.path.join(os.path.dirname(__file__), "..", "squeeze-python"))

from states import XStateParams  # noqa: E402

unit = st.floats(min_value=-1.0, max_value=1.0, allow_nan=False)


@st.composite
def physical_params(draw):
    """(c1, c2, c3) inside the physical tetrahedron."""
    c3 = draw(unit)
    corner = draw(unit) * (1.0 + c3)
    inner = draw(unit) * (1.0 - c3)
    return XStateParams((inner + corner) / 2.0, (inner - corner) / 2.0, c3)


attenuations = st.floats(min_value=1e-6, max_value=1.0, allow_nan=False)
