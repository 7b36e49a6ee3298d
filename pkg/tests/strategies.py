"""Shared hypothesis strategies."""
from hypothesis import strategies as st

from wavefront.models import NormalFormCoeffs

pos = st.floats(0.5, 3.0, allow_nan=False)
anyc = st.floats(-3.0, 3.0, allow_nan=False)


@st.composite
def normal_forms(draw, tails: bool = False):
    kw = dict(a20=draw(anyc), a30=draw(anyc), b20=draw(pos), b30=draw(anyc), b12=draw(anyc),
              b03=draw(pos))
    if tails:
        kw.update(h1=(draw(anyc),), h2=(draw(anyc),), h3=(draw(anyc),), h4=(draw(anyc),),
                  h5={(0, 0): draw(anyc), (1, 0): draw(anyc)})
    return NormalFormCoeffs(**kw)
