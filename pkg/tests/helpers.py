import math

import numpy as np
from hypothesis import strategies as st

from gausspack.geometry import QPPoint

SQRT2 = math.sqrt(2.0)
SHEARED = QPPoint(SQRT2, (1 + 1j) / SQRT2)

moduli = st.floats(0.3, 3.0)
angles = st.floats(-math.pi, math.pi)
shears = st.floats(-3.0, 3.0)


@st.composite
def qp_points(draw):
    """Valid (Q, P): any nonzero Q and P = (s + i) / conj(Q)."""
    q = draw(moduli) * complex(math.cos(draw(angles)), math.sin(draw(angles)))
    return QPPoint(q, (draw(shears) + 1j) / q.conjugate())


coefficient_triples = st.tuples(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))


def random_qp(rng, n):
    out = []
    for _ in range(n):
        q = rng.uniform(0.3, 3.0) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        out.append(QPPoint(q, (rng.uniform(-3, 3) + 1j) / np.conj(q)))
    return out
