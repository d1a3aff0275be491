import math

import numpy as np

from orthoforge.constructions import standard_decomposition
from orthoforge.metric import MetricSurface

SIGNATURES = [(0, 3), (1, 1), (0, 4), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)]


def random_surface(d, rng, low=0.05, high=5.0):
    x = np.exp(rng.uniform(math.log(low), math.log(high), d.num_arcs))
    return MetricSurface(d, tuple(x))


def random_surfaces(signature, count, seed=0, low=0.05, high=5.0):
    d = standard_decomposition(*signature)
    rng = np.random.default_rng(seed)
    return [random_surface(d, rng, low, high) for _ in range(count)]
