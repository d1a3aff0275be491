"""Orthogeodesics and orthosystoles of compact hyperbolic surfaces with geodesic boundary.

Surfaces are glued from right-angled hexagons; the arc lengths of the
decomposition are the coordinates.
"""

from .combinatorics import HexagonDecomposition, fills, flip_arc, min_filling_size, validate
from .constructions import bicolored_decomposition, equal_length_surface, one_holed_torus, pants_decomposition, \
    pants_from_cuffs, standard_decomposition, symmetric_family
from .enumeration import compare_with_formula, enumerate_gluings, iso_classes
from .errors import ConvergenceError, DecompositionError, DomainError, IncompleteSpectrumError, OrthoforgeError, \
    ResourceCapError
from .hexagon_trig import bavard_bound, equal_boundary_bound
from .maximize import certify_local_max, maximize_fixed_boundaries, maximize_total_constraint, \
    multistart_total_constraint, theorem_b_lower_bound
from .metric import MetricSurface, boundary_component_lengths, grad_total_boundary, total_boundary_length
from .spectrum import enumerate_orthogeodesics, orthosystole, orthosystole_report

__version__ = "0.1.0"
