"""Heisenberg-group rectangle geometry and scaling-law verification."""

__version__ = "0.1.0"

from .core import HPoint, dilate, distance, group_mul, hpoint, inverse, koranyi_norm, origin
from .rectangles import EUCLID, TYPE1, TYPE2, Rectangle, unit_ball_volume
from .splitting import (IsotropicFrame, canonical_frame, project_P, project_Q,
                        random_isotropic_frame, random_orthosymplectic, sigma)
from .svf import (PowerLawFamily, SvfSpec, critical_exponent, dimension_predict,
                  series_partial_sum_oracle, svf_eval, svf_exponents)
