"""Random tilings with boundary defects: exact counting, uniform sampling,
arctic curves from the tangent method, and finite-size checks of it."""

from .profile import (AlphaProfile, DefectSequence, FreezingInterval, FreezingKind, Segment,
                      alpha_eval, detect_freezing, discretize, locate_discrete, rescale)
from .combinatorics import (CountRatio, PortionKind, brute_force_count, gt_count, h_flat,
                            h_sawtooth, y_count)
from .arctic import (CurvePoint, TangentLine, curve_point, dx_dt, find_t1, full_curve,
                     integral_I, tangent_line, x_of_t, z_of_t)

__version__ = "0.1.0"
