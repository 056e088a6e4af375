"""Rearrangement-invariant spaces and Gagliardo-Nirenberg inequalities on grids."""

__version__ = "0.1.0"

from .grid import (Family, GridFunction, derivative_tensor, dilate, gaussian_bump,  # noqa: E402
                   indicator, magnitude, polynomial_bump, sa_bump, sample)
from .rearrange import (StepRearrangement, hlp_constant, maximal_majorant,  # noqa: E402
                        maximal_rearrangement, rearrange)
from .young import (YoungFunction, check_young, composed, power, power_log,  # noqa: E402
                    tabulated, young_inverse)
from .spaces import (Lebesgue, Lorentz, Orlicz, SpaceSpec, fundamental_function,  # noqa: E402
                     luxemburg_norm, lorentz_norm, parse_space, space_norm,
                     upper_index_estimate)
from .maximal import maximal_operator, riesz_herz_ratio  # noqa: E402
from .holder import (holder_check, lorentz_factor, lorentz_saturator,  # noqa: E402
                     multiplier_norm_estimate, orlicz_factor_check)
from .gn import (GNProblem, VerificationReport, best_constant_scan, mazya_ratio,  # noqa: E402
                 verify_lorentz, verify_orlicz, verify_ribfs)
from .scaling import bump_norm_closed_forms, falsify, necessary_condition  # noqa: E402
