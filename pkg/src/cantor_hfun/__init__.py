"""Harmonic-measure distribution functions of Cantor-level slit domains.

The slit domain is mapped conformally from a domain bounded by circles; harmonic
measures on that domain, together with an explicit Mobius regularization on
partially captured circles, give the h-function.
"""

from .asymfit import FitResult, exact_C0, fit_exp_growth, fit_power_law, sample_near_threshold
from .conformal import ConformalMap, find_preimage, map_from_circular
from .estimators import HarmonicMeasureDistribution, PowerLawRegressor
from .exceptions import (AccuracyWarning, CapacityError, ConsistencyError, ConvergenceError,
                         GeometryError, HFunctionError, NearBoundaryError, OracleAccuracyError,
                         SamplingError)
from .geometry import Basepoint, CircularDomain, SlitDomain, cantor_level, gap_schedule
from .harmonic import build_harmonic_data, sigma_at
from .hfun import HCurve, Pipeline, build_curve, build_pipeline, step_heights

__version__ = "0.1.0"
