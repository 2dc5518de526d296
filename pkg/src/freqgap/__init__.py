"""Frequency gaps of homogeneous solutions to the thin obstacle problem."""

from .errors import (BranchNotFound, CheckFailed, FreqGapError,
                     IndeterminateSign, InternalInconsistency, InvalidDimension,
                     InvalidFrequency, NonconvergentSeries, QuadratureFailure)
from .profile import (EndpointValues, Method, ProfilePoint, ProfileQuery, Sign,
                      SignPair, cross_validate, endpoint_signs,
                      endpoint_signs_predicted, endpoint_values, eval_profile,
                      mu)

__version__ = "0.1.0"
