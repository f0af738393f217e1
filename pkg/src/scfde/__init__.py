"""Single-carrier frequency-domain equalization over Rayleigh ISI channels."""

from .equalizer import (Constellation, EqualizerKind, ResidualNoiseStats, decision_sinr,
                        equalize, fde_coefficients, residual_noise_stats, slicer)
from .errors import (BlockTooShort, DegenerateEigenvalue, DimensionMismatch, InsufficientData,
                     InvalidConfig, ScfdeError)
from .infotheory import (DiversityReport, Regime, analytic_diversity, mutual_info,
                         outage_indicator, rate_intervals, rate_shift, union_bound_pep)
from .montecarlo import (EstimatePoint, SlopeFit, SweepConfig, Target, estimate_outage,
                         estimate_ser, fit_slope)
from .spectrum import (ChannelTaps, ExponentialOrders, FrequencyResponse, circulant_apply,
                       cp_transmit, draw_channel, exponential_orders, frequency_response)

__version__ = "0.1.0"
