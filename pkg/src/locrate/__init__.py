"""Location-based transmission-rate selection under localization uncertainty.

Closed-form 1-D narrowband Rayleigh analysis, a spatially consistent 2-D
wideband environment generator, time-of-arrival localization error bounds,
rate-selection scheme calibration to a confidence target, and map
diagnostics — all deterministic given a master seed.
"""

__version__ = "0.1.0"

from ._kernels import NUMBA_ENABLED
from .core import (CapacitySamples, PathSet, SystemConfig,
                   empirical_outage_capacity, empirical_outage_probability,
                   freq_response, instantaneous_capacity, std_normal_cdf,
                   std_normal_quantile)
from .schemes import Backoff, Distance, Interval, RateScheme
from .rayleigh import (CoherenceExceedsCell, InfeasibleBackoff, LocStd1D,
                       PathLossParams, avg_snr, backoff_meta_1d,
                       backoff_rate_1d, calibrate_backoff_1d,
                       coherence_radius_1d, interval_meta_1d, interval_rate_1d,
                       outage_capacity_1d, outage_cdf_1d, throughput_ratio_1d)
from .environment import (EnvConfig, EnvironmentMap, GridGeometry,
                          OutageCapacityMap, derive_rng, generate_environment,
                          outage_capacity_map, rayleigh_emulation_environment)
from .localization import (ChannelParams, LocalizationModel,
                           LocalizationUnobservable, averaged_crlb_peb,
                           constant_localization_model, crlb_localization_model,
                           equivalent_fim_toa, fim_channel_params, fim_position,
                           nonresolvable_cluster, position_crlb)
from .rateselect import (CalibrationResult, EvaluationReport,
                         InfeasibleCalibration, OutOfMapError, OutageRegion,
                         PaddingInsufficient, calibrate_scheme_2d,
                         meta_probability_2d, outage_region, rate_map,
                         select_rate_2d, throughput_ratio_2d)
from .analysis import (BoxStats, CoherenceExceedsMap, ExtremaSet,
                       UndefinedCorrelation, boxplot_stats,
                       coherence_radius_2d, detect_extrema, pearson_and_fit)
