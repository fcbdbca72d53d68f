"""hailchi: hail-storm damage modeling and radial distribution fitting.

A traveling binormal storm model, single-linkage storm clustering of radar
hail events, weighted binormal maximum likelihood per storm, reduction to a
radial empirical CDF, least-squares fits of a scaled-Rayleigh (chi) family
and the log-normal CDF, and goodness-of-fit reporting with SVG figures.
"""

from .cluster import ClusterCut, Dendrogram, cut_dendrogram, event_features, single_linkage
from .events import HailEvent
from .fit import (BinormalFit, ChiFit, FitConvergenceError, FTest, GoFReport,
                  LogNormalFit, RadialMetric, RadialSeries, covariance_distance,
                  ellipse_points, estimate_cov, estimate_mean, f_test, fit_binormal,
                  fit_chi, fit_lognormal, fit_lognormal_euclidean, goodness_of_fit,
                  mahalanobis, qq_points, radial_series, residuals)
from .ingest import (Dataset, CsvFormatError, SwdiEmptyBodyError, SwdiError,
                     SwdiStatusError, SwdiTransportError, fetch_swdi, parse_csv,
                     write_csv)
from .linalg import DegenerateCovariance, EigenDecomposition, SymPosDefMatrix, sym_eigen
from .report import StormReport, report_from_json, report_to_json
from .special import (chi_cdf, chi_family_cdf, chi_family_quantile, chi_pdf,
                      disc_average_density, lognormal_cdf, lognormal_pdf,
                      normal_cdf, normal_quantile, reg_beta_I, reg_gamma_P)
from .storm import (QuadratureError, TravelingStormParams, Velocity2,
                    covariance_from_velocity, instantaneous_damage, intensity,
                    sample_events, total_damage_closed, total_damage_quadrature)

__version__ = "0.1.0"
