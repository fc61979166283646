"""Deterministic radio-network planning and digital-twin interference loop.

Plan coverage with TR 38.901 urban pathloss, synthesize per-cell
RTWP/RSSI KPI feeds, detect and localize external interferers via
K-means clustering and correlation, and close the loop with verified
frequency-reassignment recommendations.
"""

from .scenario import (Band, Interferer, Rect, Scenario, Sector, Site,
                       UserTerminalProfile, load_scenario, save_scenario,
                       validate)
from .propagation import (PathlossQuery, ShadowFadingField, los_probability,
                          pathloss_db, shadow_fading_db)
from .planning import (LinkBudget, PlanResult, cell_radius_m,
                       max_allowed_pathloss_db, receiver_sensitivity_dbm,
                       required_site_count)
from .coverage import (AntennaPattern, CoverageGrid, compute_grid,
                       grid_summary, received_power_dbm, throughput_mbps,
                       write_grid_csv)
from .twin import (KpiBatch, KpiSeries, excess_over_baseline_db,
                   interference_at_cell_dbm, read_kpi_csv, synthesize_kpi,
                   write_kpi_csv)
from .detect import (ClusterResult, DetectionResult, FeatureVector,
                     correlation_matrix, detect_affected, kmeans,
                     normalize_features, run_detection)
from .localize import (LocalizationEstimate, pathloss_lsq,
                       validate_localization, weighted_centroid)
from .mitigate import Recommendation, VerificationVerdict, apply, recommend, verify

__version__ = "0.1.0"
