"""Optimal ultrasonic beacon placement for 3D indoor drone localization."""

from ._core import (  # noqa: F401
    BeaconoptError,
    BeaconSite,
    Box,
    ConnectivityMatrix,
    DroneDomain,
    BeaconDomain,
    FloorPlan,
    GdopBand,
    GdopResult,
    SensorModel,
    band_name,
    beacon_covers,
    brute_force_min_cover,
    build_connectivity,
    classify_band,
    crb_2d,
    discretize_domains,
    dop_2d_from_angles,
    gdop_at,
    gdop_field,
    k_coverage_fraction,
    line_of_sight,
    load_floor_plan,
    lower_bound,
    min_beacon_count,
    range_from_toa,
    simulate_localization,
    solve_scenario,
    total_coverage,
    trilaterate,
)
from ._core import __version__  # noqa: F401
