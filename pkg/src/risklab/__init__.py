"""Risk-preference elicitation toolkit.

Exact construction of mean-preserving-spread choice tasks and safe/risky
price lists, classification of preferences on the normalized utility
simplex, CRRA interval inversion, agent simulation, live-session service,
and the statistical analysis that ties the two elicitation methods together.
"""

from .agents import (
    AgentError,
    AgentSpec,
    Cara,
    Crra,
    PowerExpo,
    PriceListResult,
    Tabulated,
    choose,
    parse_utility,
    population,
    simulate_mps,
    simulate_population,
    simulate_price_list,
)
from .analysis import (
    AnalysisError,
    AnalysisReport,
    ChiSquareResult,
    ConsistencyReport,
    CrossTabCell,
    PatternTable,
    SubjectSummary,
    analyze_records,
    analyze_reference,
    case_homogeneity_test,
    chisq_goodness_of_fit,
    chisq_homogeneity,
    consistency_report,
    flat_aa_share_test,
    pattern_table,
    random_behavior_test,
    reference_cross_tab,
    reference_pattern_table,
    safe_count_cross_tab,
    summarize_subjects,
)
from .chisq import chi2_sf, regularized_gamma_q
from .geometry import (
    CORNER,
    LOWER_INTERCEPT,
    LOWER_SLOPE,
    PATTERN_ORDER,
    REGION_ORDER,
    SIMPLEX,
    STANDARD_PRIZES,
    UPPER_SLOPE,
    ChoicePattern,
    CrraInterval,
    GeometryError,
    Polygon,
    Region,
    UtilityPoint,
    classify_point,
    crra_curve,
    crra_interval,
    crra_point,
    feasible_triangle,
    geometry_json,
    normalize_utility,
    overlap_report,
    pattern_to_region,
    polygon_intersection,
    region_polygon,
    region_to_pattern,
)
from .lottery import (
    Lottery,
    LotteryError,
    MpsFamily,
    PrizeVector,
    TabulatedUtility,
    expected_utility,
    expected_utility_exact,
    expected_value,
    is_concave_on_grid,
    mix,
    mps_family,
    mps_spread,
    prefers_base_to_all_spreads,
)
from .records import ChoiceRecord, RecordError, read_records, write_records
from .reference_data import ReferenceDataset, load_reference_dataset
from .service import (
    ServiceError,
    SessionState,
    SessionStore,
    compute_payout,
    create_app,
    payout_seed,
    realize_prize,
)
from .tasks import (
    CASE_IDS,
    DisplayPlan,
    MpsCase,
    PriceListRow,
    TaskError,
    battery_from_json,
    battery_to_json,
    custom_battery,
    display_plan,
    price_list_battery,
    standard_battery,
)

__version__ = "0.1.0"
