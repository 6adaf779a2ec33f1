from predsearch.search.partial import partial_distance, select_partial
from predsearch.search.predict_search import (
    FULL_SCALE_SETTINGS,
    default_search_config,
    predict_and_search,
    restricted_instance,
)
from predsearch.search.trust_region import build_fixing, build_trust_region
