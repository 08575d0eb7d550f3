"""Live monitoring pipeline: polling, bucketing, persistence, HTTP service."""

from .config import DEFAULT_QUERY, MonitorConfig, SourceDescriptor, load_config
from .geo import load_alias_table, match_region
from .pipeline import (
    InteractionRecord,
    MonitorPipeline,
    PipelineStatus,
    TabAssignment,
    assign_tab,
    classify_and_bucket,
    poll_once,
    post_url,
)
from .query import And, Or, Phrase, Term, matches, parse_keyword_query, unparse
from .service import create_app
from .sources import HttpSource, ReplaySource, make_source
from .store import (
    MonitorStore,
    StoredPost,
    TAB_NEGATIVE,
    TAB_QUARANTINE,
    TAB_REPORT_IN_REGION,
    TAB_REPORT_NO_GEO,
    TABS,
)

__all__ = [
    "And",
    "DEFAULT_QUERY",
    "HttpSource",
    "InteractionRecord",
    "MonitorConfig",
    "MonitorPipeline",
    "MonitorStore",
    "Or",
    "Phrase",
    "PipelineStatus",
    "ReplaySource",
    "SourceDescriptor",
    "StoredPost",
    "TAB_NEGATIVE",
    "TAB_QUARANTINE",
    "TAB_REPORT_IN_REGION",
    "TAB_REPORT_NO_GEO",
    "TABS",
    "TabAssignment",
    "Term",
    "assign_tab",
    "classify_and_bucket",
    "create_app",
    "load_alias_table",
    "load_config",
    "make_source",
    "match_region",
    "matches",
    "parse_keyword_query",
    "poll_once",
    "post_url",
    "unparse",
]
