"""Novelty-based utility evaluation for information retrieval systems."""

from .corpus_io import (
    DEFAULT_GRADE_MAP,
    JudgmentSet,
    Relevance,
    RunEntry,
    RunSet,
    TopicMeta,
    load_judgments,
    load_runs,
    parse_judgments,
    parse_run_file,
    parse_topics,
    write_judgments,
    write_run_file,
)
from .errors import (
    ConfigError,
    NovevalError,
    OracleScaleError,
    ParseError,
    ValidationError,
)
from .harness import (
    LeaveOneOutPlan,
    PerQueryDiffMatrix,
    RankingRow,
    RankingTable,
    SystemQueryResult,
    aggregate,
    per_query_diffs,
    run_leave_one_out,
    tie_break,
)
from .metrics import (
    EvalConfig,
    UtilityScore,
    average_precision,
    document_utility,
    pooled_probability,
    precision_recall,
    read_probability,
    total_utility,
)
from .synth import SyntheticSpec, generate, oracle_utility

__version__ = "0.1.0"
