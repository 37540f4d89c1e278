"""Read-probability model, per-document and total utility, and AP/P-R baselines.

The user model: given a ranking of N documents, the reader picks a cutoff
threshold uniformly from the N choices and reads everything at or above it,
so the probability of reading the document at rank r is (N - r + 1) / N.
A system's utility on a relevant document is the log-ratio of its own read
probability to the pooled read probability over the other systems.

Probabilities are kept as exact rationals (rank and depth are integers) and
converted to floating point only when the logarithm is taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ConfigError

#: Document -> 1-based rank for one (system, query); missing key = not retrieved.
RankAssignment = Mapping[str, int]


@dataclass(frozen=True)
class EvalConfig:
    """Evaluation parameters shared by the metrics and the harness.

    depth_n: ranking cutoff N defining the threshold space.
    partial_relevant_counts: whether partially relevant documents count as relevant.
    log_base: base of the utility logarithm; rescales values, never reorders systems.
    epsilon_custom: overrides both zero-probability floors when set; by default
        a missed document is floored at 1/(2N) and an empty pool at 1/(2N|E|),
        half the smallest nonzero mass in each case.
    """

    depth_n: int = 300
    partial_relevant_counts: bool = False
    log_base: float = math.e
    epsilon_custom: float | None = None

    def __post_init__(self):
        if self.depth_n < 1:
            raise ConfigError(f"depth_n must be >= 1, got {self.depth_n}")
        if not (self.log_base > 0) or self.log_base == 1:
            raise ConfigError(f"log_base must be positive and != 1, got {self.log_base}")
        if self.epsilon_custom is not None and not (0 < self.epsilon_custom <= 1):
            raise ConfigError(f"epsilon floor must be in (0, 1], got {self.epsilon_custom}")

    def system_floor(self) -> Fraction:
        if self.epsilon_custom is not None:
            return Fraction(self.epsilon_custom)
        return Fraction(1, 2 * self.depth_n)

    def pool_floor(self, pool_size: int) -> Fraction:
        if self.epsilon_custom is not None:
            return Fraction(self.epsilon_custom)
        return Fraction(1, 2 * self.depth_n * pool_size)

    def log(self, x: float) -> float:
        if self.log_base == math.e:
            return math.log(x)
        return math.log(x) / math.log(self.log_base)

    def to_dict(self) -> dict:
        return {
            "depth_n": self.depth_n,
            "partial_relevant_counts": self.partial_relevant_counts,
            "log_base": "e" if self.log_base == math.e else self.log_base,
            "epsilon_custom": self.epsilon_custom,
        }


def read_probability(rank: int | None, depth_n: int) -> Fraction:
    """Probability the user reads the document at `rank` in a depth-`depth_n` list.

    Closed form (N - r + 1) / N; absent documents (rank None) have probability 0.
    """
    if depth_n < 1:
        raise ConfigError(f"depth_n must be >= 1, got {depth_n}")
    if rank is None:
        return Fraction(0)
    if not 1 <= rank <= depth_n:
        raise ConfigError(f"rank must be in [1, {depth_n}], got {rank}")
    return Fraction(depth_n - rank + 1, depth_n)


def pooled_probability(
    doc: str, pool_ranks: Sequence[RankAssignment], config: EvalConfig
) -> Fraction:
    """Mean read probability of `doc` over the pool, floored if nowhere retrieved."""
    if not pool_ranks:
        raise ConfigError("pooled probability requires a non-empty pool")
    total = sum(
        (read_probability(ranks.get(doc), config.depth_n) for ranks in pool_ranks),
        start=Fraction(0),
    )
    p = total / len(pool_ranks)
    if p == 0:
        return config.pool_floor(len(pool_ranks))
    return p


def document_utility(
    p_system: Fraction | float, p_pool: Fraction | float, config: EvalConfig
) -> float:
    """Log-ratio utility of one relevant document; the zero floor keeps it finite."""
    if p_pool <= 0:
        raise ConfigError("p_pool must be positive after flooring")
    if p_system == 0:
        p_system = config.system_floor()
    if isinstance(p_system, Fraction) and isinstance(p_pool, Fraction):
        ratio = float(p_system / p_pool)
    else:
        ratio = float(p_system) / float(p_pool)
    return config.log(ratio)


@dataclass(frozen=True)
class UtilityScore:
    """Per-document utilities and their sum for one (system, query)."""

    per_doc: dict[str, float] = field(default_factory=dict)
    total: float = 0.0


def total_utility(
    assignment_x: RankAssignment,
    pool: Sequence[RankAssignment],
    relevant_docs: set[str],
    config: EvalConfig,
) -> UtilityScore:
    """Sum of per-document utilities over the relevant set (docs in sorted order)."""
    per_doc: dict[str, float] = {}
    total = 0.0
    for doc in sorted(relevant_docs):
        p_sys = read_probability(assignment_x.get(doc), config.depth_n)
        p_pool = pooled_probability(doc, pool, config)
        u = document_utility(p_sys, p_pool, config)
        per_doc[doc] = u
        total += u
    return UtilityScore(per_doc=per_doc, total=total)


def average_precision(assignment_x: RankAssignment, relevant_docs: set[str]) -> float | None:
    """Non-interpolated average precision; None when there is nothing to find (R = 0)."""
    r = len(relevant_docs)
    if r == 0:
        return None
    hits = 0
    acc = Fraction(0)
    for rank, doc in sorted((rank, doc) for doc, rank in assignment_x.items()):
        if doc in relevant_docs:
            hits += 1
            acc += Fraction(hits, rank)
    return float(acc / r)


def precision_recall(
    assignment_x: RankAssignment, relevant_docs: set[str], cutoff: int
) -> tuple[float | None, float | None]:
    """(precision, recall) at `cutoff`; either side is None when undefined."""
    if cutoff < 1:
        raise ConfigError(f"cutoff must be >= 1, got {cutoff}")
    retrieved = [doc for doc, rank in assignment_x.items() if rank <= cutoff]
    hits = sum(1 for doc in retrieved if doc in relevant_docs)
    denom = min(cutoff, len(assignment_x))
    precision = hits / denom if denom > 0 else None
    recall = hits / len(relevant_docs) if relevant_docs else None
    return precision, recall
