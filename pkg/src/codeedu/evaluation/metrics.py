"""Aggregate metrics over graded submission outcomes.

An OutcomeMatrix holds one boolean per (problem, submission, test case)
triple. The two rate metrics are intentionally thin wrappers over numpy
reductions so they stay easy to audit against a hand count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from codeedu.errors import UndefinedBaselineError


@dataclass(frozen=True)
class OutcomeMatrix:
    """Verdicts for N problems x K submissions x M unit cases."""

    passes: tuple[tuple[tuple[bool, ...], ...], ...]

    def __post_init__(self) -> None:
        if not self.passes:
            raise ValueError("outcome matrix needs at least one problem")
        k = len(self.passes[0])
        if k == 0:
            raise ValueError("outcome matrix needs at least one submission per problem")
        m = len(self.passes[0][0])
        if m == 0:
            raise ValueError("outcome matrix needs at least one case per submission")
        for problem in self.passes:
            if len(problem) != k:
                raise ValueError("ragged matrix: submission counts differ between problems")
            for sample in problem:
                if len(sample) != m:
                    raise ValueError("ragged matrix: case counts differ between submissions")

    @classmethod
    def from_lists(cls, passes: Sequence[Sequence[Sequence[bool]]]) -> "OutcomeMatrix":
        return cls(tuple(tuple(tuple(bool(v) for v in sample) for sample in problem) for problem in passes))

    @property
    def n_problems(self) -> int:
        return len(self.passes)

    @property
    def k_samples(self) -> int:
        return len(self.passes[0])

    @property
    def m_cases(self) -> int:
        return len(self.passes[0][0])

    def as_array(self) -> np.ndarray:
        return np.asarray(self.passes, dtype=bool)


def pass_at_k(matrix: OutcomeMatrix) -> float:
    """Fraction of problems where at least one submission passed every case."""
    solved = matrix.as_array().all(axis=2).any(axis=1)
    return float(solved.mean())


def recall_at_k(matrix: OutcomeMatrix) -> float:
    """Fraction of all (problem, submission, case) verdicts that passed."""
    return float(matrix.as_array().mean())


def tutoring_improvement_rate(pre: float, post: float) -> float:
    """Relative score change in percent. Undefined when the baseline is zero."""
    if pre == 0:
        raise UndefinedBaselineError(
            "improvement rate needs a nonzero pre-tutoring score; "
            f"got pre={pre!r}, post={post!r}"
        )
    return (post - pre) / pre * 100.0
