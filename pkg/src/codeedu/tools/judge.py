"""Unit-test grading of guest submissions.

Every case runs in its own fresh sandbox invocation so state cannot leak
between cases. A crash or timeout is a failed case, not an error; grading
only raises when the sandbox itself cannot be assembled.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from codeedu.tools.sandbox import ExecutionResult, SandboxPolicy, execute_code

COMPARISONS = ("exact", "whitespace-normalized", "numeric-with-tolerance")
DEFAULT_COMPARISON = "whitespace-normalized"


@dataclass(frozen=True)
class TestCase:
    __test__ = False  # domain type, not a pytest class

    input: str
    expected_output: str
    comparison: str = DEFAULT_COMPARISON
    tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.comparison not in COMPARISONS:
            raise ValueError(f"unknown comparison mode: {self.comparison!r}")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")


@dataclass(frozen=True)
class CaseResult:
    passed: bool
    stdout: str
    stderr: str
    wall_time_ms: float
    timed_out: bool


@dataclass(frozen=True)
class TestReport:
    __test__ = False  # domain type, not a pytest class

    case_results: tuple[CaseResult, ...]
    all_passed: bool

    def __post_init__(self) -> None:
        if self.all_passed != all(c.passed for c in self.case_results):
            raise ValueError("all_passed must equal the conjunction of case verdicts")

    @property
    def verdicts(self) -> tuple[bool, ...]:
        return tuple(c.passed for c in self.case_results)

    @property
    def passed_count(self) -> int:
        return sum(self.verdicts)


def normalize_whitespace(text: str) -> str:
    """Strip trailing whitespace per line and trailing blank lines."""
    lines = [line.rstrip() for line in text.splitlines()]
    while lines and not lines[-1]:
        lines.pop()
    return "\n".join(lines)


def outputs_match(actual: str, case: TestCase) -> bool:
    if case.comparison == "exact":
        return actual == case.expected_output
    if case.comparison == "whitespace-normalized":
        return normalize_whitespace(actual) == normalize_whitespace(case.expected_output)
    return _numeric_match(actual, case.expected_output, case.tolerance)


def _numeric_match(actual: str, expected: str, tolerance: float) -> bool:
    got, want = actual.split(), expected.split()
    if len(got) != len(want):
        return False
    for g, w in zip(got, want):
        try:
            if abs(float(g) - float(w)) > tolerance:
                return False
        except ValueError:
            if g != w:
                return False
    return True


def run_unit_tests(
    source: str,
    cases: Sequence[TestCase],
    policy: SandboxPolicy | None = None,
    scratch_root: Path | None = None,
    executor: Callable[..., ExecutionResult] = execute_code,
) -> TestReport:
    """Grade one submission against ordered unit cases.

    Args:
        executor: injection point for property tests; defaults to the real
            sandbox and must keep its (source, stdin, policy, scratch_root)
            call shape.
    """
    if not cases:
        raise ValueError("run_unit_tests needs at least one case")
    policy = policy or SandboxPolicy()
    results = []
    for case in cases:
        run = executor(source, case.input, policy=policy, scratch_root=scratch_root)
        passed = run.ok and outputs_match(run.stdout, case)
        results.append(
            CaseResult(
                passed=passed,
                stdout=run.stdout,
                stderr=run.stderr,
                wall_time_ms=run.wall_time_ms,
                timed_out=run.timed_out,
            )
        )
    return TestReport(case_results=tuple(results), all_passed=all(r.passed for r in results))
