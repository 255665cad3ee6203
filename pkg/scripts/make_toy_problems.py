"""Generate the in-repo toy problem dataset (data/toy_problems.jsonl).

Every problem is original, reads stdin, prints to stdout, and carries ten
test cases. Before writing, each reference solution is verified to pass all
cases in the real sandbox, and each sample attempt is verified to pass some
but not all (it is meant to be a plausible flawed draft).
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from codeedu.tools.judge import TestCase, run_unit_tests  # noqa: E402

OUT_PATH = ROOT / "data" / "toy_problems.jsonl"


def cases(*pairs: tuple[str, str]) -> list[dict]:
    return [{"input": i, "expected_output": o} for i, o in pairs]


PROBLEMS = [
    {
        "problem_id": "p01",
        "title": "Add Two Numbers",
        "difficulty": "easy",
        "statement": (
            "Read one line containing two integers separated by a space and "
            "print their sum."
        ),
        "concepts": (
            "Splitting a line into fields with str.split. Converting text to "
            "integers before doing arithmetic."
        ),
        "reference_solution": "a, b = input().split()\nprint(int(a) + int(b))\n",
        "sample_code": "a, b = input().split()\nprint(abs(int(a) + int(b)))\n",
        "test_cases": cases(
            ("1 2", "3"), ("10 20", "30"), ("-5 2", "-3"), ("0 0", "0"),
            ("100 250", "350"), ("-1 -1", "-2"), ("7 8", "15"), ("-10 3", "-7"),
            ("42 0", "42"), ("999 1", "1000"),
        ),
    },
    {
        "problem_id": "p02",
        "title": "Reverse the Text",
        "difficulty": "easy",
        "statement": (
            "Read one line of text and print it with its characters in "
            "reverse order."
        ),
        "concepts": (
            "Strings are sequences, so slicing with a negative step walks "
            "them backwards."
        ),
        "reference_solution": "print(input()[::-1])\n",
        "sample_code": "print(' '.join(input().split()[::-1]))\n",
        "test_cases": cases(
            ("racecar", "racecar"), ("noon", "noon"), ("abc", "cba"),
            ("hello world", "dlrow olleh"), ("python", "nohtyp"), ("a", "a"),
            ("ab", "ba"), ("madam", "madam"), ("sum", "mus"), ("level", "level"),
        ),
    },
    {
        "problem_id": "p03",
        "title": "Count the Vowels",
        "difficulty": "easy",
        "statement": (
            "Read one line of text and print how many vowels (a, e, i, o, u) "
            "it contains, counting uppercase and lowercase alike."
        ),
        "concepts": (
            "Normalizing case with str.lower before comparing characters "
            "against a fixed set."
        ),
        "reference_solution": (
            "s = input().lower()\nprint(sum(1 for c in s if c in 'aeiou'))\n"
        ),
        "sample_code": (
            "s = input()\nprint(sum(1 for c in s if c in 'aeiou'))\n"
        ),
        "test_cases": cases(
            ("hello", "2"), ("HELLO", "2"), ("xyz", "0"), ("AeIoU", "5"),
            ("programming", "3"), ("Apple", "2"), ("rhythm", "0"),
            ("Education", "5"), ("queue", "4"), ("sky", "0"),
        ),
    },
    {
        "problem_id": "p04",
        "title": "Largest Number",
        "difficulty": "easy",
        "statement": (
            "Read one line of space-separated integers and print the largest one."
        ),
        "concepts": (
            "Mapping int over split fields, then reducing with the built-in max."
        ),
        "reference_solution": "print(max(map(int, input().split())))\n",
        "sample_code": "print(int(input().split()[0]))\n",
        "test_cases": cases(
            ("5 1 2", "5"), ("1 5 2", "5"), ("9", "9"), ("3 3 3", "3"),
            ("-1 -5", "-1"), ("-5 -1", "-1"), ("10 20 30", "30"),
            ("100 50", "100"), ("2 4 6 8", "8"), ("7 7 1", "7"),
        ),
    },
    {
        "problem_id": "p05",
        "title": "Fizz Buzz Single",
        "difficulty": "medium",
        "statement": (
            "Read one integer n. Print 'FizzBuzz' if n is divisible by both 3 "
            "and 5, 'Fizz' if only by 3, 'Buzz' if only by 5, and n itself "
            "otherwise."
        ),
        "concepts": (
            "Branch ordering matters: the most specific condition (divisible "
            "by both) must be tested first."
        ),
        "reference_solution": (
            "n = int(input())\n"
            "if n % 15 == 0:\n    print('FizzBuzz')\n"
            "elif n % 3 == 0:\n    print('Fizz')\n"
            "elif n % 5 == 0:\n    print('Buzz')\n"
            "else:\n    print(n)\n"
        ),
        "sample_code": (
            "n = int(input())\n"
            "if n % 3 == 0:\n    print('Fizz')\n"
            "elif n % 5 == 0:\n    print('Buzz')\n"
            "elif n % 15 == 0:\n    print('FizzBuzz')\n"
            "else:\n    print(n)\n"
        ),
        "test_cases": cases(
            ("3", "Fizz"), ("5", "Buzz"), ("15", "FizzBuzz"), ("7", "7"),
            ("30", "FizzBuzz"), ("9", "Fizz"), ("10", "Buzz"),
            ("45", "FizzBuzz"), ("1", "1"), ("22", "22"),
        ),
    },
    {
        "problem_id": "p06",
        "title": "Factorial",
        "difficulty": "medium",
        "statement": (
            "Read one integer n (0 <= n <= 12) and print n factorial, the "
            "product of all integers from 1 to n. The factorial of 0 is 1."
        ),
        "concepts": (
            "Accumulating a product in a loop; watch the range bounds, since "
            "range excludes its upper end."
        ),
        "reference_solution": (
            "import math\nprint(math.factorial(int(input())))\n"
        ),
        "sample_code": (
            "n = int(input())\nresult = 1\nfor i in range(1, n):\n"
            "    result *= i\nprint(result)\n"
        ),
        "test_cases": cases(
            ("0", "1"), ("1", "1"), ("2", "2"), ("3", "6"), ("4", "24"),
            ("5", "120"), ("6", "720"), ("7", "5040"), ("10", "3628800"),
            ("12", "479001600"),
        ),
    },
    {
        "problem_id": "p07",
        "title": "Palindrome Check",
        "difficulty": "medium",
        "statement": (
            "Read one word and print YES if it reads the same forwards and "
            "backwards ignoring letter case, otherwise print NO."
        ),
        "concepts": (
            "Comparing a normalized string to its reverse; case-insensitive "
            "checks need both sides lowered first."
        ),
        "reference_solution": (
            "s = input().lower()\nprint('YES' if s == s[::-1] else 'NO')\n"
        ),
        "sample_code": (
            "s = input()\nprint('YES' if s == s[::-1] else 'NO')\n"
        ),
        "test_cases": cases(
            ("racecar", "YES"), ("RaceCar", "YES"), ("hello", "NO"),
            ("Noon", "YES"), ("abba", "YES"), ("python", "NO"),
            ("Level", "YES"), ("wow", "YES"), ("Madam", "YES"), ("abc", "NO"),
        ),
    },
    {
        "problem_id": "p08",
        "title": "Digit Sum",
        "difficulty": "medium",
        "statement": (
            "Read one integer, which may be negative, and print the sum of "
            "the digits of its absolute value."
        ),
        "concepts": (
            "Taking the absolute value before iterating over the digits of "
            "the decimal representation."
        ),
        "reference_solution": (
            "print(sum(int(d) for d in str(abs(int(input())))))\n"
        ),
        "sample_code": (
            "print(sum(int(d) for d in str(int(input()))))\n"
        ),
        "test_cases": cases(
            ("123", "6"), ("-123", "6"), ("0", "0"), ("999", "27"),
            ("-7", "7"), ("10", "1"), ("-405", "9"), ("58", "13"),
            ("-1000", "1"), ("777", "21"),
        ),
    },
    {
        "problem_id": "p09",
        "title": "Count Even Numbers",
        "difficulty": "easy",
        "statement": (
            "Read one line of space-separated integers and print how many of "
            "them are even. Zero counts as even."
        ),
        "concepts": (
            "Evenness is remainder zero when dividing by two; zero satisfies "
            "that test like any other even number."
        ),
        "reference_solution": (
            "print(sum(1 for x in map(int, input().split()) if x % 2 == 0))\n"
        ),
        "sample_code": (
            "print(sum(1 for x in map(int, input().split())"
            " if x % 2 == 0 and x != 0))\n"
        ),
        "test_cases": cases(
            ("1 2 3 4", "2"), ("0 1 2", "2"), ("5 7", "0"), ("0", "1"),
            ("2 4 6", "3"), ("0 0", "2"), ("-2 3", "1"), ("1 3 5 0", "1"),
            ("8", "1"), ("-4 -6 1", "2"),
        ),
    },
    {
        "problem_id": "p10",
        "title": "Word Count",
        "difficulty": "easy",
        "statement": (
            "Read one line of text and print the number of words it contains. "
            "Words are separated by one or more spaces."
        ),
        "concepts": (
            "str.split with no argument collapses runs of whitespace, unlike "
            "splitting on a single literal space."
        ),
        "reference_solution": "print(len(input().split()))\n",
        "sample_code": "print(len(input().split(' ')))\n",
        "test_cases": cases(
            ("one two", "2"), ("one  two", "2"), ("word", "1"), ("a b c", "3"),
            ("a  b  c", "3"), ("hello   world", "2"), ("x", "1"),
            ("one two three four", "4"), ("spaced  out", "2"), ("tiny case", "2"),
        ),
    },
]


def verify(problem: dict, scratch: Path) -> None:
    case_objs = [
        TestCase(input=c["input"], expected_output=c["expected_output"])
        for c in problem["test_cases"]
    ]
    assert len(case_objs) == 10, problem["problem_id"]
    ref = run_unit_tests(problem["reference_solution"], case_objs, scratch_root=scratch)
    if not ref.all_passed:
        raise SystemExit(
            f"{problem['problem_id']}: reference solution failed cases "
            f"{[i for i, ok in enumerate(ref.verdicts) if not ok]}"
        )
    sample = run_unit_tests(problem["sample_code"], case_objs, scratch_root=scratch)
    passed = sum(sample.verdicts)
    if passed == 0 or passed == len(case_objs):
        raise SystemExit(
            f"{problem['problem_id']}: sample attempt should pass some but not "
            f"all cases, passed {passed}/{len(case_objs)} "
            f"(verdicts {list(sample.verdicts)})"
        )
    print(f"{problem['problem_id']}: reference 10/10, sample {passed}/10")


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        for problem in PROBLEMS:
            verify(problem, Path(tmp))
    OUT_PATH.parent.mkdir(parents=True, exist_ok=True)
    with OUT_PATH.open("w", encoding="utf-8") as fh:
        for problem in PROBLEMS:
            fh.write(json.dumps(problem, sort_keys=True) + "\n")
    print(f"wrote {OUT_PATH} ({len(PROBLEMS)} problems)")


if __name__ == "__main__":
    main()
