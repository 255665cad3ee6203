"""Learning-material quality rating against a fixed four-dimension rubric."""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from codeedu.errors import UnparseableRatingError
from codeedu.llm.gateway import ChatMessage, Gateway, ModelBinding
from codeedu.session.types import LearningMaterial, StudentProfile

DIMENSION_TAGS = ("IA", "CC", "INT", "PER")

_SCORE_PATTERNS = {tag: re.compile(rf"\b{tag}\s*=\s*(-?\d+)") for tag in DIMENSION_TAGS}


def load_rubric() -> str:
    return (
        resources.files("codeedu.evaluation")
        .joinpath("assets/rubric.txt")
        .read_text(encoding="utf-8")
    )


@dataclass(frozen=True)
class QualityScores:
    instructional_alignment: int
    conceptual_clarity: int
    interactivity: int
    personalization: int
    rater_transcript: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        for tag, value in self.as_dict().items():
            if value not in (1, 2, 3, 4, 5):
                raise ValueError(f"{tag} score must be in 1..5, got {value}")

    def as_dict(self) -> dict[str, int]:
        return {
            "IA": self.instructional_alignment,
            "CC": self.conceptual_clarity,
            "INT": self.interactivity,
            "PER": self.personalization,
        }


def parse_scores(reply: str) -> dict[str, int] | None:
    """Extract the four 1..5 scores, or None if any is missing or out of range."""
    scores: dict[str, int] = {}
    for tag, pattern in _SCORE_PATTERNS.items():
        match = pattern.search(reply)
        if match is None:
            return None
        value = int(match.group(1))
        if value not in (1, 2, 3, 4, 5):
            return None
        scores[tag] = value
    return scores


def _material_digest(material: LearningMaterial, profile: StudentProfile) -> str:
    lines = [
        "Student profile:",
        f"- background: {profile.background}",
        f"- goals: {profile.goals}",
        f"- self-reported level: {profile.self_reported_level}",
        f"- preferred topics: {', '.join(profile.preferred_topics) or 'none given'}",
        "",
        f"Material topic: {material.topic}",
    ]
    for section in material.sections:
        lines += ["", f"## {section.heading}", section.body]
    return "\n".join(lines)


def judge_materials(
    material: LearningMaterial,
    profile: StudentProfile,
    gateway: Gateway,
    binding: ModelBinding,
) -> QualityScores:
    """Rate one material with a single rubric call, re-asking once on a bad reply."""
    if not material.sections:
        raise ValueError("material has no sections to rate")
    messages = [
        ChatMessage(role="system", content=load_rubric()),
        ChatMessage(role="user", content=_material_digest(material, profile)),
    ]
    transcript: list[str] = []
    reply = gateway.complete(binding, messages).text
    transcript.append(reply)
    scores = parse_scores(reply)
    if scores is None:
        messages.append(ChatMessage(role="assistant", content=reply))
        messages.append(
            ChatMessage(
                role="user",
                content=(
                    "That reply could not be parsed. Answer again on one line, "
                    "exactly: IA=<1-5> CC=<1-5> INT=<1-5> PER=<1-5>"
                ),
            )
        )
        reply = gateway.complete(binding, messages).text
        transcript.append(reply)
        scores = parse_scores(reply)
    if scores is None:
        raise UnparseableRatingError(
            f"rating reply could not be parsed after a retry: {transcript[-1]!r}"
        )
    return QualityScores(
        instructional_alignment=scores["IA"],
        conceptual_clarity=scores["CC"],
        interactivity=scores["INT"],
        personalization=scores["PER"],
        rater_transcript=tuple(transcript),
    )
