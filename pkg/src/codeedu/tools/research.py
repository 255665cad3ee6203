"""Deep research tool: focused question answering over supplied context."""

from __future__ import annotations

from codeedu.llm.gateway import ChatMessage, Gateway, ModelBinding

RESEARCH_PROMPT = (
    "You are running a focused research lookup for a tutoring session.\n"
    "Context:\n{context}\n\n"
    "Question: {question}\n\n"
    "Answer concisely and ground every claim in the context when possible."
)


class DeepResearch:
    def __init__(self, gateway: Gateway, binding: ModelBinding) -> None:
        self._gateway = gateway
        self._binding = binding

    def ask(self, context: str, question: str) -> str:
        prompt = RESEARCH_PROMPT.format(context=context, question=question)
        result = self._gateway.complete(
            self._binding, [ChatMessage(role="user", content=prompt)]
        )
        return result.text
