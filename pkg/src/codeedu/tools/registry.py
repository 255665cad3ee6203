"""Typed tool registry.

Tools are registered with a descriptor (name, description, parameter
schema) and a handler. invoke() validates arguments against the schema
before the handler runs, so agents get schema-mismatch errors instead of
handler tracebacks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from codeedu.errors import SchemaMismatchError, UnknownToolError

PARAM_KINDS: dict[str, tuple[type, ...]] = {
    "string": (str,),
    "integer": (int,),
    "number": (int, float),
    "boolean": (bool,),
    "object": (dict,),
}


@dataclass(frozen=True)
class ToolParam:
    name: str
    kind: str
    required: bool = True

    def __post_init__(self) -> None:
        if self.kind not in PARAM_KINDS:
            raise ValueError(f"unknown parameter kind: {self.kind!r}")


@dataclass(frozen=True)
class ToolDescriptor:
    name: str
    description: str
    params: tuple[ToolParam, ...] = ()


class ToolRegistry:
    def __init__(self) -> None:
        self._descriptors: dict[str, ToolDescriptor] = {}
        self._handlers: dict[str, Callable[..., Any]] = {}

    def register(self, descriptor: ToolDescriptor, handler: Callable[..., Any]) -> None:
        if descriptor.name in self._descriptors:
            raise ValueError(f"tool already registered: {descriptor.name}")
        self._descriptors[descriptor.name] = descriptor
        self._handlers[descriptor.name] = handler

    def names(self) -> tuple[str, ...]:
        return tuple(sorted(self._descriptors))

    def describe(self, name: str) -> ToolDescriptor:
        if name not in self._descriptors:
            raise UnknownToolError(f"no such tool: {name}")
        return self._descriptors[name]

    def invoke(self, name: str, arguments: dict[str, Any]) -> Any:
        """Validate arguments against the tool schema, then call the handler.

        Raises:
            UnknownToolError: name is not registered.
            SchemaMismatchError: missing/unexpected argument or wrong type.
        """
        descriptor = self.describe(name)
        by_name = {p.name: p for p in descriptor.params}
        for param in descriptor.params:
            if param.required and param.name not in arguments:
                raise SchemaMismatchError(f"{name}: missing required argument {param.name!r}")
        for arg_name, value in arguments.items():
            param = by_name.get(arg_name)
            if param is None:
                raise SchemaMismatchError(f"{name}: unexpected argument {arg_name!r}")
            expected = PARAM_KINDS[param.kind]
            if isinstance(value, bool) and param.kind in ("integer", "number"):
                raise SchemaMismatchError(f"{name}: argument {arg_name!r} must be {param.kind}")
            if not isinstance(value, expected):
                raise SchemaMismatchError(
                    f"{name}: argument {arg_name!r} must be {param.kind}, got {type(value).__name__}"
                )
        return self._handlers[name](**arguments)
