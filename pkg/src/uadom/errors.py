"""Exception types and budget configuration shared by all modules."""

from __future__ import annotations

import os
from dataclasses import dataclass


class UadomError(Exception):
    pass


class ParseError(UadomError):
    """Malformed input; ``offset`` is a byte offset or ``line`` a 1-based line."""

    def __init__(self, message: str, offset: int | None = None, *, line: int | None = None):
        self.message = message
        self.offset = offset
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if offset is not None:
            where.append(f"offset {offset}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class EvaluationError(UadomError):
    pass


class BudgetExceeded(UadomError):
    """A configured search budget would be exceeded; work is never truncated silently."""

    def __init__(self, what: str, limit: int, needed: int | None = None):
        self.what = what
        self.limit = limit
        self.needed = needed
        msg = f"{what} budget of {limit} exceeded"
        if needed is not None:
            msg += f" (needs {needed})"
        super().__init__(msg)


class HypothesisFailure(UadomError):
    """A block of an equational array whose diagonal word does not land in B."""

    def __init__(self, block: int | str, value=None):
        self.block = block
        self.value = value
        super().__init__(f"hypothesis fails at block {block} (value {value} not in B)")


@dataclass(frozen=True)
class Budget:
    assignments: int = 10**7
    models: int = 10**6
    nodes: int = 10**5
    partition_vars: int = 20
    ground_size: int = 20
    model_size: int = 4

    @classmethod
    def from_env(cls, **overrides) -> "Budget":
        values = {}
        if "UADOM_BUDGET_NODES" in os.environ:
            values["nodes"] = int(os.environ["UADOM_BUDGET_NODES"])
        if "UADOM_BUDGET_MODELS" in os.environ:
            values["models"] = int(os.environ["UADOM_BUDGET_MODELS"])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


DEFAULT_BUDGET = Budget()
