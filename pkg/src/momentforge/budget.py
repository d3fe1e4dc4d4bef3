"""Resource budgets for brute-force enumerations.

Every exhaustive search in this package is metered by the number of
candidate generator-image tuples it would visit, not by group order: a
cyclic group of order 2**20 admits a 20-element image search while
(Z/2)**10 admits 2**100, so order is the wrong resource measure.

The environment variable MOMENTFORGE_BUDGET overrides the candidate cap
(a bare integer) or any field (a JSON object such as
{"max_candidates": 10000000, "max_order": 100000}).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .errors import BudgetExceededError, InputError

ENV_VAR = "MOMENTFORGE_BUDGET"


@dataclass(frozen=True)
class Budget:
    """Caps for exhaustive enumeration.

    max_candidates: largest number of generator-image tuples a single
        enumeration may visit.
    max_order: largest group order for which an element table is built.
    """

    max_candidates: int = 4_000_000
    max_order: int = 65_536

    def check_candidates(self, count: int, what: str) -> None:
        if count > self.max_candidates:
            raise BudgetExceededError(
                f"{what}: {count} candidate tuples exceed the budget of "
                f"{self.max_candidates} (override with {ENV_VAR})"
            )

    def check_order(self, order: int, what: str) -> None:
        if order > self.max_order:
            raise BudgetExceededError(
                f"{what}: group order {order} exceeds the element-table cap of "
                f"{self.max_order} (override with {ENV_VAR})"
            )


def budget_from_env() -> Budget:
    """Budget with any overrides from MOMENTFORGE_BUDGET applied."""
    raw = os.environ.get(ENV_VAR)
    if raw is None:
        return Budget()
    raw = raw.strip()
    try:
        if raw.startswith("{"):
            fields = json.loads(raw)
            return Budget(**fields)
        return Budget(max_candidates=int(raw))
    except (ValueError, TypeError) as exc:
        raise InputError(f"cannot parse {ENV_VAR}={raw!r}: {exc}") from exc


def resolve(budget: Budget | None) -> Budget:
    return budget if budget is not None else budget_from_env()
