"""Outcome records for randomized and exhaustive property checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

VERDICTS = ("pass", "fail", "indeterminate", "precondition-failed")


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of one property check.

    A ``fail`` verdict always carries a witness that re-evaluates to a
    violation when replayed from the same seed; ``indeterminate`` marks
    boundary-tolerance ambiguity and is treated as a pass with a flag.
    """

    name: str
    verdict: str
    samples: int
    tolerance: float
    witness: tuple | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.verdict not in VERDICTS:
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "fail" and self.witness is None:
            raise ValueError("a fail verdict must carry a witness")

    @property
    def passed(self):
        return self.verdict in ("pass", "indeterminate")

    def row(self):
        return (
            f"{self.name}\t{self.verdict}\tsamples={self.samples}\t"
            f"tol={self.tolerance:.3g}\tseed={fmt_value(self.seed)}\t"
            f"witness={fmt_value(self.witness)}"
        )


def fmt_value(obj):
    """Deterministic, compact text for report rows (12 significant digits)."""
    if obj is None:
        return "-"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj) + 0.0  # normalize -0.0
        return f"{v:.12g}"
    if isinstance(obj, np.ndarray):
        return fmt_value(tuple(obj.tolist()))
    if isinstance(obj, (tuple, list)):
        return "(" + ",".join(fmt_value(v) for v in obj) + ")"
    return str(obj)
