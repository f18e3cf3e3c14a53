"""Verification results."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

PASS, FAIL, INDETERMINATE = "pass", "fail", "indeterminate"


@dataclass
class CheckReport:
    """Outcome of one named numerical check.

    ``status`` is ``pass`` exactly when ``max_error <= tolerance`` unless the
    check could not be decided (``indeterminate``).
    """

    name: str
    max_error: float
    tolerance: float
    samples: int = 1
    seed: int | None = None
    notes: str = ""
    extra: dict = field(default_factory=dict)
    status: str = ""

    def __post_init__(self):
        if self.status != INDETERMINATE:
            ok = math.isfinite(self.max_error) and self.max_error <= self.tolerance
            self.status = PASS if ok else FAIL

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        d = jsonable(asdict(self))
        return {k: d[k] for k in sorted(d)}

    def line(self) -> str:
        return (
            f"[{self.status.upper():>4}] {self.name}: max_error={self.max_error:.3e} "
            f"tol={self.tolerance:.1e} samples={self.samples}"
        )


def jsonable(obj):
    """Plain JSON types; non-finite floats become strings, complex numbers ``[re, im]``."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def merge(name: str, reports: list[CheckReport], notes: str = "") -> CheckReport:
    """Worst case over a list of reports for the same check."""
    worst = max((r.max_error for r in reports), default=float("nan"))
    tol = min((r.tolerance for r in reports), default=0.0)
    seeds = {r.seed for r in reports}
    return CheckReport(
        name=name,
        max_error=worst,
        tolerance=tol,
        samples=sum(r.samples for r in reports),
        seed=seeds.pop() if len(seeds) == 1 else None,
        notes=notes,
    )
