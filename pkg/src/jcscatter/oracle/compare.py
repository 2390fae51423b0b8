"""Machine-readable comparison of analytic results against oracle output."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SchemaMismatch
from ..sweep import dump_json


@dataclass(frozen=True)
class ComparisonEntry:
    name: str
    max_rel_err: float
    mean_rel_err: float
    tolerance: float
    passed: bool
    worst_index: int


@dataclass
class ComparisonReport:
    entries: list[ComparisonEntry]
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    def to_payload(self) -> dict:
        return {
            "passed": self.passed,
            "entries": [vars(e) for e in self.entries],
            "metadata": self.metadata,
        }

    def to_json(self, path) -> None:
        dump_json(self.to_payload(), path)


def compare_report(
    analytic: dict[str, dict],
    oracle_results: dict[str, dict],
    tolerances: dict[str, float],
    metadata: dict | None = None,
) -> ComparisonReport:
    """Tabulate per-quantity relative errors and a pass/fail verdict.

    Each side maps a quantity name to {"grid": 1-D array or None,
    "values": array}.  Grids and shapes must match exactly; relative error
    is |a - b| / max(|a|, scale) with scale the largest analytic magnitude,
    so near-zeros of oscillatory quantities do not blow up the metric.

    Raises:
        SchemaMismatch: differing quantity sets, grid values, or shapes.
    """
    if set(analytic) != set(oracle_results):
        raise SchemaMismatch(
            f"quantity sets differ: {sorted(analytic)} vs {sorted(oracle_results)}"
        )
    entries = []
    for name in sorted(analytic):
        a = analytic[name]
        b = oracle_results[name]
        grid_a, grid_b = a.get("grid"), b.get("grid")
        if (grid_a is None) != (grid_b is None):
            raise SchemaMismatch(f"{name}: one side lacks a grid")
        if grid_a is not None and (
            np.shape(grid_a) != np.shape(grid_b)
            or not np.allclose(grid_a, grid_b, rtol=0, atol=1e-12)
        ):
            raise SchemaMismatch(f"{name}: grids differ")
        va = np.asarray(a["values"])
        vb = np.asarray(b["values"])
        if va.shape != vb.shape:
            raise SchemaMismatch(f"{name}: value shapes {va.shape} vs {vb.shape}")
        scale = float(np.max(np.abs(va)))
        denom = np.maximum(np.abs(va), scale if scale > 0 else 1.0)
        rel = np.abs(va - vb) / denom
        tol = tolerances.get(name, 1e-6)
        entries.append(
            ComparisonEntry(
                name=name,
                max_rel_err=float(np.max(rel)) if rel.size else 0.0,
                mean_rel_err=float(np.mean(rel)) if rel.size else 0.0,
                tolerance=tol,
                passed=bool(np.all(rel <= tol)),
                worst_index=int(np.argmax(rel)) if rel.size else -1,
            )
        )
    return ComparisonReport(entries=entries, metadata=metadata or {})
