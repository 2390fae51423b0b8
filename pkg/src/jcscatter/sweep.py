"""Grid containers for sweep results and their CSV/JSON serialization.

CSV schema: one optional leading '#'-comment line embedding the run config,
then a header row with axis names followed by value column names, then one
row per grid cell in row-major order.  Complex values are written as
re/im column pairs.  Cells that carry a flag get a trailing flag column;
values are never NaN.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


def _json_default(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def dump_json(payload: dict, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


@dataclass
class SweepGrid:
    """Axis definitions plus a result matrix for one swept quantity.

    Attributes:
        axes: ordered mapping axis name -> 1-D sample vector.
        values: array of shape (len(ax1), len(ax2), ...); complex allowed.
        value_name: column name of the swept quantity.
        flags: per-cell annotation strings, same shape as values ('' = none).
        metadata: params echo, normalization mode, units note, warnings.
    """

    axes: dict[str, np.ndarray]
    values: np.ndarray
    value_name: str
    flags: np.ndarray | None = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        shape = tuple(len(v) for v in self.axes.values())
        self.values = np.asarray(self.values)
        if self.values.shape != shape:
            raise ValueError(
                f"values shape {self.values.shape} != axes shape {shape}"
            )
        if np.any(~np.isfinite(self.values)):
            raise ValueError("sweep values contain non-finite entries")
        if self.flags is not None:
            self.flags = np.asarray(self.flags, dtype=object)
            if self.flags.shape != shape:
                raise ValueError("flags shape does not match axes shape")

    def _columns(self) -> tuple[list[str], list[np.ndarray]]:
        names = list(self.axes.keys())
        grids = np.meshgrid(*self.axes.values(), indexing="ij")
        cols = [g.ravel() for g in grids]
        if np.iscomplexobj(self.values):
            names += [f"{self.value_name}_re", f"{self.value_name}_im"]
            cols += [self.values.real.ravel(), self.values.imag.ravel()]
        else:
            names.append(self.value_name)
            cols.append(self.values.ravel())
        return names, cols

    def to_csv(self, path, config_comment: str | None = None) -> None:
        names, cols = self._columns()
        flat_flags = self.flags.ravel() if self.flags is not None else None
        with open(path, "w", encoding="utf-8") as fh:
            if config_comment is not None:
                fh.write(f"# config: {config_comment}\n")
            header = ",".join(names)
            if flat_flags is not None:
                header += ",flag"
            fh.write(header + "\n")
            for i in range(cols[0].size):
                row = ",".join(f"{c[i]:.12g}" for c in cols)
                if flat_flags is not None:
                    row += f",{flat_flags[i]}"
                fh.write(row + "\n")

    def to_payload(self) -> dict:
        payload: dict[str, Any] = {
            "axes": {k: v for k, v in self.axes.items()},
            "value_name": self.value_name,
            "metadata": self.metadata,
        }
        if np.iscomplexobj(self.values):
            payload["values_re"] = self.values.real
            payload["values_im"] = self.values.imag
        else:
            payload["values"] = self.values
        if self.flags is not None:
            payload["flags"] = self.flags.astype(str).tolist()
        return payload

    def to_json(self, path) -> None:
        dump_json(self.to_payload(), path)


def write_table(path, names: list[str], cols: list[np.ndarray],
                config_comment: str | None = None) -> None:
    """Plain CSV writer for non-grid tabular output (spectra, curves)."""
    with open(path, "w", encoding="utf-8") as fh:
        if config_comment is not None:
            fh.write(f"# config: {config_comment}\n")
        fh.write(",".join(names) + "\n")
        n = len(cols[0])
        for i in range(n):
            fh.write(",".join(f"{c[i]:.12g}" for c in cols) + "\n")
