"""Dataset parsing, parameter documents, axis normalization and CSV output.

File conventions: parameters travel as JSON documents with field names
exactly k1..k7, c_s, c_g; curves and datasets travel as plain CSV with `.`
decimals and `\n` line endings.  All numeric output is printed with 17
significant digits so written doubles round-trip exactly.  Files are written
atomically (temp file + rename).
"""

import json
import os
import tempfile

import numpy as np

from .errors import DatasetParseError
from .fitting import Dataset
from .model import Contribution, Rates

__all__ = [
    "ParamsDocument",
    "parse_dataset",
    "serialize_dataset",
    "normalize_axis",
    "NORMALIZE_MODES",
    "format_float",
    "atomic_write_text",
    "curve_csv",
    "ssa_stats_csv",
    "laws_csv",
]

NORMALIZE_MODES = ("none", "first-to-one", "range-1-100")


def format_float(x) -> str:
    """Round-trippable decimal form (17 significant digits)."""
    return format(float(x), ".17g")


def atomic_write_text(path, text):
    """Write via a sibling temp file and rename, so readers never see a torn file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


class ParamsDocument:
    """A (rates, contribution) pair plus optional metadata, JSON round-trippable."""

    def __init__(self, rates: Rates, contribution: Contribution, label=None, provenance=None):
        self.rates = rates
        self.contribution = contribution
        self.label = label
        self.provenance = provenance

    def __eq__(self, other):
        return (
            isinstance(other, ParamsDocument)
            and self.rates == other.rates
            and self.contribution == other.contribution
            and self.label == other.label
            and self.provenance == other.provenance
        )

    def to_dict(self):
        out = dict(self.rates.as_dict())
        out["c_s"] = self.contribution.c_s
        out["c_g"] = self.contribution.c_g
        if self.label is not None:
            out["label"] = self.label
        if self.provenance is not None:
            out["provenance"] = self.provenance
        return out

    @classmethod
    def from_dict(cls, data):
        try:
            rates = Rates(**{f"k{i}": float(data[f"k{i}"]) for i in range(1, 8)})
            contribution = Contribution(c_s=float(data["c_s"]), c_g=float(data["c_g"]))
        except KeyError as exc:
            raise ValueError(f"params document is missing field {exc.args[0]!r}") from exc
        return cls(rates, contribution, data.get("label"), data.get("provenance"))

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def loads(cls, text: str):
        return cls.from_dict(json.loads(text))

    def write(self, path):
        atomic_write_text(path, self.dumps())

    @classmethod
    def read(cls, path):
        with open(path, encoding="utf-8") as handle:
            return cls.loads(handle.read())


def parse_dataset(text: str, label: str = "") -> Dataset:
    """Parse `n,x` CSV text into a Dataset.

    Comment lines start with '#'; blank lines are ignored; rows are sorted
    ascending by n.  Missing/odd header, non-numeric cells, duplicate n or
    fewer than 2 data rows raise DatasetParseError naming the line.
    """
    lines = text.splitlines()
    rows = []
    header_seen = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not header_seen:
            cells = [c.strip() for c in line.split(",")]
            if cells != ["n", "x"]:
                raise DatasetParseError(f"expected header 'n,x', got {line!r}", line=lineno)
            header_seen = True
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 2:
            raise DatasetParseError(f"expected 2 columns, got {len(cells)}", line=lineno)
        try:
            n = float(cells[0])
            x = float(cells[1])
        except ValueError:
            raise DatasetParseError(f"non-numeric cell in {line!r}", line=lineno) from None
        if not (np.isfinite(n) and np.isfinite(x)):
            raise DatasetParseError(f"non-finite value in {line!r}", line=lineno)
        rows.append((n, x, lineno))
    if not header_seen:
        raise DatasetParseError("missing 'n,x' header", line=len(lines) or 1)
    if len(rows) < 2:
        raise DatasetParseError(
            f"need at least 2 data rows, got {len(rows)}", line=len(lines) or 1
        )
    rows.sort(key=lambda r: r[0])
    for (n1, _, _), (n2, _, line2) in zip(rows, rows[1:]):
        if n1 == n2:
            raise DatasetParseError(f"duplicate n value {n1!r}", line=line2)
    return Dataset(
        n=np.array([r[0] for r in rows]),
        x=np.array([r[1] for r in rows]),
        label=label,
    )


def serialize_dataset(data: Dataset) -> str:
    lines = ["n,x"]
    for n, x in zip(data.n, data.x):
        lines.append(f"{format_float(n)},{format_float(x)}")
    return "\n".join(lines) + "\n"


def normalize_axis(data: Dataset, mode: str) -> Dataset:
    """Rescale the size axis.

    first-to-one   n_i <- n_i / n_1  (first point lands on N = 1)
    range-1-100    affine map sending (n_first, n_last) to (1, 100)
    none           identity

    Both published conventions are available; neither is canonical, so pick
    explicitly.
    """
    if mode not in NORMALIZE_MODES:
        raise ValueError(f"unknown normalize mode {mode!r}; choose from {NORMALIZE_MODES}")
    if mode == "none":
        return data
    if mode == "first-to-one":
        return Dataset(n=data.n / data.n[0], x=data.x.copy(), label=data.label)
    span = data.n[-1] - data.n[0]
    if span == 0:
        raise ValueError("degenerate range: first and last n coincide")
    scaled = 1.0 + 99.0 * (data.n - data.n[0]) / span
    return Dataset(n=scaled, x=data.x.copy(), label=data.label)


def _csv(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join("" if v is None else format_float(v) for v in row))
    return "\n".join(lines) + "\n"


def curve_csv(sweep_result) -> str:
    """Sweep rows as `n,s,g,f,x,speedup` (speedup empty when undefined)."""
    return _csv(
        ("n", "s", "g", "f", "x", "speedup"),
        ((r.n, r.s, r.g, r.f, r.throughput, r.speedup) for r in sweep_result),
    )


def ssa_stats_csv(stats) -> str:
    rows = (
        (
            stats.times[i],
            stats.mean[i, 0],
            stats.mean[i, 1],
            stats.mean[i, 2],
            stats.var[i, 0],
            stats.var[i, 1],
            stats.var[i, 2],
        )
        for i in range(len(stats.times))
    )
    return _csv(("t", "mean_s", "mean_g", "mean_f", "var_s", "var_g", "var_f"), rows)


def laws_csv(n_values, speedups) -> str:
    return _csv(("n", "speedup"), zip(n_values, speedups))
