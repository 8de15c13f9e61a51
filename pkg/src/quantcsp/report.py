"""Run reports and the optional report directory (CSV + rendered figures).

Reports serialise deterministically: identical runs produce identical
JSON except for the timing field.  When a report directory is requested,
commands additionally drop delimited data files and matplotlib renderings
next to the JSON.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import quantale as qv


@dataclass
class RunReport:
    command: list
    input_digest: Optional[str] = None
    verdict: Optional[str] = None
    value: object = None
    witness: object = None
    stats: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    timing_ms: float = 0.0

    def to_dict(self):
        out = {
            "command": list(self.command),
            "inputDigest": self.input_digest,
            "verdict": self.verdict,
            "value": self.value,
            "witness": self.witness,
            "stats": dict(self.stats),
        }
        out.update(self.extra)
        out["timingMs"] = round(self.timing_ms, 3)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def digest_file(path) -> str:
    data = Path(path).read_bytes()
    return "sha256:" + hashlib.sha256(data).hexdigest()


def render_number(value, decimal: bool = False):
    """Exact JSON rendering of a rational/extended-real; optionally decimal."""
    if isinstance(value, qv.QuantaleValue):
        if value.quantale is qv.TWO:
            return bool(value.payload)
        p = value.payload
        if p == qv.POS_INF:
            return "inf"
        if p == qv.NEG_INF:
            return "-inf"
        value = p
    if isinstance(value, Fraction):
        if decimal:
            return float(value)
        if value.denominator == 1:
            return value.numerator
        return f"{value.numerator}/{value.denominator}"
    return value


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _finite_float(value) -> Optional[float]:
    if isinstance(value, qv.QuantaleValue):
        value = value.payload
    f = float(value)
    if f in (float("inf"), float("-inf")):
        return None
    return f


def render_alpha_profile(candidates, satisfiable, optimum, path):
    """Step profile of sublevel satisfiability across candidate thresholds."""
    plt = _plt()
    xs, ys = [], []
    for alpha, sat in zip(candidates, satisfiable):
        f = _finite_float(alpha)
        if f is not None:
            xs.append(f)
            ys.append(1 if sat else 0)
    fig, ax = plt.subplots(figsize=(6, 2.8))
    if xs:
        ax.step(xs, ys, where="post", color="tab:blue")
        ax.plot(xs, ys, "o", color="tab:blue", ms=4)
    opt = _finite_float(optimum)
    if opt is not None:
        ax.axvline(opt, color="tab:red", ls="--", lw=1, label="optimum")
        ax.legend(loc="lower right", fontsize=8)
    ax.set_xlabel("threshold")
    ax.set_ylabel("satisfiable")
    ax.set_yticks([0, 1])
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_schedule(rows, path):
    """Gantt-style bars; rows are (activity, start, processing, due)."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 0.5 * max(2, len(rows)) + 1))
    labels = []
    for pos, (activity, start, proc, due) in enumerate(rows):
        ax.barh(pos, proc, left=start, height=0.5, color="tab:blue", alpha=0.8)
        ax.plot([due], [pos], "v", color="tab:red", ms=8)
        labels.append(str(activity))
    ax.set_yticks(range(len(rows)))
    ax.set_yticklabels(labels)
    ax.invert_yaxis()
    ax.set_xlabel("time (red marker = due date)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_curve(points, values, counterexample, path):
    """One-dimensional sample plot with the violating mixture highlighted."""
    plt = _plt()
    fig, ax = plt.subplots(figsize=(6, 3.2))
    xs = [float(p[0]) for p in points]
    ys = [_finite_float(v) for v in values]
    pairs = sorted(
        (x, y) for x, y in zip(xs, ys) if y is not None
    )
    if pairs:
        ax.plot([p[0] for p in pairs], [p[1] for p in pairs], "o-", color="tab:blue")
    if counterexample is not None:
        x, y, lam = counterexample
        mid = lam * x[0] + (1 - lam) * y[0]
        ax.axvline(float(mid), color="tab:red", ls="--", lw=1, label="violating mixture")
        ax.legend(loc="best", fontsize=8)
    ax.set_xlabel("sample")
    ax.set_ylabel("value")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
