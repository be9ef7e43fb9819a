"""Set summaries, CSV tables, figure data and minimal SVG charts."""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean

from .protocols import ROW_COLUMNS

SUMMARY_COLUMNS = ("set", "attempted", "sampled", "mean_acc", "min_acc", "pct_perfect", "avg_min_neurons")
GROUPS = (("under", range(-5, 0)), ("onphase", range(0, 1)), ("over", range(1, 6)))
FIGURES = ("fig_percent_learned", "fig_avg_neurons")


@dataclass
class SetSummary:
    label: str
    attempted: int
    sampled: int
    mean_accuracy: float | None
    min_accuracy: float | None
    percent_perfect: float | None
    avg_min_neurons: float | None
    skip_reasons: dict[str, int] = field(default_factory=dict)
    param: str = ""
    level: str = ""
    activation: str = ""

    @property
    def empty(self) -> bool:
        return self.sampled == 0


def summarize(rows: list[dict]) -> list[SetSummary]:
    """One summary per set, in first-appearance order; skipped rows count only as attempted.

    min_accuracy is the lowest per-formula mean accuracy in the set.
    avg_min_neurons averages over learned formulas only.
    """
    by_set: dict[str, list[dict]] = {}
    for r in rows:
        by_set.setdefault(r["set"], []).append(r)
    out = []
    for label, rs in by_set.items():
        ok = [r for r in rs if r["status"] == "ok"]
        reasons = Counter(r["reason"] for r in rs if r["status"] != "ok")
        neurons = [r["min_neurons"] for r in ok if r["min_neurons"] is not None]
        accs = [r["mean_acc"] for r in ok]
        out.append(SetSummary(
            label, len(rs), len(ok),
            fmean(accs) if accs else None,
            min(accs) if accs else None,
            100.0 * sum(bool(r["perfect"]) for r in ok) / len(ok) if ok else None,
            fmean(neurons) if neurons else None,
            dict(sorted(reasons.items())),
            str(rs[0]["param"]), str(rs[0]["level"] or ""), str(rs[0]["activation"] or ""),
        ))
    return out


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def _csv(header, lines) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(lines)
    return buf.getvalue()


def rows_csv(rows: list[dict]) -> str:
    return _csv(ROW_COLUMNS, ([_cell(r[c]) for c in ROW_COLUMNS] for r in rows))


def summary_csv(summaries: list[SetSummary]) -> str:
    return _csv(SUMMARY_COLUMNS, ([s.label, s.attempted, s.sampled, _cell(s.mean_accuracy),
                                   _cell(s.min_accuracy), _cell(s.percent_perfect),
                                   _cell(s.avg_min_neurons)] for s in summaries))


def _mean_defined(vals):
    vals = [v for v in vals if v is not None]
    return fmean(vals) if vals else None


def figure_series(summaries: list[SetSummary]) -> dict[str, list[tuple[str, str, float | None]]]:
    """(series, x, y) points per figure.

    Phase sets give one series per (variable count, activation) over the 11
    levels, plus grouped under/onphase/over series over the variable counts;
    a group's value is the mean of its defined levels. Cop sets plot percent
    perfect against their node count or morph ratio; ingest sets have no
    figure data.
    """
    figs: dict[str, list] = {name: [] for name in FIGURES}
    phase = [s for s in summaries if s.level != ""]
    if not phase:
        for s in summaries:
            if s.label != "ingest":
                figs["fig_percent_learned"].append((s.label.split("_")[0], s.param, s.percent_perfect))
        return figs
    table = {(s.activation, int(s.param), int(s.level)): s for s in phase}
    acts = list(dict.fromkeys(s.activation for s in phase))
    vs = sorted({int(s.param) for s in phase})
    for name, attr in zip(FIGURES, ("percent_perfect", "avg_min_neurons")):
        for act in acts:
            for v in vs:
                for level in range(-5, 6):
                    s = table.get((act, v, level))
                    figs[name].append((f"v{v}_{act}", str(level), None if s is None else getattr(s, attr)))
        for act in acts:
            for group, levels in GROUPS:
                for v in vs:
                    vals = [getattr(table[(act, v, l)], attr) for l in levels if (act, v, l) in table]
                    figs[name].append((f"{group}_{act}", str(v), _mean_defined(vals)))
    return figs


def figure_csv(points) -> str:
    return _csv(("series", "x", "y"), ([s, x, _cell(y)] for s, x, y in points))


PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
           "#bcbd22", "#17becf")


def svg_chart(title: str, points) -> str:
    """Polyline chart; a missing y breaks the line. Series keep their CSV order."""
    W, H, L, R, T, B = 640, 400, 60, 150, 30, 40
    series: dict[str, list[tuple[float, float | None]]] = {}
    for s, x, y in points:
        series.setdefault(s, []).append((float(x), y))
    xs = [x for pts in series.values() for x, _ in pts] or [0.0, 1.0]
    ys = [y for pts in series.values() for _, y in pts if y is not None] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(0.0, min(ys)), max(ys)
    x1 = x1 if x1 > x0 else x0 + 1
    y1 = y1 if y1 > y0 else y0 + 1

    def px(x):
        return L + (x - x0) / (x1 - x0) * (W - L - R)

    def py(y):
        return H - B - (y - y0) / (y1 - y0) * (H - T - B)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
           f'<rect x="{L}" y="{T}" width="{W - L - R}" height="{H - T - B}" fill="none" stroke="#000"/>',
           f'<text x="{L}" y="20" font-size="14">{title}</text>',
           f'<text x="{L}" y="{H - 10}" font-size="11">{x0:g}</text>',
           f'<text x="{W - R}" y="{H - 10}" font-size="11" text-anchor="end">{x1:g}</text>',
           f'<text x="{L - 5}" y="{H - B}" font-size="11" text-anchor="end">{y0:g}</text>',
           f'<text x="{L - 5}" y="{T + 10}" font-size="11" text-anchor="end">{y1:g}</text>']
    for i, (name, pts) in enumerate(series.items()):
        color = PALETTE[i % len(PALETTE)]
        run: list[str] = []
        for x, y in pts + [(0.0, None)]:
            if y is None:
                if len(run) > 1:
                    out.append(f'<polyline fill="none" stroke="{color}" points="{" ".join(run)}"/>')
                elif run:
                    cx, cy = run[0].split(",")
                    out.append(f'<circle cx="{cx}" cy="{cy}" r="2" fill="{color}"/>')
                run = []
            else:
                run.append(f"{px(x):.2f},{py(y):.2f}")
        ly = T + 12 + 14 * i
        out.append(f'<text x="{W - R + 8}" y="{ly}" font-size="11" fill="{color}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_report(rows: list[dict], summaries: list[SetSummary] | None, outdir) -> list[Path]:
    """Write rows.csv, summary.csv, figure CSVs and one SVG per figure; returns the paths.

    Output bytes depend only on the rows, so regenerating is idempotent.
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    summaries = summarize(rows) if summaries is None else summaries
    files = {"rows.csv": rows_csv(rows), "summary.csv": summary_csv(summaries)}
    for name, points in figure_series(summaries).items():
        files[f"{name}.csv"] = figure_csv(points)
        files[f"{name}.svg"] = svg_chart(name.replace("fig_", "").replace("_", " "), points)
    paths = []
    for name, text in files.items():
        p = out / name
        p.write_text(text)
        paths.append(p)
    return paths


def load_rows_csv(path) -> list[dict]:
    """Rows back from rows.csv, typed like freshly computed rows."""
    ints = {"index", "seed", "num_vars", "num_clauses", "positives", "negatives", "model_count", "min_neurons"}
    floats = {"mean_acc", "min_acc", "dt_mean_acc", "dt_min_acc"}
    out = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            row = {}
            for k in ROW_COLUMNS:
                v = rec[k]
                if k in ints:
                    row[k] = int(v) if v != "" else None
                elif k in floats:
                    row[k] = float(v) if v != "" else None
                elif k == "perfect":
                    row[k] = None if v == "" else v == "1"
                else:
                    row[k] = v
            out.append(row)
    return out
