"""Aggregation of per-case scores into report artifacts.

Produces the system-by-metric tables, the style/meaning trade-off scatter
with its Pareto frontier (CSV + SVG + PNG), per-system descriptor
frequency tables, and a plain-text qualitative dump.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass

from .pipeline import PipelineRun
from .scores import ScoreVector

DISPLAY_NAMES = {
    "copy": "Copy",
    "target": "Target",
    "gold": "Gold",
    "simple": "Simple",
    "styll": "STYLL",
    "rg": "RG",
    "rg_contrastive": "RG-Contrastive",
}

SYSTEM_ORDER = ("copy", "target", "gold", "simple", "styll", "rg", "rg_contrastive")


@dataclass(frozen=True)
class SystemPoint:
    system: str
    x: float
    y: float
    n_cases: int


@dataclass(frozen=True)
class FrequencyTable:
    entries: tuple[tuple[str, int], ...]
    k: int


def pareto_frontier(points: list[SystemPoint]) -> list[SystemPoint]:
    """Non-dominated points under joint maximization, sorted by x.

    A point is dominated when another is at least as good on both axes
    and strictly better on one; coordinate duplicates all survive.
    """
    if not points:
        return []
    ordered = sorted(points, key=lambda p: (-p.x, -p.y))
    survivors: list[SystemPoint] = []
    best_y_higher_x = float("-inf")
    index = 0
    while index < len(ordered):
        group_end = index
        while group_end < len(ordered) and ordered[group_end].x == ordered[index].x:
            group_end += 1
        group = ordered[index:group_end]
        group_max_y = max(p.y for p in group)
        if group_max_y > best_y_higher_x:
            survivors.extend(p for p in group if p.y == group_max_y)
        best_y_higher_x = max(best_y_higher_x, group_max_y)
        index = group_end
    return sorted(survivors, key=lambda p: (p.x, p.y, p.system))


def descriptor_frequency(runs: list[PipelineRun], k: int = 15) -> FrequencyTable:
    """Top-k descriptors, counting each at most once per run."""
    counts: Counter = Counter()
    for run in runs:
        if run.descriptors:
            counts.update(set(run.descriptors))
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return FrequencyTable(tuple(ranked[:k]), k)


# --- tables ------------------------------------------------------------------

@dataclass
class SystemSummary:
    system: str
    n_scored: int
    n_degraded: int
    means: dict[str, float | None]
    formality_accuracy: float | None = None


def summarize_systems(
    results: dict[str, list[tuple[PipelineRun, ScoreVector | None]]],
) -> list[SystemSummary]:
    """Per-system metric means over non-degraded, scored cases."""
    from .scores import formality_accuracy as formality_pass

    summaries = []
    ordered = [s for s in SYSTEM_ORDER if s in results]
    ordered += [s for s in sorted(results) if s not in SYSTEM_ORDER]
    for system in ordered:
        pairs = results[system]
        degraded = sum(1 for run, _ in pairs if run.degraded)
        scored = [(run, sv) for run, sv in pairs if not run.degraded and sv is not None]
        means: dict[str, float | None] = {}
        for name in ScoreVector.metric_names():
            values = [
                getattr(sv, name) for _, sv in scored if getattr(sv, name) is not None
            ]
            means[name] = sum(values) / len(values) if values else None
        accuracy = None
        checks = []
        for run, sv in scored:
            desired = run.meta.get("desired_formality")
            if desired and sv.formality_prob is not None:
                checks.append(formality_pass(sv.formality_prob, desired))
        if checks:
            accuracy = sum(checks) / len(checks)
        summaries.append(
            SystemSummary(system, len(scored), degraded, means, accuracy)
        )
    return summaries


def _format_cell(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def metrics_csv(summaries: list[SystemSummary], columns: list[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["system", "n_scored", "n_degraded", *columns, "formality_accuracy"])
    for s in summaries:
        writer.writerow(
            [
                DISPLAY_NAMES.get(s.system, s.system),
                s.n_scored,
                s.n_degraded,
                *[_format_cell(s.means.get(c)) for c in columns],
                _format_cell(s.formality_accuracy),
            ]
        )
    return buffer.getvalue()


def metrics_text_table(summaries: list[SystemSummary], columns: list[str]) -> str:
    header = ["system", "n", "degraded", *columns]
    rows = [header]
    for s in summaries:
        rows.append(
            [
                DISPLAY_NAMES.get(s.system, s.system),
                str(s.n_scored),
                str(s.n_degraded),
                *[_format_cell(s.means.get(c)) or "-" for c in columns],
            ]
        )
    widths = [max(len(row[i]) for row in rows) for i in range(len(header))]
    lines = []
    for index, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if index == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def frequency_csv(table: FrequencyTable) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["descriptor", "count"])
    for descriptor, count in table.entries:
        writer.writerow([descriptor, count])
    return buffer.getvalue()


# --- scatter emission --------------------------------------------------------

_SVG_WIDTH = 640
_SVG_HEIGHT = 480
_SVG_MARGIN = 60
_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f",
)


def points_csv(points: list[SystemPoint], frontier: list[SystemPoint]) -> str:
    on_frontier = {id(p) for p in frontier}
    frontier_keys = {(p.system, p.x, p.y) for p in frontier}
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["system", "x", "y", "n_cases", "on_frontier"])
    for p in points:
        flag = id(p) in on_frontier or (p.system, p.x, p.y) in frontier_keys
        writer.writerow([p.system, repr(p.x), repr(p.y), p.n_cases, "true" if flag else "false"])
    return buffer.getvalue()


def _scales(points: list[SystemPoint]):
    if points:
        xs = [p.x for p in points]
        ys = [p.y for p in points]
        x_min, x_max = min(xs), max(xs)
        y_min, y_max = min(ys), max(ys)
    else:
        x_min = y_min = 0.0
        x_max = y_max = 1.0
    if x_max == x_min:
        x_min, x_max = x_min - 0.5, x_max + 0.5
    if y_max == y_min:
        y_min, y_max = y_min - 0.5, y_max + 0.5
    span_x = _SVG_WIDTH - 2 * _SVG_MARGIN
    span_y = _SVG_HEIGHT - 2 * _SVG_MARGIN

    def to_px(p: SystemPoint) -> tuple[float, float]:
        px = _SVG_MARGIN + (p.x - x_min) / (x_max - x_min) * span_x
        py = _SVG_HEIGHT - _SVG_MARGIN - (p.y - y_min) / (y_max - y_min) * span_y
        return px, py

    return to_px


def points_svg(points: list[SystemPoint], frontier: list[SystemPoint],
               x_label: str = "style transfer strength",
               y_label: str = "meaning preservation") -> str:
    """Deterministic standalone SVG scatter with the frontier polyline."""
    to_px = _scales(points)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_WIDTH}" '
        f'height="{_SVG_HEIGHT}" viewBox="0 0 {_SVG_WIDTH} {_SVG_HEIGHT}">',
        f'<rect width="{_SVG_WIDTH}" height="{_SVG_HEIGHT}" fill="white"/>',
        f'<line x1="{_SVG_MARGIN}" y1="{_SVG_HEIGHT - _SVG_MARGIN}" '
        f'x2="{_SVG_WIDTH - _SVG_MARGIN}" y2="{_SVG_HEIGHT - _SVG_MARGIN}" '
        'stroke="black" stroke-width="1"/>',
        f'<line x1="{_SVG_MARGIN}" y1="{_SVG_MARGIN}" x2="{_SVG_MARGIN}" '
        f'y2="{_SVG_HEIGHT - _SVG_MARGIN}" stroke="black" stroke-width="1"/>',
        f'<text x="{_SVG_WIDTH // 2}" y="{_SVG_HEIGHT - 20}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">{x_label}</text>',
        f'<text x="20" y="{_SVG_HEIGHT // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 20 {_SVG_HEIGHT // 2})">{y_label}</text>',
    ]
    if frontier:
        path = " ".join(
            f"{to_px(p)[0]:.2f},{to_px(p)[1]:.2f}" for p in frontier
        )
        lines.append(
            f'<polyline points="{path}" fill="none" stroke="#555555" '
            'stroke-width="1.5" stroke-dasharray="5,3"/>'
        )
    for index, p in enumerate(points):
        px, py = to_px(p)
        color = _PALETTE[index % len(_PALETTE)]
        label = DISPLAY_NAMES.get(p.system, p.system)
        lines.append(
            f'<circle cx="{px:.2f}" cy="{py:.2f}" r="5" fill="{color}">'
            f"<title>{label}</title></circle>"
        )
        lines.append(
            f'<text x="{px + 8:.2f}" y="{py - 6:.2f}" font-family="sans-serif" '
            f'font-size="11">{label}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_scatter_png(points: list[SystemPoint], frontier: list[SystemPoint],
                       path: str,
                       x_label: str = "style transfer strength",
                       y_label: str = "meaning preservation") -> None:
    """Matplotlib rendering of the same scatter, for the report directory."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for index, p in enumerate(points):
        label = DISPLAY_NAMES.get(p.system, p.system)
        ax.scatter([p.x], [p.y], color=_PALETTE[index % len(_PALETTE)], label=label, s=42)
        ax.annotate(label, (p.x, p.y), textcoords="offset points", xytext=(6, 5),
                    fontsize=8)
    if frontier:
        ax.plot([p.x for p in frontier], [p.y for p in frontier],
                linestyle="--", color="#555555", linewidth=1.2)
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.set_title("style/meaning trade-off")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def output_dump(cases, runs_by_system: dict[str, dict[str, PipelineRun]]) -> str:
    """Qualitative dump: target, input, then each system's output per case."""
    sections = []
    ordered = [s for s in SYSTEM_ORDER if s in runs_by_system]
    for case in cases:
        lines = [
            f"=== Case {case.case_id} ===",
            "Target (style exemplar):",
            case.style_exemplar,
            "",
            "Input:",
            case.input_text,
            "",
        ]
        for system in ordered:
            run = runs_by_system[system].get(case.case_id)
            if run is None:
                continue
            name = DISPLAY_NAMES.get(system, system)
            if run.degraded:
                lines.append(f"Output ({name}): [degraded: {run.meta.get('error', 'unknown')}]")
            else:
                lines.append(f"Output ({name}):")
                lines.append(run.output_text)
            lines.append("")
        sections.append("\n".join(lines))
    return "\n".join(sections)
