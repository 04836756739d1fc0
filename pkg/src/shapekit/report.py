"""Delimited tables and figures for the statistics reports.

Writers produce byte-identical output for identical inputs: CSV rows follow
the deterministic predicate order and figures are rendered with the Agg
backend with PNG metadata stripped.
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .stats import CooccurrenceMatrix, PredicateStats, value_text
from .terms import local_name


def predicate_table_csv(rows: list[PredicateStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["predicate", "nodes_with_predicate", "sample_size", "min", "max", "mean", "mean_decimal"]
    )
    for row in rows:
        writer.writerow(
            [
                row.predicate,
                row.nodes_with_predicate,
                row.sample_size,
                row.min_occurs,
                row.max_occurs,
                str(row.mean_occurs),
                f"{float(row.mean_occurs):.4f}",
            ]
        )
    return buf.getvalue()


def lattice_csv(stats: PredicateStats) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["option", "direct", "accumulated", "parent"])
    parents = dict(stats.edges)
    for a in stats.annotations:
        text = value_text(a.option)
        writer.writerow([text, a.direct, a.accumulated, parents.get(text, "")])
    return buf.getvalue()


def cooccurrence_csv(matrix: CooccurrenceMatrix) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["predicate", *matrix.predicates])
    for p in matrix.predicates:
        writer.writerow([p, *(matrix.get(p, q) for q in matrix.predicates)])
    return buf.getvalue()


def predicate_table_text(rows: list[PredicateStats]) -> str:
    headers = ["predicate", "nodes", "min", "max", "mean"]
    table = [
        [
            row.predicate,
            str(row.nodes_with_predicate),
            str(row.min_occurs),
            str(row.max_occurs),
            f"{str(row.mean_occurs)} ({float(row.mean_occurs):.2f})",
        ]
        for row in rows
    ]
    widths = [max(len(h), *(len(r[i]) for r in table)) if table else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    for r in table:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines)


def lattice_text(stats: PredicateStats) -> str:
    lines = [f"value lattice for {stats.predicate} (direct; accumulated):"]
    for a in stats.annotations:
        lines.append(f"  {value_text(a.option)}  ({a.direct}; {a.accumulated})")
    return "\n".join(lines)


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)


def occurrence_figure(rows: list[PredicateStats]) -> "plt.Figure":
    fig, ax = plt.subplots(figsize=(8, max(2.5, 0.4 * len(rows) + 1)))
    names = [local_name(r.predicate) for r in rows]
    ax.barh(names, [r.nodes_with_predicate for r in rows], color="#4878a8")
    ax.set_xlabel("sample nodes carrying the predicate")
    ax.invert_yaxis()
    fig.tight_layout()
    return fig


def cooccurrence_figure(matrix: CooccurrenceMatrix) -> "plt.Figure":
    names = [local_name(p) for p in matrix.predicates]
    n = len(names)
    data = [[matrix.get(p, q) for q in matrix.predicates] for p in matrix.predicates]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.55 * n + 2), max(3.5, 0.55 * n + 1.5)))
    image = ax.imshow(data, cmap="Blues")
    ax.set_xticks(range(n), names, rotation=45, ha="right")
    ax.set_yticks(range(n), names)
    for i in range(n):
        for j in range(n):
            ax.text(j, i, str(data[i][j]), ha="center", va="center", fontsize=8)
    fig.colorbar(image, ax=ax, shrink=0.8)
    ax.set_title("predicate co-occurrence")
    fig.tight_layout()
    return fig


def lattice_figure(stats: PredicateStats) -> "plt.Figure":
    """Annotated option tree, laid out by depth from the top option."""
    parents = dict(stats.edges)
    children: dict[str, list[str]] = {}
    names = [value_text(a.option) for a in stats.annotations]
    for name in names:
        parent = parents.get(name)
        if parent is not None:
            children.setdefault(parent, []).append(name)
    roots = [n for n in names if n not in parents]
    votes = {value_text(a.option): (a.direct, a.accumulated) for a in stats.annotations}

    positions: dict[str, tuple[float, float]] = {}
    next_y = [0.0]

    def layout(node: str, depth: int) -> float:
        kids = children.get(node, ())
        if not kids:
            y = next_y[0]
            next_y[0] += 1.0
        else:
            ys = [layout(k, depth + 1) for k in kids]
            y = sum(ys) / len(ys)
        positions[node] = (float(depth), y)
        return y

    for root in roots:
        layout(root, 0)
    fig, ax = plt.subplots(figsize=(9, max(2.5, 0.6 * len(names))))
    for child, parent in parents.items():
        x1, y1 = positions[child]
        x2, y2 = positions[parent]
        ax.plot([x1, x2], [y1, y2], color="#999999", lw=1, zorder=1)
    for name, (x, y) in positions.items():
        direct, acc = votes[name]
        ax.annotate(
            f"{name}\n({direct}; {acc})",
            (x, y),
            ha="center",
            va="center",
            fontsize=8,
            bbox={"boxstyle": "round,pad=0.3", "fc": "#eef3fa", "ec": "#4878a8"},
            zorder=2,
        )
    ax.set_xlim(-0.6, max(x for x, _ in positions.values()) + 0.6 if positions else 1)
    ax.set_ylim(-1, next_y[0])
    ax.invert_xaxis()  # most general option on the right
    ax.axis("off")
    ax.set_title(f"value options for {local_name(stats.predicate)} (direct; accumulated)")
    fig.tight_layout()
    return fig


def write_stats_report(
    rows: list[PredicateStats],
    matrix: CooccurrenceMatrix,
    out_dir: str | Path,
    focus: PredicateStats | None = None,
) -> list[Path]:
    """Write CSV tables and PNG figures into `out_dir`; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def write_text(name: str, content: str) -> None:
        path = out / name
        path.write_text(content, encoding="utf-8")
        written.append(path)

    write_text("predicates.csv", predicate_table_csv(rows))
    write_text("cooccurrence.csv", cooccurrence_csv(matrix))
    fig_path = out / "predicate_occurrences.png"
    _save(occurrence_figure(rows), fig_path)
    written.append(fig_path)
    heat_path = out / "cooccurrence.png"
    _save(cooccurrence_figure(matrix), heat_path)
    written.append(heat_path)
    if focus is not None:
        stem = local_name(focus.predicate)
        write_text(f"lattice_{stem}.csv", lattice_csv(focus))
        if focus.annotations:
            lat_path = out / f"lattice_{stem}.png"
            _save(lattice_figure(focus), lat_path)
            written.append(lat_path)
    return written
