"""CSV rows and self-contained SVG charts. No timestamps, so output is reproducible."""
from __future__ import annotations

import csv
import io
import math
from typing import Optional, Sequence

from .analysis import StopReason, SweepRecord, Trajectory
from .core import Arith, fixed_point, format_scalar, l1_distance

TRAJECTORY_HEADER = ["m", "x", "y", "u", "v", "alpha", "beta", "dist_to_s0"]
SWEEP_HEADER = ["index", "x", "y", "u", "v", "iterations_to_eps", "final_distance", "stop_reason"]

# viridis anchor colours, low to high
_PALETTE = [(68, 1, 84), (59, 82, 139), (33, 145, 140), (94, 201, 98), (253, 231, 37)]


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def trajectory_rows(traj: Trajectory) -> list:
    target = fixed_point(traj.states[0].arith)
    rows = []
    for m, s in enumerate(traj.states):
        r = traj.reduced[m - 2] if m >= 2 else None
        alpha = format_scalar(r.alpha) if r is not None else ""
        beta = format_scalar(r.beta) if r is not None else ""
        rows.append([m, *(format_scalar(c) for c in s), alpha, beta, format_scalar(l1_distance(s, target))])
    return rows


def trajectory_csv(traj: Trajectory) -> str:
    return _csv_text(TRAJECTORY_HEADER, trajectory_rows(traj))


def sweep_csv(records: Sequence[SweepRecord], exact_initial: bool = True) -> str:
    rows = []
    for rec in records:
        init = rec.initial if exact_initial else rec.initial.to(Arith.FLOAT)
        rows.append(
            [
                rec.index,
                *(format_scalar(c) for c in init),
                "" if rec.iterations_to_eps is None else rec.iterations_to_eps,
                repr(float(rec.final_distance)),
                rec.stop_reason.value,
            ]
        )
    return _csv_text(SWEEP_HEADER, rows)


def _colour(t: float) -> str:
    t = min(max(t, 0.0), 1.0) * (len(_PALETTE) - 1)
    i = min(int(t), len(_PALETTE) - 2)
    f = t - i
    c = [round(a + (b - a) * f) for a, b in zip(_PALETTE[i], _PALETTE[i + 1])]
    return "#%02x%02x%02x" % tuple(c)


def _f(v: float) -> str:
    return f"{v:.2f}"


def _svg(width: int, height: int, body: list) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">'
    )
    return "\n".join([head, f'<rect width="{width}" height="{height}" fill="white"/>', *body, "</svg>"]) + "\n"


def _frame(x0, y0, w, h, title, xlabel, ylabel, xr, yr) -> list:
    return [
        f'<rect x="{x0}" y="{y0}" width="{w}" height="{h}" fill="none" stroke="black"/>',
        f'<text x="{x0 + w / 2}" y="{y0 - 8}" text-anchor="middle">{title}</text>',
        f'<text x="{x0 + w / 2}" y="{y0 + h + 28}" text-anchor="middle">{xlabel}</text>',
        f'<text x="{x0 - 30}" y="{y0 + h / 2}" text-anchor="middle" transform="rotate(-90 {x0 - 30} {y0 + h / 2})">{ylabel}</text>',
        f'<text x="{x0}" y="{y0 + h + 14}" text-anchor="middle">{xr[0]:g}</text>',
        f'<text x="{x0 + w}" y="{y0 + h + 14}" text-anchor="middle">{xr[1]:g}</text>',
        f'<text x="{x0 - 4}" y="{y0 + h}" text-anchor="end">{yr[0]:g}</text>',
        f'<text x="{x0 - 4}" y="{y0 + 4}" text-anchor="end">{yr[1]:g}</text>',
    ]


def trajectory_svg(traj: Trajectory) -> str:
    """Phase portrait of (alpha, beta) over [0,4] x [0,1] and coordinates vs step."""
    body = []
    x0, y0, w, h = 60, 40, 360, 240
    body += _frame(x0, y0, w, h, "reduced orbit (alpha, beta)", "alpha", "beta", (0, 4), (0, 1))
    pts = [(float(r.alpha), float(r.beta)) for r in traj.reduced if r is not None]
    if pts:
        coords = [(x0 + a / 4 * w, y0 + h - b * h) for a, b in pts]
        body.append(
            '<polyline fill="none" stroke="#3b528b" stroke-width="1" points="'
            + " ".join(f"{_f(px)},{_f(py)}" for px, py in coords)
            + '"/>'
        )
        for (px, py), k in zip(coords, range(len(coords))):
            if k < 50 or k == len(coords) - 1:
                body.append(f'<circle cx="{_f(px)}" cy="{_f(py)}" r="2" fill="#21918c"/>')
    x1 = x0 + w + 90
    body += _frame(x1, y0, w, h, "genotype frequencies", "generation m", "frequency", (0, len(traj.states) - 1), (0, 1))
    n = max(len(traj.states) - 1, 1)
    colours = ["#440154", "#3b528b", "#21918c", "#fde725"]
    for c, (name, colour) in enumerate(zip("xyuv", colours)):
        series = [float(s.as_tuple()[c]) for s in traj.states]
        body.append(
            f'<polyline fill="none" stroke="{colour}" stroke-width="1.2" points="'
            + " ".join(f"{_f(x1 + k / n * w)},{_f(y0 + h - val * h)}" for k, val in enumerate(series))
            + '"/>'
        )
        body.append(f'<text x="{x1 + w + 8}" y="{y0 + 14 * (c + 1)}" fill="{colour}">{name}</text>')
    return _svg(x1 + w + 40, y0 + h + 50, body)


SLICES = {
    "y=v": lambda s: s.y == s.v,
    "y=0": lambda s: s.y == 0,
    "v=0": lambda s: s.v == 0,
}


def sweep_svg(records: Sequence[SweepRecord], grid: int, slice_name: str = "y=v") -> str:
    """Heatmap of iterations-to-eps over the (x, u) plane of a lattice slice.

    Only lattice points satisfying the slice relation are drawn; grey cells
    did not reach eps within the budget.
    """
    keep = SLICES[slice_name]
    chosen = [r for r in records if keep(r.initial)]
    reached = [r.iterations_to_eps for r in chosen if r.iterations_to_eps is not None]
    top = math.log1p(max(reached)) if reached else 1.0
    x0, y0, size = 60, 40, 360
    cell = size / (grid + 1)
    body = _frame(x0, y0, size, size, f"iterations to eps, slice {slice_name}", "x", "u", (0, 1), (0, 1))
    for r in chosen:
        x, u = float(r.initial.x), float(r.initial.u)
        px = x0 + x * grid * cell
        py = y0 + size - (u * grid + 1) * cell
        fill = "#bbbbbb" if r.iterations_to_eps is None else _colour(math.log1p(r.iterations_to_eps) / top)
        body.append(
            f'<rect x="{_f(px)}" y="{_f(py)}" width="{_f(cell)}" height="{_f(cell)}" fill="{fill}">'
            f"<title>({format_scalar(r.initial.x)}, {format_scalar(r.initial.y)}, "
            f"{format_scalar(r.initial.u)}, {format_scalar(r.initial.v)}): {r.iterations_to_eps}</title></rect>"
        )
    lx = x0 + size + 30
    for k in range(11):
        t = k / 10
        body.append(f'<rect x="{lx}" y="{_f(y0 + size - (k + 1) * size / 11)}" width="16" height="{_f(size / 11)}" fill="{_colour(t)}"/>')
    body.append(f'<text x="{lx + 20}" y="{y0 + size}">0</text>')
    body.append(f'<text x="{lx + 20}" y="{y0 + 10}">{max(reached) if reached else 0}</text>')
    return _svg(lx + 90, y0 + size + 50, body)


def summarise_sweep(records: Sequence[SweepRecord]) -> dict:
    reached = [r for r in records if r.stop_reason is StopReason.CONVERGED]
    missing = [r for r in records if r.stop_reason is not StopReason.CONVERGED]
    return {
        "points": len(records),
        "converged": len(reached),
        "max_iterations": max((r.iterations_to_eps for r in reached), default=None),
        "not_reached": [
            {"index": r.index, "initial": [format_scalar(c) for c in r.initial], "reason": r.stop_reason.value}
            for r in missing
        ],
    }


def optional_write(path: Optional[str], text: str, stream) -> None:
    if path in (None, "-"):
        stream.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
