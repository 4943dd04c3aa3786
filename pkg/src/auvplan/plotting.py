"""Static visualization: hand-written SVG plans and matplotlib figures.

The SVG writer emits exactly one <polyline> element per planned leg
(the XZ projection of a 3D plan uses <path> elements instead), which
keeps the file machine-checkable by element counting.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
from matplotlib.patches import Circle

from .dubins import Dubins3dPath, sample_path
from .metrics import CampaignReport
from .som import AssignmentResult

PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
           "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

_PANEL_WIDTH = 620.0
_PANEL_GAP = 24.0
_PAD = 1.5


def _color(auv: int) -> str:
    return PALETTE[auv % len(PALETTE)]


def _leg_samples(leg, step: float):
    path = leg.path
    if isinstance(path, Dubins3dPath):
        return path.sample(step)
    return sample_path(path, step)


class _Frame:
    """Affine map from one workspace projection to pixel coordinates."""

    def __init__(self, lo_x: float, hi_x: float, lo_y: float, hi_y: float,
                 offset: float):
        self.world_x0 = lo_x - _PAD
        self.world_y1 = hi_y + _PAD
        self.scale = _PANEL_WIDTH / (hi_x + _PAD - self.world_x0)
        self.height = (self.world_y1 - (lo_y - _PAD)) * self.scale
        self.offset = offset

    def px(self, x: float) -> float:
        return self.offset + (x - self.world_x0) * self.scale

    def py(self, y: float) -> float:
        return (self.world_y1 - y) * self.scale

    def rect(self, lo_x, lo_y, hi_x, hi_y) -> str:
        return (f'<rect x="{self.px(lo_x):.2f}" y="{self.py(hi_y):.2f}" '
                f'width="{(hi_x - lo_x) * self.scale:.2f}" '
                f'height="{(hi_y - lo_y) * self.scale:.2f}" '
                f'fill="none" stroke="#444" stroke-width="1"/>')

    def circle(self, x, y, r_world, style: str) -> str:
        return (f'<circle cx="{self.px(x):.2f}" cy="{self.py(y):.2f}" '
                f'r="{r_world * self.scale:.2f}" {style}/>')

    def marker_circle(self, x, y, r_px: float, style: str) -> str:
        return (f'<circle cx="{self.px(x):.2f}" cy="{self.py(y):.2f}" '
                f'r="{r_px:.1f}" {style}/>')

    def diamond(self, x, y, color: str, half: float = 7.0) -> str:
        cx, cy = self.px(x), self.py(y)
        d = (f"M {cx:.2f},{cy - half:.2f} L {cx + half:.2f},{cy:.2f} "
             f"L {cx:.2f},{cy + half:.2f} L {cx - half:.2f},{cy:.2f} Z")
        return f'<path d="{d}" fill="{color}" stroke="#222" stroke-width="1"/>'

    def polyline(self, points, color: str) -> str:
        text = " ".join(f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in points)
        return (f'<polyline points="{text}" fill="none" stroke="{color}" '
                f'stroke-width="1.6" stroke-opacity="0.9"/>')

    def pathline(self, points, color: str) -> str:
        coords = [f"{self.px(x):.2f},{self.py(y):.2f}" for x, y in points]
        d = "M " + " L ".join(coords)
        return (f'<path d="{d}" fill="none" stroke="{color}" '
                f'stroke-width="1.6" stroke-opacity="0.9"/>')


def plan_svg(result: AssignmentResult, step: float | None = None) -> str:
    """Render a plan as standalone SVG.

    2D: one top-down panel. 3D: top-down (XY) panel beside a depth (XZ)
    panel. Legs appear as one polyline each in the top-down panel; the
    depth panel uses path elements so the polyline count stays equal to
    the leg count.
    """
    sc = result.scenario
    if step is None:
        step = sc.d_safety / 2.0
    dim = sc.dim
    lo, hi = sc.lower, sc.upper

    xy = _Frame(lo[0], hi[0], lo[1], hi[1], 0.0)
    frames = [xy]
    if dim == 3:
        xz = _Frame(lo[0], hi[0], lo[2], hi[2], _PANEL_WIDTH + _PANEL_GAP)
        frames.append(xz)

    width = _PANEL_WIDTH * len(frames) + _PANEL_GAP * (len(frames) - 1)
    height = max(f.height for f in frames)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
             f'height="{height:.0f}" viewBox="0 0 {width:.0f} {height:.0f}">']
    parts.append(f'<rect width="{width:.0f}" height="{height:.0f}" fill="#fcfcfc"/>')

    obstacle_fill = 'fill="#9aa0a6" fill-opacity="0.55" stroke="none"'
    safety_ring = ('fill="none" stroke="#9aa0a6" stroke-width="1" '
                   'stroke-dasharray="5 4"')
    target_style = 'fill="#ffffff" stroke="#202124" stroke-width="1.5"'

    legs_by_sample = [(leg, _leg_samples(leg, step)) for leg in result.legs]

    for axis, frame in enumerate(frames):
        def second(p, axis=axis):
            return p.z if axis == 1 else p.y
        parts.append(frame.rect(lo[0], lo[2] if axis else lo[1],
                                hi[0], hi[2] if axis else hi[1]))
        for ob in sc.obstacles:
            oy = ob.center[2] if axis == 1 else ob.center[1]
            parts.append(frame.circle(ob.center[0], oy, ob.radius, obstacle_fill))
            parts.append(frame.circle(ob.center[0], oy, ob.radius + sc.d_safety,
                                      safety_ring))
        for leg, samples in legs_by_sample:
            points = [(p.x, second(p)) for p in samples]
            if axis == 0:
                parts.append(frame.polyline(points, _color(leg.auv)))
            else:
                parts.append(frame.pathline(points, _color(leg.auv)))
        for tgt in sc.targets:
            ty = tgt.position[2] if axis == 1 else tgt.position[1]
            parts.append(frame.marker_circle(tgt.position[0], ty, 4.0, target_style))
        for j, pose in enumerate(sc.auvs):
            py = pose.z if axis == 1 else pose.y
            parts.append(frame.diamond(pose.x, py, _color(j)))

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def save_plan_figure(result: AssignmentResult, path, step: float | None = None) -> None:
    """Render the plan with matplotlib (PNG or whatever the suffix selects)."""
    sc = result.scenario
    if step is None:
        step = sc.d_safety / 2.0
    dim = sc.dim
    lo, hi = sc.lower, sc.upper
    n_axes = 2 if dim == 3 else 1
    fig, axes = plt.subplots(1, n_axes, figsize=(7.5 * n_axes, 7.5))
    axes = [axes] if n_axes == 1 else list(axes)

    legs_by_sample = [(leg, _leg_samples(leg, step)) for leg in result.legs]
    for axis, ax in enumerate(axes):
        coord = (lambda p: p.z) if axis == 1 else (lambda p: p.y)
        for ob in sc.obstacles:
            oy = ob.center[2] if axis == 1 else ob.center[1]
            ax.add_patch(Circle((ob.center[0], oy), ob.radius,
                                color="#9aa0a6", alpha=0.55))
            ax.add_patch(Circle((ob.center[0], oy), ob.radius + sc.d_safety,
                                fill=False, color="#9aa0a6", linestyle="--"))
        seen = set()
        for leg, samples in legs_by_sample:
            xs = [p.x for p in samples]
            ys = [coord(p) for p in samples]
            label = f"AUV {leg.auv}" if leg.auv not in seen else None
            seen.add(leg.auv)
            ax.plot(xs, ys, color=_color(leg.auv), lw=1.6, label=label)
        for tgt in sc.targets:
            ty = tgt.position[2] if axis == 1 else tgt.position[1]
            ax.plot(tgt.position[0], ty, "o", mfc="white", mec="#202124", ms=7)
        for j, pose in enumerate(sc.auvs):
            py = pose.z if axis == 1 else pose.y
            ax.plot(pose.x, py, "D", color=_color(j), mec="#222", ms=9)
        ax.set_xlim(lo[0] - _PAD, hi[0] + _PAD)
        ax.set_ylim((lo[2] if axis == 1 else lo[1]) - _PAD,
                    (hi[2] if axis == 1 else hi[1]) + _PAD)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("z" if axis == 1 else "y")
        if axis == 0 and result.legs:
            ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_campaign_figure(report: CampaignReport, path) -> None:
    """Summary bars: mean total length and mean per-AUV spread for each mode."""
    labels = ["balanced" if m else "unbalanced" for m in report.modes]
    totals = [report.mean_total(m) for m in report.modes]
    spreads = [report.mean_stdev(m) for m in report.modes]
    colors = ["#1f77b4" if m else "#ff7f0e" for m in report.modes]

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9, 4))
    ax1.bar(labels, totals, color=colors)
    ax1.set_ylabel("mean total path length")
    ax2.bar(labels, spreads, color=colors)
    ax2.set_ylabel("mean per-AUV length spread")
    fig.suptitle(f"{report.n_auvs} AUVs, {report.n_targets} targets, "
                 f"{report.n_trials} trials, seed {report.seed}")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
