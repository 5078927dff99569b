"""Simulated under-carriage laser scanner.

The scanner sweeps a ground-truth road surface over a longitudinal window
and produces two grids: a depth map (mm per cell) and an intensity image
(returned-signal energy per cell, in [0, 1]).  Surfaces are scenario-defined
lists of pits; each grid cell samples the surface at its center offset and
reads the deepest covering pit (depth) and that pit's reflectivity
(intensity; 1.0 on undamaged pavement).

Pothole extraction thresholds the depth map and groups longitudinally
adjacent supra-threshold cells into one report per connected run:

    depth     = max cell depth in the run
    offset    = depth-weighted centroid of the run, in arc coordinates
    intensity = mean intensity over the run

Grids default to a single lateral row; multi-row grids are collapsed
per-column (max depth, mean intensity) before run finding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

DEFAULT_THRESHOLD_MM = 10.0
DEFAULT_CELL_M = 0.5


@dataclass(frozen=True)
class Pit:
    center_m: float
    half_length_m: float
    depth_mm: float
    reflectivity: float

    def covers(self, offset_m: float) -> bool:
        return abs(offset_m - self.center_m) <= self.half_length_m


@dataclass
class GroundTruthSurface:
    """Scenario-defined truth the sensor observes, for one arc."""

    arc: str
    arc_length_m: float
    pits: list[Pit] = field(default_factory=list)

    def __post_init__(self):
        for p in self.pits:
            if p.depth_mm < 0:
                raise ValueError(f"pit depth {p.depth_mm} < 0")
            if not (0.0 <= p.reflectivity <= 1.0):
                raise ValueError(f"pit reflectivity {p.reflectivity} outside [0, 1]")
            if p.center_m - p.half_length_m < 0 or p.center_m + p.half_length_m > self.arc_length_m:
                raise ValueError(
                    f"pit at {p.center_m}+-{p.half_length_m} m outside arc "
                    f"{self.arc!r} of length {self.arc_length_m} m")


@dataclass
class DepthMap:
    rows: int
    cols: int
    cell_m: float
    depths: list[float]  # row-major, mm

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid dimensions must be positive")
        if len(self.depths) != self.rows * self.cols:
            raise ValueError("depth grid size mismatch")
        if any(d < 0 for d in self.depths):
            raise ValueError("depths must be >= 0")

    def at(self, r: int, c: int) -> float:
        return self.depths[r * self.cols + c]


@dataclass
class IntensityImage:
    rows: int
    cols: int
    values: list[float]  # row-major, [0, 1]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("grid dimensions must be positive")
        if len(self.values) != self.rows * self.cols:
            raise ValueError("intensity grid size mismatch")

    def at(self, r: int, c: int) -> float:
        return self.values[r * self.cols + c]


@dataclass(frozen=True)
class PotholeDetection:
    """One extracted pothole report: (arc id, offset m, depth mm, intensity).

    The raw run cells ride along so a transmitted report can embed the
    actual sensor data; depth_mm is their max and intensity their mean.
    """

    arc: str
    offset_m: float
    depth_mm: float
    intensity: float
    cells_depth: tuple[float, ...] = ()
    cells_intensity: tuple[float, ...] = ()


def sweep(surface: GroundTruthSurface, window: tuple[float, float],
          cell_m: float = DEFAULT_CELL_M, rows: int = 1) -> tuple[DepthMap, IntensityImage]:
    """Sample the surface over a window into paired grids.

    Cell i spans [start + i*cell, start + (i+1)*cell) and samples the
    surface at its center.  Only whole cells are produced: a trailing
    sub-cell remainder of the window is not sensed, which keeps every
    sampled offset strictly inside the window.  Where pits overlap, the
    deepest one wins both depth and reflectivity; ties go to the pit
    listed first.
    """
    start, end = window
    if not (0.0 <= start < end <= surface.arc_length_m):
        raise ValueError(f"window [{start}, {end}) invalid for arc "
                         f"{surface.arc!r} of length {surface.arc_length_m} m")
    cols = math.floor((end - start) / cell_m + 1e-9)
    if cols < 1:
        raise ValueError(f"window [{start}, {end}) shorter than one {cell_m} m cell")
    depth_row = [0.0] * cols
    inten_row = [1.0] * cols
    # rasterize per pit rather than scanning pits per cell; the per-cell scan
    # is kept as the test oracle
    for pit in surface.pits:
        lo = pit.center_m - pit.half_length_m
        hi = pit.center_m + pit.half_length_m
        for c in range(cols):
            center = start + (c + 0.5) * cell_m
            if lo <= center <= hi and pit.depth_mm > depth_row[c]:
                depth_row[c] = pit.depth_mm
                inten_row[c] = pit.reflectivity
    dm = DepthMap(rows, cols, cell_m, depth_row * rows)
    ii = IntensityImage(rows, cols, inten_row * rows)
    return dm, ii


def grid_to_csv(grid: DepthMap | IntensityImage) -> str:
    """Debug dump: one CSV row per grid row."""
    values = grid.depths if isinstance(grid, DepthMap) else grid.values
    lines = []
    for r in range(grid.rows):
        row = values[r * grid.cols:(r + 1) * grid.cols]
        lines.append(",".join(repr(v) for v in row))
    return "\n".join(lines) + "\n"


def extract_potholes(dm: DepthMap, ii: IntensityImage, threshold_mm: float,
                     arc: str, window_start_m: float) -> list[PotholeDetection]:
    """Threshold + longitudinal connected components over the depth map."""
    if threshold_mm <= 0:
        raise ValueError("threshold must be > 0")
    if (dm.rows, dm.cols) != (ii.rows, ii.cols):
        raise ValueError("depth map and intensity image dimensions differ")

    col_depth = [max(dm.at(r, c) for r in range(dm.rows)) for c in range(dm.cols)]
    col_inten = [sum(ii.at(r, c) for r in range(ii.rows)) / ii.rows for c in range(ii.cols)]

    reports: list[PotholeDetection] = []
    c = 0
    while c < dm.cols:
        if col_depth[c] < threshold_mm:
            c += 1
            continue
        run_start = c
        while c < dm.cols and col_depth[c] >= threshold_mm:
            c += 1
        run = range(run_start, c)
        depth = max(col_depth[i] for i in run)
        weight_sum = sum(col_depth[i] for i in run)
        centroid = sum(col_depth[i] * (window_start_m + (i + 0.5) * dm.cell_m)
                       for i in run) / weight_sum
        intensity = sum(col_inten[i] for i in run) / len(run)
        reports.append(PotholeDetection(
            arc, centroid, depth, intensity,
            tuple(col_depth[i] for i in run),
            tuple(col_inten[i] for i in run)))
    return reports
