"""Densities, thick control sets, intersection measures, and ball coverings.

A density is a positive, slowly varying radius field rho on R^n (the useful
ones are 1/2-Lipschitz and pinched between a constant m and R<x>^{1-eps}).
A control set omega is a union of boxes, balls, or a periodic pattern;
thickness of omega with respect to rho is the worst-case volume fraction
|omega cap B(x, rho(x))| / |B(x, rho(x))| over ball centers x.

Measures are exact interval arithmetic in 1-D. In higher dimension the ball
is sliced along the first axis; the slice measure is integrated with a
midpoint rule under the substitution x = c + r sin(theta), which absorbs the
square-root behaviour at the ball's rim, split at the set's own breakpoints
so each panel is smooth, with one Richardson extrapolation per panel.

The covering generator picks centers greedily from a fine grid, keeping a
candidate only when it is at least a third of the summed radii away from
every kept center; that makes the third-radius balls interior-disjoint by
construction while the full balls still cover the box.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .kernels import greedy_ball_select

__all__ = [
    "InvalidDensityError",
    "QuadratureError",
    "CoverageError",
    "DensityFn",
    "DensityReport",
    "density_validate",
    "ControlSet",
    "FullSpace",
    "BoxUnion",
    "interval_union",
    "PeriodicPattern",
    "BallUnion",
    "graded_cells",
    "intersection_measure",
    "ball_volume",
    "thickness_estimate",
    "Covering",
    "covering_generate",
    "TransferReport",
    "thickness_transfer_check",
]


class InvalidDensityError(ValueError):
    """Density violates positivity or its declared bounds."""


class QuadratureError(RuntimeError):
    """Measure quadrature failed to reach the requested tolerance."""


class CoverageError(RuntimeError):
    """Generated balls fail to cover the box; holds the diagnostics."""

    def __init__(self, message, uncovered=None):
        super().__init__(message)
        self.uncovered = uncovered


# -- interval helpers (1-D exact arithmetic) ---------------------------------


def _merge_intervals(iv: np.ndarray) -> np.ndarray:
    """Sort and merge an (k, 2) interval array into disjoint intervals."""
    iv = np.asarray(iv, dtype=np.float64).reshape(-1, 2)
    iv = iv[iv[:, 1] > iv[:, 0]]
    if iv.shape[0] == 0:
        return iv.reshape(0, 2)
    iv = iv[np.argsort(iv[:, 0], kind="stable")]
    out = [list(iv[0])]
    for a, b in iv[1:]:
        if a <= out[-1][1]:
            out[-1][1] = max(out[-1][1], b)
        else:
            out.append([a, b])
    return np.asarray(out)


def _clip_intervals(iv: np.ndarray, lo: float, hi: float) -> np.ndarray:
    iv = np.asarray(iv, dtype=np.float64).reshape(-1, 2)
    if iv.shape[0] == 0:
        return iv
    a = np.maximum(iv[:, 0], lo)
    b = np.minimum(iv[:, 1], hi)
    keep = b > a
    return np.column_stack([a[keep], b[keep]])


def _total_length(iv: np.ndarray) -> float:
    iv = np.asarray(iv, dtype=np.float64).reshape(-1, 2)
    return float(np.sum(iv[:, 1] - iv[:, 0])) if iv.size else 0.0


def _as_box(box, dim=None) -> np.ndarray:
    """Normalize box bounds to an (n, 2) array."""
    arr = np.asarray(box, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != 2 or np.any(arr[:, 1] <= arr[:, 0]):
        raise ValueError("box must be ((lo, hi), ...) with lo < hi per axis")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"box has {arr.shape[0]} axes, expected {dim}")
    return arr


# -- densities ---------------------------------------------------------------


@dataclass(frozen=True)
class DensityFn:
    """Positive radius field rho on R^n.

    kind 'constant': rho = m. kind 'power': rho(x) = R <x>^{1-eps} with
    <x> = sqrt(1 + |x|^2) and eps in (0, 1]. kind 'tabulated': 1-D linear
    interpolation of (grid, values), clamped outside the grid. The (m, R,
    eps) triple always stores declared bounds m <= rho(x) <= R <x>^{1-eps}.
    """

    kind: str
    m: float
    R: float
    eps: float
    grid: np.ndarray | None = field(default=None, repr=False)
    values: np.ndarray | None = field(default=None, repr=False)

    @staticmethod
    def constant(m: float) -> "DensityFn":
        if not m > 0:
            raise InvalidDensityError("constant density requires m > 0")
        return DensityFn("constant", float(m), float(m), 1.0)

    @staticmethod
    def power(R: float, eps: float) -> "DensityFn":
        if not R > 0:
            raise InvalidDensityError("power density requires R > 0")
        if not 0 < eps <= 1:
            raise InvalidDensityError("ε must lie in (0,1]")
        # <x> >= 1, so R is also the infimum of rho
        return DensityFn("power", float(R), float(R), float(eps))

    @staticmethod
    def tabulated(grid, values) -> "DensityFn":
        g = np.asarray(grid, dtype=np.float64)
        v = np.asarray(values, dtype=np.float64)
        if g.ndim != 1 or g.shape != v.shape or g.size < 2:
            raise InvalidDensityError("tabulated density needs matching 1-D grid/values")
        if np.any(np.diff(g) <= 0):
            raise InvalidDensityError("tabulated grid must be strictly increasing")
        if np.any(v <= 0):
            raise InvalidDensityError("tabulated density must be positive")
        g = g.copy()
        v = v.copy()
        g.setflags(write=False)
        v.setflags(write=False)
        return DensityFn("tabulated", float(v.min()), float(v.max()), 1.0, g, v)

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        scalar = pts.ndim == 0
        if pts.ndim <= 1:
            r = np.abs(np.atleast_1d(pts))
        else:
            r = np.linalg.norm(pts, axis=-1)
        if self.kind == "constant":
            out = np.full_like(r, self.m)
        elif self.kind == "power":
            out = self.R * (1.0 + r * r) ** ((1.0 - self.eps) / 2.0)
        elif self.kind == "tabulated":
            if pts.ndim > 1:
                raise InvalidDensityError("tabulated density is 1-D only")
            out = np.interp(np.atleast_1d(pts), self.grid, self.values)
        else:
            raise InvalidDensityError(f"unknown density kind {self.kind!r}")
        return float(out[0]) if scalar else out

    def min_on_box(self, box) -> float:
        """Infimum of rho over the box (exact for constant/power)."""
        b = _as_box(box)
        if self.kind == "constant":
            return self.m
        if self.kind == "power":
            nearest = np.clip(0.0, b[:, 0], b[:, 1])
            return float(self(nearest if b.shape[0] > 1 else nearest[0]))
        xs = np.linspace(b[0, 0], b[0, 1], 4097)
        return float(np.min(self(xs)))


@dataclass(frozen=True)
class DensityReport:
    lipschitz_ok: bool
    bounds_ok: bool
    worst_ratio: float


def _kronecker_points(box: np.ndarray, samples: int) -> np.ndarray:
    """Deterministic low-discrepancy points: additive recurrence per axis."""
    n = box.shape[0]
    # generalized golden ratios, one irrational step per axis
    phi = [(2.0, 1.618033988749895), (3.0, 1.324717957244746), (4.0, 1.220744084605760)]
    alphas = np.array([1.0 / phi[min(j, 2)][1] ** (1 + j // 3) for j in range(n)])
    i = np.arange(1, samples + 1)[:, None]
    frac = np.mod(0.5 + i * alphas[None, :], 1.0)
    return box[:, 0] + frac * (box[:, 1] - box[:, 0])


def density_validate(rho: DensityFn, box, samples: int = 512) -> DensityReport:
    """Check the declared bounds and the 1/2-Lipschitz property on a sample.

    Deterministic low-discrepancy points in the box; the Lipschitz quotient
    |rho(x)-rho(y)| / |x-y| is evaluated over all pairs of a capped subset
    and its worst value reported.
    """
    if samples < 2:
        raise ValueError("samples must be at least 2")
    b = _as_box(box)
    pts = _kronecker_points(b, samples)
    flat = pts[:, 0] if b.shape[0] == 1 else pts
    vals = np.atleast_1d(rho(flat))
    if np.any(vals <= 0):
        raise InvalidDensityError("density must be positive on the sample")
    with np.errstate(over="ignore"):
        radial = np.abs(flat) if b.shape[0] == 1 else np.linalg.norm(flat, axis=-1)
        upper = rho.R * (1.0 + radial**2) ** ((1.0 - rho.eps) / 2.0)
    tol = 1e-9 * max(1.0, float(np.max(vals)))
    bounds_ok = bool(np.all(vals >= rho.m - tol) and np.all(vals <= upper + tol))

    sub = pts[: min(samples, 256)]
    subvals = np.atleast_1d(rho(sub[:, 0] if b.shape[0] == 1 else sub))
    diff = np.abs(subvals[:, None] - subvals[None, :])
    dist = np.linalg.norm(sub[:, None, :] - sub[None, :, :], axis=-1)
    mask = dist > 0
    worst = float(np.max(diff[mask] / dist[mask])) if np.any(mask) else 0.0
    return DensityReport(lipschitz_ok=worst <= 0.5 + 1e-12, bounds_ok=bounds_ok, worst_ratio=worst)


# -- control sets ------------------------------------------------------------


class ControlSet:
    """A measurable sensor region with a total membership query.

    Subclasses implement `contains`, and the slicing hooks used by the
    measure quadrature: `intervals_1d` (dim 1 only) returns the kept
    intervals clipped to [lo, hi] as a merged (k, 2) array; `slice_first`
    (dim >= 2) returns the restriction to a hyperplane x_0 = value as a set
    one dimension down; `breakpoints_first` lists first-axis coordinates
    where the slice structure jumps.
    """

    dim: int

    def contains(self, points) -> np.ndarray:
        raise NotImplementedError

    def intervals_1d(self, lo: float, hi: float) -> np.ndarray:
        raise NotImplementedError

    def slice_first(self, value: float) -> "ControlSet":
        raise NotImplementedError

    def breakpoints_first(self, lo: float, hi: float) -> np.ndarray:
        return np.empty(0)

    def _points(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        if self.dim == 1 and pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim == 1:
            pts = pts[None, :]
        if pts.shape[-1] != self.dim:
            raise ValueError(f"points must have {self.dim} coordinates")
        return pts


@dataclass(frozen=True)
class FullSpace(ControlSet):
    """All of R^n."""

    dim: int = 1

    def contains(self, points):
        return np.ones(self._points(points).shape[0], dtype=bool)

    def intervals_1d(self, lo, hi):
        return np.array([[lo, hi]])

    def slice_first(self, value):
        return FullSpace(self.dim - 1)


@dataclass(frozen=True)
class BoxUnion(ControlSet):
    """Union of axis-aligned boxes; boxes has shape (k, n, 2)."""

    dim: int
    boxes: np.ndarray = field(repr=False)

    def __post_init__(self):
        b = np.asarray(self.boxes, dtype=np.float64).reshape(-1, self.dim, 2)
        if np.any(b[:, :, 1] < b[:, :, 0]):
            raise ValueError("each box needs lo <= hi per axis")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "boxes", b)

    def contains(self, points):
        pts = self._points(points)
        lo = self.boxes[:, :, 0]
        hi = self.boxes[:, :, 1]
        inside = (pts[:, None, :] >= lo[None]) & (pts[:, None, :] <= hi[None])
        return np.any(np.all(inside, axis=2), axis=1)

    def intervals_1d(self, lo, hi):
        return _merge_intervals(_clip_intervals(self.boxes[:, 0, :], lo, hi))

    def slice_first(self, value):
        keep = (self.boxes[:, 0, 0] <= value) & (value <= self.boxes[:, 0, 1])
        return BoxUnion(self.dim - 1, self.boxes[keep][:, 1:, :])

    def breakpoints_first(self, lo, hi):
        edges = self.boxes[:, 0, :].ravel()
        return edges[(edges > lo) & (edges < hi)]


def interval_union(intervals) -> BoxUnion:
    """1-D control set from a list of (a, b) pairs; infinite ends allowed."""
    iv = np.asarray(intervals, dtype=np.float64).reshape(-1, 2)
    return BoxUnion(1, iv[:, None, :])


@dataclass(frozen=True)
class PeriodicPattern(ControlSet):
    """Product of per-axis periodic stripes.

    Axis j keeps [offset + k L, offset + k L + kept * L) for every integer k.
    In one dimension the kept fraction per cell is `kept`; in n dimensions
    the product construction keeps kept^n of each period cell.
    """

    dim: int
    period: float
    kept: float
    offset: float = 0.0

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError("period must be positive")
        if not 0 < self.kept <= 1:
            raise ValueError("kept fraction must lie in (0, 1]")

    def contains(self, points):
        pts = self._points(points)
        frac = np.mod(pts - self.offset, self.period) / self.period
        return np.all(frac < self.kept, axis=1)

    def _axis_intervals(self, lo, hi):
        k0 = math.floor((lo - self.offset) / self.period) - 1
        k1 = math.ceil((hi - self.offset) / self.period) + 1
        ks = np.arange(k0, k1 + 1, dtype=np.float64)
        starts = self.offset + ks * self.period
        return _merge_intervals(
            _clip_intervals(np.column_stack([starts, starts + self.kept * self.period]), lo, hi)
        )

    def intervals_1d(self, lo, hi):
        return self._axis_intervals(lo, hi)

    def slice_first(self, value):
        frac = math.fmod(value - self.offset, self.period) / self.period
        if frac < 0:
            frac += 1.0
        if frac < self.kept:
            return PeriodicPattern(self.dim - 1, self.period, self.kept, self.offset)
        return BoxUnion(self.dim - 1, np.empty((0, self.dim - 1, 2)))

    def breakpoints_first(self, lo, hi):
        iv = self._axis_intervals(lo - self.period, hi + self.period)
        edges = iv.ravel()
        return edges[(edges > lo) & (edges < hi)]


@dataclass(frozen=True)
class BallUnion(ControlSet):
    """Union of euclidean balls; centers (k, n), radii (k,)."""

    dim: int
    centers: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.centers, dtype=np.float64).reshape(-1, self.dim)
        r = np.asarray(self.radii, dtype=np.float64).reshape(-1)
        if c.shape[0] != r.shape[0]:
            raise ValueError("centers and radii length mismatch")
        if np.any(r < 0):
            raise ValueError("radii must be non-negative")
        c = c.copy()
        r = r.copy()
        c.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)

    def contains(self, points):
        pts = self._points(points)
        if self.centers.shape[0] == 0:
            return np.zeros(pts.shape[0], dtype=bool)
        d2 = np.sum((pts[:, None, :] - self.centers[None]) ** 2, axis=2)
        return np.any(d2 <= self.radii[None] ** 2, axis=1)

    def intervals_1d(self, lo, hi):
        c = self.centers[:, 0]
        return _merge_intervals(_clip_intervals(np.column_stack([c - self.radii, c + self.radii]), lo, hi))

    def slice_first(self, value):
        dx = value - self.centers[:, 0]
        keep = np.abs(dx) < self.radii
        red = np.sqrt(np.maximum(self.radii[keep] ** 2 - dx[keep] ** 2, 0.0))
        return BallUnion(self.dim - 1, self.centers[keep][:, 1:], red)

    def breakpoints_first(self, lo, hi):
        c = self.centers[:, 0]
        edges = np.concatenate([c - self.radii, c + self.radii])
        return edges[(edges > lo) & (edges < hi)]


def graded_cells(rho: DensityFn, gamma: float, extent: float) -> BoxUnion:
    """1-D thick set tailored to a density: graded cells of width rho.

    Marching from the origin in both directions, each cell [a, a + rho(a))
    keeps its leading gamma fraction, so every ball B(x, rho(x)) meets the
    kept part in roughly a gamma fraction of its length.
    """
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    kept = []
    a = 0.0
    while a < extent:
        w = float(rho(a))
        kept.append((a, min(a + gamma * w, extent)))
        a += w
    a = 0.0
    while a > -extent:
        w = float(rho(a))
        kept.append((max(a - gamma * w, -extent), a))
        a -= w
    return interval_union(kept)


# -- intersection measure ----------------------------------------------------

_UNIT_BALL_VOLUME = {1: 2.0, 2: math.pi, 3: 4.0 * math.pi / 3.0}


def ball_volume(dim: int, radius: float) -> float:
    if dim not in _UNIT_BALL_VOLUME:
        raise ValueError(f"dimension {dim} unsupported (1, 2, or 3)")
    return _UNIT_BALL_VOLUME[dim] * radius**dim


def _measure_1d(omega: ControlSet, center: float, radius: float) -> float:
    return _total_length(omega.intervals_1d(center - radius, center + radius))


def _panel_midpoint(g, t0: float, t1: float, atol: float, max_nodes: int = 1 << 15):
    """Midpoint rule with doubling and one Richardson step on [t0, t1]."""
    m = 16
    prev = None
    while m <= max_nodes:
        h = (t1 - t0) / m
        ts = t0 + h * (np.arange(m) + 0.5)
        cur = h * math.fsum(g(t) for t in ts)
        if prev is not None and abs(cur - prev) <= 3.0 * atol:
            return (4.0 * cur - prev) / 3.0, True
        prev = cur
        m *= 2
    return prev, False


def intersection_measure(omega: ControlSet, center, radius: float, rel_tol: float = 1e-6) -> float:
    """Lebesgue measure of omega intersected with the ball B(center, radius).

    Exact for one-dimensional sets. In dimension 2 or 3 the first axis is
    integrated with the rim-absorbing substitution x = c + r sin(theta),
    split at the set's structural breakpoints, midpoint rule with Richardson
    refinement per panel; the result carries relative error about rel_tol.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    c = np.atleast_1d(np.asarray(center, dtype=np.float64))
    if c.size != omega.dim:
        raise ValueError(f"center has {c.size} coordinates, set has dim {omega.dim}")
    if omega.dim == 1:
        return _measure_1d(omega, float(c[0]), radius)
    if omega.dim not in (2, 3):
        raise ValueError(f"dimension {omega.dim} unsupported (1, 2, or 3)")

    c0 = float(c[0])
    rest = c[1:]
    inner_tol = rel_tol / 4.0

    def g(theta: float) -> float:
        x = c0 + radius * math.sin(theta)
        chord = radius * math.cos(theta)
        if chord <= 0:
            return 0.0
        sub = omega.slice_first(x)
        if sub.dim == 1:
            inner = _measure_1d(sub, float(rest[0]), chord)
        else:
            inner = intersection_measure(sub, rest, chord, inner_tol)
        # jacobian of x = c0 + r sin(theta)
        return inner * radius * math.cos(theta)

    breaks = np.asarray(omega.breakpoints_first(c0 - radius, c0 + radius), dtype=np.float64)
    thetas = np.unique(
        np.concatenate(
            [[-math.pi / 2, math.pi / 2], np.arcsin(np.clip((breaks - c0) / radius, -1.0, 1.0))]
        )
    )
    scale = ball_volume(omega.dim, radius)
    total = 0.0
    converged_all = True
    for t0, t1 in zip(thetas[:-1], thetas[1:]):
        if t1 - t0 <= 1e-14:
            continue
        atol = rel_tol * scale * max((t1 - t0) / math.pi, 1e-3)
        val, ok = _panel_midpoint(g, float(t0), float(t1), atol)
        total += val
        converged_all = converged_all and ok
    if not converged_all:
        raise QuadratureError("midpoint refinement did not converge to the requested tolerance")
    return min(max(total, 0.0), scale)


def thickness_estimate(omega: ControlSet, rho: DensityFn, centers, rel_tol: float = 1e-6) -> float:
    """Finite-sample thickness: min over centers of |omega cap B| / |B|.

    This is a lower-confidence certificate: it bounds thickness only at the
    sampled centers, not everywhere.
    """
    pts = np.asarray(centers, dtype=np.float64)
    if omega.dim == 1 and pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] != omega.dim:
        raise ValueError("centers must be a non-empty (m, dim) array")
    worst = 1.0
    for row in pts:
        r = float(rho(row if omega.dim > 1 else row[0]))
        frac = intersection_measure(omega, row, r, rel_tol) / ball_volume(omega.dim, r)
        worst = min(worst, frac)
    return min(max(worst, 0.0), 1.0)


# -- coverings ---------------------------------------------------------------


@dataclass(frozen=True)
class Covering:
    """Greedy ball covering of a box.

    centers (k, n) with radii rho(center); third-radius balls are pairwise
    interior-disjoint; overlap_bound is the a-priori multiplicity bound
    (4 C^3 + 1)^n for the slowness constant C; max_multiplicity is the
    largest overlap observed on the verification grid.
    """

    centers: np.ndarray = field(repr=False)
    radii: np.ndarray = field(repr=False)
    overlap_bound: int
    max_multiplicity: int
    grid_step: float

    @property
    def dim(self) -> int:
        return self.centers.shape[1]


def _box_grid(box: np.ndarray, step: float) -> np.ndarray:
    axes = []
    for lo, hi in box:
        k = max(int(math.ceil((hi - lo) / step)), 1)
        axes.append(np.linspace(lo, hi, k + 1))
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def covering_generate(
    rho: DensityFn, box, grid_step: float | None = None, slowness_constant: float = 2.0
) -> Covering:
    """Cover a box with balls B(x_k, rho(x_k)) whose third-radius cores are disjoint.

    Candidates sweep a grid of the given step (default: min rho over the box
    divided by 6) in row-major order; a candidate is kept iff its distance to
    every kept center is at least the sum of the two radii over 3. Coverage
    is then verified on the same grid and the observed overlap multiplicity
    recorded. A grid coarser than min rho / 5 cannot certify coverage and is
    rejected up front.
    """
    b = _as_box(box)
    n = b.shape[0]
    if n not in (1, 2, 3):
        raise ValueError(f"dimension {n} unsupported (1, 2, or 3)")
    rho_min = rho.min_on_box(b)
    if not rho_min > 0:
        raise InvalidDensityError("density must be positive on the box")
    if grid_step is None:
        grid_step = rho_min / 6.0
    if grid_step >= rho_min / 5.0:
        raise CoverageError(
            f"candidate grid step {grid_step:g} too coarse for min density {rho_min:g}; "
            f"need step < {rho_min / 5.0:g}"
        )
    grid = _box_grid(b, grid_step)
    radii = np.atleast_1d(rho(grid if n > 1 else grid[:, 0])).astype(np.float64)
    kept = greedy_ball_select(np.ascontiguousarray(grid), np.ascontiguousarray(radii))
    centers = grid[kept]
    kept_radii = radii[kept]

    covered = np.zeros(grid.shape[0], dtype=np.int64)
    for ctr, r in zip(centers, kept_radii):
        d2 = np.sum((grid - ctr) ** 2, axis=1)
        covered += (d2 <= r * r).astype(np.int64)
    if np.any(covered == 0):
        holes = grid[covered == 0]
        raise CoverageError(
            f"{holes.shape[0]} verification points uncovered (first: {holes[0].tolist()})",
            uncovered=holes,
        )
    bound = int(round((4.0 * slowness_constant**3 + 1.0) ** n))
    return Covering(
        centers=centers,
        radii=kept_radii,
        overlap_bound=bound,
        max_multiplicity=int(covered.max()),
        grid_step=float(grid_step),
    )


# -- thickness transfer ------------------------------------------------------


@dataclass(frozen=True)
class TransferReport:
    """Outcome of an empirical thickness-transfer check between densities."""

    hypothesis_ok: bool
    input_thickness: float
    predicted: float
    measured: float
    transfer_ok: bool
    notes: str = ""


def thickness_transfer_check(
    omega: ControlSet,
    rho1: DensityFn,
    rho2: DensityFn,
    gamma: float,
    centers,
    rel_tol: float = 1e-6,
    slack: float = 1e-3,
) -> TransferReport:
    """Check that gamma-thickness w.r.t. rho1 transfers to rho2.

    With rho1 <= rho2 on the sampled centers and gamma > 1 - 6^{-n}, the
    transferred level is 1 - (1-gamma) 6^n; the measured thickness w.r.t.
    rho2 must reach it up to the slack. A violated hypothesis is reported in
    the result, not raised.
    """
    pts = np.asarray(centers, dtype=np.float64)
    if omega.dim == 1 and pts.ndim == 1:
        pts = pts[:, None]
    n = omega.dim
    flat = pts[:, 0] if n == 1 else pts
    r1 = np.atleast_1d(rho1(flat))
    r2 = np.atleast_1d(rho2(flat))
    notes = []
    pointwise_ok = bool(np.all(r1 <= r2 + 1e-12))
    gamma_ok = gamma > 1.0 - 6.0 ** (-n)
    if not pointwise_ok:
        notes.append("rho1 > rho2 somewhere on the sample")
    if not gamma_ok:
        notes.append(f"gamma={gamma:g} not above 1 - 6^-{n}")
    predicted = 1.0 - (1.0 - gamma) * 6.0**n
    input_thickness = thickness_estimate(omega, rho1, pts, rel_tol)
    if input_thickness < gamma - slack:
        notes.append(f"claimed thickness {gamma:g} not met on sample ({input_thickness:.6f})")
    measured = thickness_estimate(omega, rho2, pts, rel_tol)
    hypothesis_ok = pointwise_ok and gamma_ok and input_thickness >= gamma - slack
    transfer_ok = hypothesis_ok and measured >= predicted - slack
    return TransferReport(
        hypothesis_ok=hypothesis_ok,
        input_thickness=float(input_thickness),
        predicted=float(predicted),
        measured=float(measured),
        transfer_ok=bool(transfer_ok),
        notes="; ".join(notes),
    )
