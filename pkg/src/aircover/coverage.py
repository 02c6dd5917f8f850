"""Visual sensing quality, conic Voronoi partition, and the coverage controller.

The sensing quality of a ground point combines a perspective factor (unity at
nadir, zero at the footprint boundary) with a resolution factor (best at a
desired capture distance).  Each grid point is owned by the covering agent of
highest quality; overlap losers are tracked separately so the objective can
penalize redundant coverage.  The nominal input is the gradient ascent of that
objective, evaluated by midpoint quadrature with analytic partials.
"""

from dataclasses import dataclass

import numpy as np

from aircover.geometry import AgentState


@dataclass(frozen=True)
class SensingParams:
    """Sensing-model constants: image radius, resolution shape, capture distance, overlap weight."""

    r: float
    kappa: float
    sigma: float
    M: float
    w: float

    def __post_init__(self):
        if self.r <= 0 or self.kappa <= 0 or self.sigma <= 0 or self.M <= 0:
            raise ValueError("r, kappa, sigma, M must be positive")
        if self.w < 0:
            raise ValueError("w must be nonnegative")


@dataclass(frozen=True)
class DensityField:
    """Importance density: isotropic Gaussian mixture clipped to the mission rectangle."""

    components: tuple  # (weight, (mx, my), scale) triples
    mission: tuple  # (xmin, ymin, xmax, ymax)

    def __post_init__(self):
        xmin, ymin, xmax, ymax = self.mission
        if xmax <= xmin or ymax <= ymin:
            raise ValueError("mission rectangle is empty")
        for weight, _, scale in self.components:
            if weight < 0:
                raise ValueError("component weights must be nonnegative")
            if scale <= 0:
                raise ValueError("component scales must be positive")

    def phi(self, points) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.zeros(len(points))
        for weight, mean, scale in self.components:
            d2 = (points[:, 0] - mean[0]) ** 2 + (points[:, 1] - mean[1]) ** 2
            out += weight * np.exp(-d2 / (2.0 * scale**2))
        xmin, ymin, xmax, ymax = self.mission
        inside = (
            (points[:, 0] >= xmin)
            & (points[:, 0] <= xmax)
            & (points[:, 1] >= ymin)
            & (points[:, 1] <= ymax)
        )
        return np.where(inside, out, 0.0)


class CoverageGrid:
    """Uniform midpoint grid over the mission rectangle."""

    def __init__(self, mission, resolution: float):
        if resolution <= 0:
            raise ValueError("resolution must be positive")
        xmin, ymin, xmax, ymax = mission
        if xmax <= xmin or ymax <= ymin:
            raise ValueError("mission rectangle is empty")
        nx = max(1, int(np.ceil((xmax - xmin) / resolution)))
        ny = max(1, int(np.ceil((ymax - ymin) / resolution)))
        dx = (xmax - xmin) / nx
        dy = (ymax - ymin) / ny
        xs = xmin + (np.arange(nx) + 0.5) * dx
        ys = ymin + (np.arange(ny) + 0.5) * dy
        XX, YY = np.meshgrid(xs, ys, indexing="ij")
        self.mission = tuple(float(v) for v in mission)
        self.resolution = float(resolution)
        self.shape = (nx, ny)
        self.points = np.column_stack([XX.ravel(), YY.ravel()])
        self.cell_area = dx * dy


@dataclass(frozen=True)
class Partition:
    """Conic Voronoi assignment of grid points.

    owner[q] is the covering agent of maximal sensing quality (−1 when no
    footprint covers q); f[i, q] the quality fields; covered closed-disk
    membership; strict open-disk membership (where gradients are evaluated).
    """

    owner: np.ndarray
    f: np.ndarray
    covered: np.ndarray
    strict: np.ndarray

    def losers(self, i: int) -> np.ndarray:
        """Points agent i covers but does not own (its overlap set)."""
        return self.covered[i] & (self.owner != i)


@dataclass(frozen=True)
class CoverageReport:
    """Objective decomposition: H = H_M − w·H_O with per-agent owned masses."""

    H_M: float
    H_O: float
    H: float
    cell_masses: tuple


def _field_terms(state: AgentState, params: SensingParams, points):
    """Vectorized pieces of the sensing model at ground points."""
    dx = state.x - points[:, 0]
    dy = state.y - points[:, 1]
    d2 = dx * dx + dy * dy
    s = np.sqrt(d2 + state.z**2)
    A = np.sqrt(state.lam**2 + params.r**2)
    radius = params.r * state.z / state.lam
    f_pers = (A * state.z / s - state.lam) / (A - state.lam)
    f_res = (state.lam / A) ** params.kappa * np.exp(
        -((s - params.M) ** 2) / (2.0 * params.sigma**2)
    )
    return dx, dy, d2, s, A, radius, f_pers, f_res


def sensing_quality(state: AgentState, q, params: SensingParams) -> float:
    """Perspective × resolution quality of a ground point; zero outside the footprint."""
    points = np.atleast_2d(np.asarray(q, dtype=float))
    _, _, d2, _, _, radius, f_pers, f_res = _field_terms(state, params, points)
    f = np.where(d2 <= radius**2, f_pers * f_res, 0.0)
    return float(f[0])


def sensing_field(state: AgentState, params: SensingParams, points):
    """Quality, closed, and strict footprint masks of one agent over many points."""
    _, _, d2, _, _, radius, f_pers, f_res = _field_terms(state, params, points)
    covered = d2 <= radius**2
    strict = d2 < radius**2
    f = np.where(covered, f_pers * f_res, 0.0)
    return f, covered, strict


def sensing_gradient(state: AgentState, params: SensingParams, points) -> np.ndarray:
    """(4, N) analytic partials of the quality w.r.t. the agent state.

    Valid at points strictly inside the footprint; the caller masks.
    """
    dx, dy, d2, s, A, _, f_pers, f_res = _field_terms(state, params, points)
    z, lam = state.z, state.lam
    s3 = s**3
    # Perspective factor: distance enters through s only; λ also moves A.
    pers_scale = A * z / (s3 * (A - lam))
    dp_x = -pers_scale * dx
    dp_y = -pers_scale * dy
    dp_z = A * d2 / (s3 * (A - lam))
    dp_lam = (
        (lam * z / (A * s) - 1.0) * (A - lam)
        - (A * z / s - lam) * (lam / A - 1.0)
    ) / (A - lam) ** 2
    # Resolution factor: Gaussian in the capture distance, power law in λ.
    res_scale = f_res * (-(s - params.M) / params.sigma**2)
    dr_x = res_scale * dx / s
    dr_y = res_scale * dy / s
    dr_z = res_scale * z / s
    dr_lam = f_res * params.kappa * params.r**2 / (lam * A * A)
    return np.vstack(
        [
            f_pers * dr_x + f_res * dp_x,
            f_pers * dr_y + f_res * dp_y,
            f_pers * dr_z + f_res * dp_z,
            f_pers * dr_lam + f_res * dp_lam,
        ]
    )


def partition(states, params: SensingParams, grid: CoverageGrid) -> Partition:
    """Assign each grid point to its best covering agent (lowest index on ties)."""
    n = len(states)
    N = len(grid.points)
    f = np.zeros((n, N))
    covered = np.zeros((n, N), dtype=bool)
    strict = np.zeros((n, N), dtype=bool)
    for i, state in enumerate(states):
        f[i], covered[i], strict[i] = sensing_field(state, params, grid.points)
    masked = np.where(covered, f, -np.inf)
    owner = np.where(covered.any(axis=0), np.argmax(masked, axis=0), -1)
    return Partition(owner=owner, f=f, covered=covered, strict=strict)


def coverage_objective(
    states, params: SensingParams, density: DensityField, grid: CoverageGrid, part: Partition = None
) -> CoverageReport:
    """Midpoint-quadrature objective H = H_M − w·H_O and per-agent owned masses."""
    if part is None:
        part = partition(states, params, grid)
    point_mass = density.phi(grid.points) * grid.cell_area
    masses = []
    H_O = 0.0
    for i in range(len(states)):
        masses.append(float(np.sum(part.f[i] * point_mass, where=part.owner == i)))
        H_O += float(np.sum(part.f[i] * point_mass, where=part.losers(i)))
    H_M = float(sum(masses))
    return CoverageReport(H_M=H_M, H_O=H_O, H=H_M - params.w * H_O, cell_masses=tuple(masses))


def nominal_input(
    i: int,
    states,
    params: SensingParams,
    density: DensityField,
    grid: CoverageGrid,
    part: Partition = None,
) -> np.ndarray:
    """Gradient-ascent input: owned-region pull minus w × overlap-region pull."""
    if part is None:
        part = partition(states, params, grid)
    point_mass = density.phi(grid.points) * grid.cell_area
    own = (part.owner == i) & part.strict[i]
    lose = part.losers(i) & part.strict[i]
    u = np.zeros(4)
    if own.any():
        grad = sensing_gradient(states[i], params, grid.points[own])
        u += grad @ point_mass[own]
    if lose.any():
        grad = sensing_gradient(states[i], params, grid.points[lose])
        u -= params.w * (grad @ point_mass[lose])
    return u
