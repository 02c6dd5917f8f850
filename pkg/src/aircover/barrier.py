"""Barrier functions that certify the absence of coverage holes per triangle.

For each triangle {i, j, k} of the communication graph, four scalar conditions
are composed by max: three negated signed-area ratios that certify the radical
center lies outside the triangle, and one footprint-membership value that
certifies the radical center is covered.  The max is nonnegative exactly when
no hole exists.  Component indices are 1-based: 1..3 are the triangle-side
conditions (lines IJ, JK, KI with I the viewpoint agent), 4 is footprint
membership.

Analytic gradients are derived in the per-triangle working frame (x-axis on
segment JK, y-axis on the JK radical axis) where the radical center has a
closed form, then rotated back to world coordinates; altitude and focal-length
entries are frame-invariant.
"""

from dataclasses import dataclass

import numpy as np

from aircover.geometry import (
    DegenerateTrio,
    TrioContext,
    point_in_triangle,
    power_distance,
    sigma_d_frame,
)


@dataclass(frozen=True)
class CbfComponents:
    """The four per-triangle condition values, ordered (−ratio_IJK, −ratio_JKI, −ratio_KIJ, footprint)."""

    vals: tuple

    def __getitem__(self, component: int) -> float:
        # 1-based component index.
        return self.vals[component - 1]


@dataclass(frozen=True)
class NcbfValue:
    """Max-composed barrier value with its attaining component and almost-active set."""

    value: float
    argmax: int
    active_set: tuple


@dataclass(frozen=True)
class CbfGradient:
    """World-frame partial derivatives of one component w.r.t. the viewpoint agent's state."""

    d_x: float
    d_y: float
    d_z: float
    d_lambda: float

    def as_array(self):
        return np.array([self.d_x, self.d_y, self.d_z, self.d_lambda])

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


def cbf_components(trio: TrioContext, viewpoint: int) -> CbfComponents:
    """Evaluate the four condition values from one agent's viewpoint.

    The triangle ratios use vertex roles (I, J, K) = (viewpoint, lower other,
    higher other); the footprint value is the negated power distance of the
    radical center to the viewpoint's footprint.
    """
    i, j, k = trio.roles(viewpoint)
    I = trio.fovs[trio.index_of(i)].center
    J = trio.fovs[trio.index_of(j)].center
    K = trio.fovs[trio.index_of(k)].center
    v = trio.radical_center
    _, (r_ijk, r_jki, r_kij) = point_in_triangle(I, J, K, v)
    h_f = -power_distance(trio.fovs[trio.index_of(i)], v)
    return CbfComponents(vals=(-r_ijk, -r_jki, -r_kij, h_f))


def compose_ncbf(vals, epsilon: float) -> NcbfValue:
    """Max-compose four component values and collect the almost-active set {ℓ : |h_ℓ − h| ≤ ε}."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    vals = tuple(float(v) for v in vals)
    value = max(vals)
    argmax = vals.index(value) + 1
    active = tuple(l + 1 for l, h in enumerate(vals) if abs(h - value) <= epsilon)
    return NcbfValue(value=value, argmax=argmax, active_set=active)


def ncbf_value(trio: TrioContext, viewpoint: int, epsilon: float) -> NcbfValue:
    """Max of the four components plus the almost-active set, from one agent's viewpoint."""
    return compose_ncbf(cbf_components(trio, viewpoint).vals, epsilon)


def component_apex(trio: TrioContext, viewpoint: int, component: int):
    """Agent id of the triangle vertex opposite the component's line, or None for component 4.

    Components 1/2/3 certify v beyond lines IJ/JK/KI; their defining vertices
    (apexes) are agents k/i/j respectively.  The mapping lets the same
    geometric condition be identified across the three viewpoints.
    """
    i, j, k = trio.roles(viewpoint)
    return {1: k, 2: i, 3: j, 4: None}[component]


def _frame_coordinates(trio: TrioContext, viewpoint: int):
    """Working-frame coordinates and radius data for the gradient formulas."""
    i, j, k = trio.roles(viewpoint)
    frame = sigma_d_frame(trio, viewpoint)
    fi = trio.fovs[trio.index_of(i)]
    fj = trio.fovs[trio.index_of(j)]
    fk = trio.fovs[trio.index_of(k)]
    pi = frame.to_frame(fi.center)
    pj = frame.to_frame(fj.center)
    pk = frame.to_frame(fk.center)
    state = trio.states[trio.index_of(i)]
    return frame, {
        "xi": float(pi[0]),
        "yi": float(pi[1]),
        "xj": float(pj[0]),
        "xk": float(pk[0]),
        "Ri2": fi.radius**2,
        "Rj2": fj.radius**2,
        "Rk2": fk.radius**2,
        "z": state.z,
        "lam": state.lam,
        "r": trio.r,
    }


def cbf_gradient(trio: TrioContext, viewpoint: int, component: int) -> CbfGradient:
    """Analytic world-frame gradient of one component w.r.t. the viewpoint agent's state.

    Derivatives are taken holding the other two agents fixed; the working
    frame they define is therefore constant, and the world planar gradient is
    the frame rotation transposed applied to the frame planar gradient.
    """
    if component not in (1, 2, 3, 4):
        raise ValueError("component must be 1..4")
    frame, c = _frame_coordinates(trio, viewpoint)
    xi, yi, xj, xk = c["xi"], c["yi"], c["xj"], c["xk"]
    if abs(yi) < 1e-12:
        raise DegenerateTrio("viewpoint agent on the line through the other two")
    # Derivative of the squared footprint radius w.r.t. altitude and focal length.
    dR2_dz = 2.0 * c["r"] ** 2 * c["z"] / c["lam"] ** 2
    dR2_dlam = -2.0 * c["r"] ** 2 * c["z"] ** 2 / c["lam"] ** 3
    # C compares the two power offsets that set the radical-center height.
    C = (xi**2 - c["Ri2"]) - (xj**2 - c["Rj2"])
    vy = (C + yi**2) / (2.0 * yi)

    if component == 4:
        # Footprint membership: h = R_i² − x_i² − (v_y − y_i)².
        g = vy / yi
        d_x = -2.0 * xi * g
        d_y = 2.0 * vy * (vy - yi) / yi
        dh_dR2 = g
        gx, gy = d_x, d_y
        d_z = dh_dR2 * dR2_dz
        d_lam = dh_dR2 * dR2_dlam
    elif component == 2:
        # −ratio_JKI with ratio_JKI = v_y / y_i.
        d_x = xi / yi**2
        d_y = -C / yi**3
        dh_dR2 = -1.0 / (2.0 * yi**2)
        gx, gy = -d_x, -d_y
        d_z = -dh_dR2 * dR2_dz
        d_lam = -dh_dR2 * dR2_dlam
    else:
        # Components 1 and 3 are symmetric under the J↔K swap.
        if component == 1:
            xo, denom = xj, xk - xj
            Co = C
        else:
            xo, denom = xk, xj - xk
            Co = (xi**2 - c["Ri2"]) - (xk**2 - c["Rk2"])
        d_x = -(3.0 * xi**2 - 2.0 * xo * xi + (yi**2 - c["Ri2"]) - (xo**2 - (c["Rj2"] if component == 1 else c["Rk2"]))) / (
            2.0 * denom * yi**2
        )
        d_y = (xi - xo) * Co / (denom * yi**3)
        dh_dR2 = (xi - xo) / (2.0 * denom * yi**2)
        gx, gy = -d_x, -d_y
        d_z = -dh_dR2 * dR2_dz
        d_lam = -dh_dR2 * dR2_dlam

    world_xy = frame.to_world_vector([gx, gy])
    return CbfGradient(d_x=float(world_xy[0]), d_y=float(world_xy[1]), d_z=d_z, d_lambda=d_lam)


def degenerate_guard(components: CbfComponents, threshold: float):
    """Indices among the triangle components whose magnitude exceeds the blow-up threshold.

    Near-collinear triangles send the signed-area ratios to huge values; the
    returned indices are excluded from QP constraints for the step.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    return [l for l in (1, 2, 3) if abs(components[l]) > threshold]
