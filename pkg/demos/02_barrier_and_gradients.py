"""
The coverage-hole barrier and its gradients
===========================================

A hole can only open at the radical center v of a triangle of cameras, and it
exists exactly when v is strictly inside the triangle of footprint centers
while no footprint covers it.  Four scalar conditions encode this; their
pointwise max is the barrier h.  h >= 0 certifies "no hole", and the sign
flips exactly when the independent oracles say a hole appears.
"""

import numpy as np

from aircover import (
    AgentState,
    cbf_components,
    cbf_gradient,
    detect_holes_grid,
    hole_exists_exact,
    make_trio,
    ncbf_value,
)

r = 1.0
hoverers = [AgentState(-1.4, 0.0, 1.5, 1.0), AgentState(1.4, 0.0, 1.5, 1.0)]

# Slide a third agent away from the pair and watch the barrier cross zero.
# (Exactly y = 0 would make the three centers collinear -- a degenerate
# triangle the library rejects -- so the sweep starts just off the line.)
print("mover y    h (barrier)   argmax   exact oracle   grid witnesses")
for y in (-0.3, -0.6, -1.2, -1.5, -1.8, -2.2):
    mover = AgentState(0.0, y, 1.5, 1.0)
    trio = make_trio((0, 1, 2), [mover, *hoverers], r)
    value = ncbf_value(trio, 0, epsilon=0.2)
    holed = hole_exists_exact(trio)
    witnesses = detect_holes_grid([mover, *hoverers], r, (-4, -4, 4, 4), 0.02)
    print(f"{y:+7.1f}   {value.value:+11.4f}   comp {value.argmax}   "
          f"{'HOLE' if holed else 'safe':>12}   {len(witnesses):>5}")

# The four components from the mover's viewpoint: three triangle-side
# conditions (is v beyond an edge?) and the footprint condition (does my
# disk reach v?).  The max picks the "most safe" certificate.
mover = AgentState(0.0, -1.2, 1.5, 1.0)
trio = make_trio((0, 1, 2), [mover, *hoverers], r)
comps = cbf_components(trio, 0)
print("\ncomponent values from the mover's viewpoint:",
      np.round(comps.vals, 4))
print("almost-active set (within epsilon = 0.2 of the max):",
      ncbf_value(trio, 0, 0.2).active_set)

# Every component has an analytic gradient in the agent's own four controls
# (x, y, z, lambda).  Check one against central finite differences.
component = 4
grad = cbf_gradient(trio, 0, component).as_array()
h = 1e-6
fd = np.zeros(4)
for coord in range(4):
    vals = []
    for sign in (+1.0, -1.0):
        bumped = [mover.x, mover.y, mover.z, mover.lam]
        bumped[coord] += sign * h
        t = make_trio((0, 1, 2), [AgentState(*bumped), *hoverers], r)
        vals.append(cbf_components(t, 0)[component])
    fd[coord] = (vals[0] - vals[1]) / (2.0 * h)
print(f"\ncomponent {component} gradient (analytic):", np.round(grad, 6))
print(f"component {component} gradient (finite diff):", np.round(fd, 6))
print("max abs difference:", f"{np.max(np.abs(grad - fd)):.2e}")
