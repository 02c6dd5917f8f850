"""
Power diagrams of camera footprints
===================================

Three downward-facing cameras project disks onto the ground plane.  The power
diagram carves the plane into the regions where each disk "wins" the weighted
distance d_P(p, q) = |q - c|^2 - R^2, and the three pairwise boundaries (the
radical axes) meet in a single equal-power point: the radical center.
"""

import numpy as np

from aircover import (
    AgentState,
    fov_of,
    make_trio,
    power_distance,
    radical_axis,
    sigma_d_frame,
)

# Three agents at different altitudes and zoom levels.  The footprint radius
# is r * z / lambda, so the high zoomed-out agent casts the biggest disk.
states = [
    AgentState(x=0.0, y=-2.0, z=1.5, lam=1.0),
    AgentState(x=-1.4, y=0.0, z=1.2, lam=0.8),
    AgentState(x=1.4, y=0.0, z=2.0, lam=1.1),
]
r = 1.0
for s in states:
    fov = fov_of(s, r)
    print(f"agent at ({s.x:+.1f}, {s.y:+.1f}): footprint center "
          f"({fov.cx:+.1f}, {fov.cy:+.1f}), radius {fov.radius:.3f}")

# The trio context bundles the footprints, the triangle of centers, and the
# radical center v.
trio = make_trio((0, 1, 2), states, r)
v = trio.radical_center
print(f"\nradical center v = ({v[0]:+.4f}, {v[1]:+.4f})")

# v has the same power distance to all three disks -- that is its definition.
powers = [power_distance(f, v) for f in trio.fovs]
print("power distances at v:", np.round(powers, 12))

# Each pairwise radical axis is perpendicular to the line joining the two
# centers, and v lies on all three axes.
for a, b in ((0, 1), (0, 2), (1, 2)):
    axis = radical_axis(trio.fovs[a], trio.fovs[b])
    centers = trio.fovs[b].center - trio.fovs[a].center
    to_v = v - axis.point
    offset = axis.direction[0] * to_v[1] - axis.direction[1] * to_v[0]
    print(f"axis {a}-{b}: |direction . centers| = "
          f"{abs(float(axis.direction @ centers)):.2e}, "
          f"distance of v from axis = {abs(offset):.2e}")

# The per-agent working frame puts its y-axis along the radical axis of the
# other two agents, so v always sits on the frame's y-axis (x-coordinate 0).
for agent in trio.ids:
    frame = sigma_d_frame(trio, agent)
    print(f"agent {agent} frame coordinates of v:",
          np.round(frame.to_frame(v), 12))
