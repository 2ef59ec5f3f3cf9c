"""
Certifying a rational motion of an octagon
==========================================

Two regular octagons: one fixed, one moving along a degree 8 rational motion
built from a quadratic quaternion curve and a quadratic offset. The detector
bounds motion segments by metric balls, tests the swept "fat" octagon against
the fixed one and subdivides wherever the test is inconclusive.

The octagon sizes and motion data are our own choice; they only imitate a
setup in which the moving octagon passes close over the fixed one.
"""
import numpy as np

from orbitccd.oracle import distances_along, sampled_min_distance
from orbitccd.scenes import octagon_scene

miss = octagon_scene(collide=False)
report = miss.run()
print("epsilon", report.epsilon)
print("certified:", report.certified)
print("intersection tests", report.intersection_calls, "max depth", report.max_depth)

###############################################################################
# Sampling the motion densely agrees: the octagons stay apart.

probe = sampled_min_distance(miss.moving[0], miss.fixed[0], miss.motion, 10_000)
print(f"sampled min distance {probe.min_distance:.4f} at t={probe.worst_parameter:.3f}")

###############################################################################
# Lowering the moving octagon makes them interfere. The suspect intervals
# cover every sampled contact parameter.

hit = octagon_scene(collide=True)
pair = hit.run().pairs[0]
print("suspect intervals", list(pair.intervals))
ts = np.linspace(0, 1, 5_001)
contact = ts[distances_along(hit.moving[0], hit.fixed[0], hit.motion, ts) <= 0]
print(f"contact sampled on [{contact.min():.4f}, {contact.max():.4f}]")
print("all covered:", all(pair.intervals.contains(t) for t in contact))

###############################################################################
# Leaves ended by the epsilon rule against leaves ended by the depth cap.

reasons = [r for *_, r in pair.leaves]
print({r: reasons.count(r) for r in set(reasons)})
