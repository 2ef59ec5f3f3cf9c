"""
Orbits of points and polygons under a ball of displacements
===========================================================

A mass distribution turns the 12-dimensional space of affine maps into a
Euclidean space. Every map within distance ``R`` of the identity moves a
point ``x`` by at most ``R * rho(x)``, and ``rho`` is smallest at the
barycenter of the masses.
"""
import os
import tempfile

import numpy as np

from orbitccd import Polygon3, build_mass_distribution, distortion_rate
from orbitccd.mesh import fat_polygon_mesh, write_mesh
from orbitccd.oracle import orbit_radius_probe
from orbitccd.orbits import fat_polygon

# six unit masses on the coordinate axes
md = build_mass_distribution([[1, 0, 0], [-1, 0, 0], [0, 1, 0],
                              [0, -1, 0], [0, 0, 1], [0, 0, -1]])
print("total mass", md.total_mass, "principal moments", md.eigenvalues)

###############################################################################
# The distortion rate grows away from the barycenter. Sampling the metric
# sphere gives an empirical orbit radius a few percent below the bound:
# random directions rarely hit the extremal one in 12 dimensions.

R = 0.1
for x in ([0, 0, 0], [1, 0, 0], [2, 1, 0]):
    x = np.array(x, float)
    bound = R * distortion_rate(x, md)
    seen = orbit_radius_probe(md, x, R, samples=50_000)
    print(f"x={x}  bound {bound:.5f}  sampled {seen:.5f}  ratio {seen / bound:.3f}")

###############################################################################
# A convex polygon sweeps a union of balls at the vertices, hyperboloid
# patches along the edges and a two-sheeted patch over a slightly shrunk
# copy of the face.

square = Polygon3([[-0.5, -0.5, 0], [0.5, -0.5, 0], [0.5, 0.5, 0], [-0.5, 0.5, 0]])
fp = fat_polygon(square, md, R)
print("vertex radii", [round(v.radius, 5) for v in fp.vertices])
print("edge waist", np.sqrt(fp.edges[0].p2), "face thickness", np.sqrt(fp.face.c2))
print("face shrink factors", fp.face.scale)

probe = np.array([[0, 0, 0.03], [0, 0, 0.05], [0.52, 0, 0], [0.6, 0, 0]])
print("inside the fat square:", fp.contains(probe))

###############################################################################
# Write a triangle mesh for an external viewer.

verts, faces = fat_polygon_mesh(fp, resolution=12)
path = os.path.join(tempfile.gettempdir(), "fat_square.mesh")
with open(path, "w") as fh:
    write_mesh(fh, verts, faces)
print(f"wrote {len(verts)} vertices, {len(faces)} triangles to {path}")
