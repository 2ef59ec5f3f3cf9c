"""Triangle meshes of orbit parts, for inspection in external viewers.

Every mesh vertex lies on the boundary surface of its part: on the sphere
of a fat vertex, on the hyperboloid of a fat edge, or on one of the two
sheets of a fat face.
"""
from __future__ import annotations

import numpy as np


def _grid_faces(rows, cols, offset=0, wrap=False):
    """Two triangles per cell of a rows x cols vertex grid (row major)."""
    faces = []
    last = cols if wrap else cols - 1
    for i in range(rows - 1):
        for j in range(last):
            a = offset + i * cols + j
            b = offset + i * cols + (j + 1) % cols
            c = a + cols
            d = b + cols
            faces += [(a, b, d), (a, d, c)]
    return faces


def sphere_mesh(center, radius, rings=8, segments=16):
    theta = np.linspace(0.0, np.pi, rings + 1)
    phi = np.linspace(0.0, 2.0 * np.pi, segments, endpoint=False)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    dirs = np.stack([np.sin(t) * np.cos(p), np.sin(t) * np.sin(p), np.cos(t)], axis=-1)
    verts = np.asarray(center, dtype=float) + radius * dirs.reshape(-1, 3)
    return verts, np.array(_grid_faces(rings + 1, segments, wrap=True))


def edge_mesh(fe, rings=8, segments=24):
    """Hyperboloid patch of a fat edge between its two slab planes."""
    x = np.linspace(fe.slab[0], fe.slab[1], rings + 1)
    phi = np.linspace(0.0, 2.0 * np.pi, segments, endpoint=False)
    r = np.sqrt(fe.p2 * (1.0 + x * x / fe.q2))
    xx, pp = np.meshgrid(x, phi, indexing="ij")
    rr = np.repeat(r[:, None], segments, axis=1)
    local = np.stack([xx, rr * np.cos(pp), rr * np.sin(pp)], axis=-1).reshape(-1, 3)
    return fe.origin + local @ fe.axes, np.array(_grid_faces(rings + 1, segments, wrap=True))


def face_mesh(ff, levels=6):
    """Both sheets of a fat face over the scaled polygon."""
    poly = ff.scaled_polygon
    center = poly.mean(axis=0)
    pts, faces = [], []
    for k in range(len(poly)):
        a, b = poly[k], poly[(k + 1) % len(poly)]
        index = {}
        for i in range(levels + 1):
            for j in range(levels + 1 - i):
                index[i, j] = len(pts)
                pts.append(center + (a - center) * i / levels + (b - center) * j / levels)
        for i in range(levels):
            for j in range(levels - i):
                faces.append((index[i, j], index[i + 1, j], index[i, j + 1]))
                if i + j < levels - 1:
                    faces.append((index[i + 1, j], index[i + 1, j + 1], index[i, j + 1]))
    xy = np.array(pts)
    z = np.sqrt(ff.c2 * (1.0 + xy[:, 0] ** 2 / ff.a2 + xy[:, 1] ** 2 / ff.b2))
    top = np.column_stack([xy, z])
    bottom = np.column_stack([xy, -z])
    faces = np.array(faces)
    local = np.vstack([top, bottom])
    # flip the lower sheet so both face outward
    all_faces = np.vstack([faces, faces[:, ::-1] + len(xy)])
    return ff.origin + local @ ff.axes, all_faces


def merge(parts):
    verts, faces, offset = [], [], 0
    for v, f in parts:
        verts.append(v)
        faces.append(f + offset)
        offset += len(v)
    return np.vstack(verts), np.vstack(faces)


def fat_polygon_mesh(fp, resolution=8):
    """One mesh holding the face sheets, edge patches and vertex spheres."""
    parts = [face_mesh(fp.face, resolution)]
    parts += [edge_mesh(e, resolution, 3 * resolution) for e in fp.edges]
    parts += [sphere_mesh(v.center, v.radius, resolution, 2 * resolution) for v in fp.vertices]
    return merge(parts)


def write_mesh(stream, verts, faces):
    """ASCII triangle mesh: ``v x y z`` lines, then 1-based ``f i j k`` lines."""
    for x, y, z in verts:
        stream.write(f"v {float(x)!r} {float(y)!r} {float(z)!r}\n")
    for i, j, k in faces:
        stream.write(f"f {i + 1} {j + 1} {k + 1}\n")


def read_mesh(text):
    verts, faces = [], []
    for line in text.splitlines():
        tag, *vals = line.split()
        if tag == "v":
            verts.append([float(v) for v in vals])
        elif tag == "f":
            faces.append([int(v) - 1 for v in vals])
    return np.array(verts), np.array(faces, dtype=int)
