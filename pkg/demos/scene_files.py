"""
Scene files, non-convex faces and the command line
==================================================

Scenes are JSON documents. Non-convex faces are split into convex pieces on
load; rotations may be given as quaternions.
"""
import json
import os
import subprocess
import sys
import tempfile

from orbitccd import decompose, parse_scene, serialize_scene

L_SHAPE = [[0, 0, 0], [2, 0, 0], [2, 1, 0], [1, 1, 0], [1, 2, 0], [0, 2, 0]]
pieces = decompose(L_SHAPE)
print(len(pieces), "convex pieces, areas", [p.area() for p in pieces])

###############################################################################
# A slab sliding over the L while turning a quarter turn about z.

doc = {
    "fixed": [L_SHAPE],
    "moving": [[[0, 0, 0.3], [0.5, 0, 0.3], [0.5, 0.5, 0.3], [0, 0.5, 0.3]]],
    "motion": {"controls": [
        {"quat": [1, 0, 0, 0], "translation": [0, 0, 0], "weight": 1},
        {"quat": [0.92388, 0, 0, 0.38268], "translation": [1, 1, 0], "weight": 1},
        {"quat": [0.70711, 0, 0, 0.70711], "translation": [2, 2, 0], "weight": 1},
    ]},
    "config": {"epsilon": 0.01},
}
scene = parse_scene(json.dumps(doc))
report = scene.run()
print("certified:", report.certified, "pairs:", len(report.pairs))

###############################################################################
# Serialization is canonical, so a round trip reproduces the same text.

text = serialize_scene(scene)
assert serialize_scene(parse_scene(text)) == text
path = os.path.join(tempfile.gettempdir(), "slab_over_l.json")
with open(path, "w") as fh:
    fh.write(text)

###############################################################################
# The same check from the command line; exit code 0 means certified.

res = subprocess.run([sys.executable, "-m", "orbitccd", "check", path],
                     capture_output=True, text=True)
print(res.stdout)
print("exit code", res.returncode)
