"""
Subdivided squares and the cost of mass distributions
=====================================================

A unit square tilts about its diagonal above a fixed unit square. Both are
cut into ``n x n`` sub-squares, giving ``n**4`` pairs. Three variants differ
only in a constant vertical offset: the dipping corner touches (hit), stays
1.5 epsilon away (near hit) or stays a full diameter away (miss).
"""
import os
import tempfile

import numpy as np

from orbitccd.cli import hist_svg
from orbitccd.scenes import two_squares

###############################################################################
# In the miss case every pair is excluded by a single test, so the work is
# exactly ``n**4`` tests.

for n in (1, 2, 3, 4):
    rep = two_squares(n, "miss").run()
    print(f"n={n}  pairs {len(rep.pairs)}  tests {rep.intersection_calls}")

###############################################################################
# In the hit case the pairs near the dipping corner need deep recursion. One
# mass distribution per sub-square, or one for the whole moving square:

for n in (3, 4, 5):
    counts = {s: two_squares(n, "hit", s).run() for s in ("per_polygon", "global")}
    line = "  ".join(f"{s}: {r.intersection_calls} tests, {r.seconds:.2f} s"
                     for s, r in counts.items())
    print(f"n={n}  {line}")

###############################################################################
# Work per moving sub-square as an SVG heat map.

n = 4
rep = two_squares(n, "hit", "per_polygon").run()
calls = np.zeros(n * n, dtype=int)
for p in rep.pairs:
    calls[p.moving_index] += p.intersection_calls
cells = {k: (0.0, int(calls[k])) for k in range(n * n)}
path = os.path.join(tempfile.gettempdir(), "two_squares_hit.svg")
with open(path, "w") as fh:
    fh.write(hist_svg({(n, "hit", "per_polygon"): cells}, value="calls"))
print(calls.reshape(n, n)[::-1])
print("wrote", path)
