"""Two-phase approximation on random sparse graphs.

Phase one either rejects a budget or returns a hitting set Z; phase two
splits along balanced separators, recursing at most about log_{3/2}|Z|
levels deep.

    python3 demos/approximation.py
"""

import random

from thetadel import Multigraph, exact_hitting_set
from thetadel.approx import approximate_detailed, depth_bound

rng = random.Random(3)
for n in (15, 25, 40):
    es = [(v, rng.randrange(v)) for v in range(1, n)]
    es += [tuple(rng.sample(range(n), 2)) for _ in range(n // 5)]
    g = Multigraph(range(n), es)
    res = approximate_detailed(g, 2)
    opt = len(exact_hitting_set(g, 2))
    print(f"n={n:2d}: |S|={res.size:2d} OPT={opt:2d} |Z|={res.phase1_size:2d} "
          f"depth={res.depth} (bound {depth_bound(res.phase1_size)})")
