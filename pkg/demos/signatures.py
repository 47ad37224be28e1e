"""Boundaried graphs, signatures and protrusion replacement.

A boundaried graph is summarised by its signature: for every way the
boundary may be deleted or connected by the outside world, the cheapest
interior deletion.  Two pieces with equal signatures are interchangeable
up to a constant shift in the budget.

    python3 demos/signatures.py
"""

from thetadel import BoundariedGraph, Multigraph
from thetadel.protrusion import RepresentativeCache, signature

# a 5-cycle hanging off boundary vertex "b" and a single triangle at "b"
pentagon = Multigraph(["b", 1, 2, 3, 4], [("b", 1), (1, 2), (2, 3), (3, 4), (4, "b")])
triangle = Multigraph(["b", "x", "y"], [("b", "x"), ("x", "y"), ("y", "b")])
for name, g in (("pentagon", pentagon), ("triangle", triangle)):
    sig = signature(BoundariedGraph(g, ("b",)), 2)
    print(f"{name:9s} offset={sig.offset} table={sig.as_dict()}")

sig = signature(BoundariedGraph(pentagon, ("b",)), 2)
rep = RepresentativeCache().lookup(sig)
print(f"smallest equivalent piece: {rep.graph.n} vertices, edges {list(rep.graph.pairs())}")
