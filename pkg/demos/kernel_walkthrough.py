"""Kernelize a padded Feedback Vertex Set instance and read the report.

Two K4s (each needs two deletions) carry long pendant trees.  The trees
never lie on a cycle, so a good kernel should throw all of them away
while keeping the answer for every budget.

    python3 demos/kernel_walkthrough.py
"""

import random
from itertools import combinations

import networkx as nx

from thetadel import Instance, Multigraph, exact_hitting_set, kernelize_thetac

rng = random.Random(7)
edges = [(a, b) for a, b in combinations(range(4), 2)]
edges += [(a + 4, b + 4) for a, b in combinations(range(4), 2)]
vertices, nxt = list(range(8)), 100
for anchor in range(8):
    tree = nx.random_labeled_tree(10, seed=rng.randrange(10 ** 6))
    ids = {t: nxt + t for t in tree.nodes}
    nxt += 10
    vertices += ids.values()
    edges += [(ids[a], ids[b]) for a, b in tree.edges] + [(ids[0], anchor)]
g = Multigraph(vertices, edges)
print(f"input: n={g.n} m={g.m}, optimum FVS = {len(exact_hitting_set(g, 2))}")

for k in (3, 4, 5):
    out, rep = kernelize_thetac(Instance(g, k, 2))
    answer = "no" if out.rejected else ("yes" if len(exact_hitting_set(out.graph, 2)) <= out.k else "no")
    print(f"k={k}: verdict={rep.verdict:<10} kernel n={rep.n_out:<3} k'={rep.k_out:<3} "
          f"answer={answer}  rules={rep.rule_counts}")
