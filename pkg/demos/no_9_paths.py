"""The 2-edge-connected gadget with 90 edges that cannot be split into 9-paths, certified by exact search."""

from pathdecomp.graph import edge_connectivity
from pathdecomp.verify import brute_force_decomposable, gen_fig1_gadget

G = gen_fig1_gadget()
print(f"{G.n} vertices, {G.m} edges, edge connectivity {edge_connectivity(G)}, center degree {G.degree(0)}")
res = brute_force_decomposable(G, 9, time_limit=3600)
print(f"decomposable into 9-paths: {res.verdict} ({res.nodes} search nodes, {res.seconds:.1f}s)")
