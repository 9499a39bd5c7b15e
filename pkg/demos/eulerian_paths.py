"""Cut a 30-regular circulant into 3-paths by way of a tour with no short closed subwalks."""

from pathdecomp import PipelineConfig, decompose_eulerian4, verify_decomposition
from pathdecomp.verify import gen_circulant

G = gen_circulant(100, range(1, 21))
D = decompose_eulerian4(G, PipelineConfig(ell=3, seed=0))
report = verify_decomposition(G, D, 3)

print(f"graph: {G.n} vertices, {G.m} edges ({G.m % 3} left over modulo 3)")
print(f"paths: {len(D.paths)} of length 3, leftover {len(D.leftover) if D.leftover else 0}")
print("first five:", [P.verts for P in D.paths[:5]])
print("independent check:", "ok" if report.verdict else report.violations[:5])
print("stage timings:", {k: v.get("seconds") for k, v in D.meta["stages"].items() if isinstance(v, dict)})
