"""Full pipeline for highly edge-connected graphs: cut, arborescences, path-trees, cover, tour."""

import time

from pathdecomp import PipelineConfig, decompose_24, verify_decomposition
from pathdecomp.verify import gen_circulant

G = gen_circulant(240, range(1, 81))
t = time.perf_counter()
D = decompose_24(G, PipelineConfig(ell=4, seed=0, attempts=1))
print(f"{G.m} edges -> {len(D.paths)} paths of length 4 in {time.perf_counter() - t:.1f}s")
for name in ("cut", "l2l", "parity", "cover", "tour"):
    info = D.meta["stages"].get(name, {})
    print(f"  {name:7s}", {k: v for k, v in info.items() if k in ("seconds", "cross", "removed", "conf", "lengths")})
print("independent check:", verify_decomposition(G, D, 4).verdict)
