# Boxes, edges and the hash-based edge sampler.
#
# Every bond of Z^d gets its uniform from a hash of (seed, base vertex, axis),
# so the same seed describes one configuration of the whole lattice.  Any box
# sees a consistent restriction of it, and raising p only opens bonds.
import numpy as np

from percolab.lattice import BoxSpec, boundary_size, interior_edges, vertex_index
from percolab.percolation import EdgeSampler, RestrictedConfig

box = BoxSpec(2, 2)
print(f"B_2 in d=2: side {box.side}, {box.num_vertices} vertices, {box.num_edges} bonds, "
      f"{boundary_size(box)} boundary vertices")

# vertices are numbered lexicographically, first coordinate most significant
for v in [(-2, -2), (-2, -1), (0, 0), (2, 2)]:
    print(f"  index of {v}: {vertex_index(box, v)}")

sampler = EdgeSampler(seed=7, p=0.5)
edges = list(interior_edges(box))
print("\nfirst five bonds and their uniforms:")
for e in edges[:5]:
    print(f"  base {e.base} axis {e.axis}: u = {sampler.uniform(e):.4f} "
          f"-> {'open' if sampler.state(e) else 'closed'}")

# monotone coupling: the open set grows with p
for p in (0.2, 0.5, 0.8):
    s = EdgeSampler(7, p)
    print(f"p = {p}: {sum(s.state(e) for e in edges)} of {len(edges)} bonds open")

# the zero-boundary restriction closes every bond that leaves the smaller box
inner = RestrictedConfig(EdgeSampler(7, 1.0), BoxSpec(2, 1))
print(f"\nall bonds open, restricted to B_1: "
      f"{sum(inner.state(e) for e in edges)} of B_2's {len(edges)} bonds stay open")

# a million uniforms at once
rng = np.random.default_rng(0)
u = sampler.uniforms(rng.integers(-10 ** 6, 10 ** 6, size=(10 ** 6, 2)),
                     rng.integers(0, 2, size=10 ** 6))
print(f"\n10^6 uniforms: mean {u.mean():.4f}, min {u.min():.2e}, max {u.max():.6f}")
