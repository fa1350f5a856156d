# Open clusters, their extents, and the maximum finite diameter.
#
# A cluster of the padded box B_N counts as finite when it stays off the
# boundary of B_N.  R_fb looks at the full configuration; R_zb first closes
# every bond that leaves B_n.
from percolab.cluster import SimFrame, build, diameter, r_fb, r_zb, s_n
from percolab.percolation import EdgeSampler
from percolab.render import render_ascii

n, p, seed = 6, 0.4, 3
print(render_ascii(n, p, seed))

frame = SimFrame.with_margin(2, n, 10)
sampler = EdgeSampler(seed, p)
forest = build(frame, sampler)
inner = build(frame.inner, sampler)

roots = forest.roots()
finite = [r for r in roots if not forest.touches_outer[r]]
print(f"B_{frame.outer.n}: {len(roots)} clusters, {len(finite)} finite")

biggest = max(finite, key=lambda r: forest.size[r])
print(f"largest finite cluster: {forest.size[biggest]} vertices, "
      f"extents {forest.extents(biggest)}, diameter {diameter(forest, biggest)}")

print(f"R_fb = {r_fb(frame, forest)}, R_zb = {r_zb(frame, forest, inner)}")
for rho in (0.5, 1.0, 2.0):
    print(f"S_n(rho={rho}) = {s_n(frame, forest, rho)} vertices of B_{n}")
