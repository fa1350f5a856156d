# Four coupled configurations on B_30 either side of p_c = 1/2.
#
# All panels share one seed, so every bond open at a lower p is open at the
# higher ones.  The images go to demos/output/ as binary PPM files.
from pathlib import Path

from percolab.render import open_bonds, render_ppm

out = Path(__file__).resolve().parent / "output"
out.mkdir(exist_ok=True)
n, seed = 30, 1
for p in (0.25, 0.49, 0.51, 0.75):
    path = out / f"panel_p{p:.2f}.ppm"
    path.write_bytes(render_ppm(n, p, seed, cell=8))
    print(f"p = {p:.2f}: {len(open_bonds(n, p, seed)):5d} open bonds -> {path.name}")
