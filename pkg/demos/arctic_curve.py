"""
The predicted arctic curve
==========================

A profile with a gap in the middle.  Above the gap the curve touches the
boundary at t1 and bounds two frozen regions.
"""

from pathlib import Path

from tangent_arctic import AlphaProfile, curve_point, detect_freezing, find_t1
from tangent_arctic.arctic import curve_csv, curve_portions
from tangent_arctic.svg import render_curve_svg

out = Path("demo_output")
out.mkdir(exist_ok=True)

# slope 2 on both halves, with alpha jumping from 1 to 2 at u = 1/2
profile = AlphaProfile.build([0.5, 0.5], [2, 2], [1.0])
gap, = detect_freezing(profile)
t1 = find_t1(profile, gap)
print("gap over t in", (gap.t_lo, gap.t_hi), " t1 =", t1)

# a few points on the F portion
for t in (1.05, 1.2, 1.4):
    p = curve_point(profile, t)
    print(f"t={t}: X={p.X:.5f} Y={p.Y:.5f}  ({p.portion})")

portions = curve_portions(profile, samples=300)
(out / "gap_curve.csv").write_text(curve_csv(pt for p in portions for pt in p.points))
(out / "gap_curve.svg").write_text(render_curve_svg([p.xy() for p in portions],
                                                    profile.alpha_end))

# a tightly packed middle third gives an R portion ending in a cusp
saw = AlphaProfile.build([1, 1, 1], [2, 1, 2])
p = curve_point(saw, 5 / 6)
print(f"sawtooth, t=5/6: X={p.X:.6f} Y={p.Y:.6f}")
print("wrote", sorted(f.name for f in out.glob("gap_curve.*")))
