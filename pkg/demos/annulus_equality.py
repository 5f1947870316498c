"""Where does the jet Suita inequality become an equality on {1 < |z| < R}?

Scans the relative gap in 50-digit arithmetic and compares the detected
radii with R^{k/(m+1)}.
"""
import sys

from l2lab.suita import equality_locus_scan

R = float(sys.argv[1]) if len(sys.argv) > 1 else 8.0
m = int(sys.argv[2]) if len(sys.argv) > 2 else 2

loc = equality_locus_scan(R, m)
print(f"R = {R:g}, m = {m}")
print("predicted:", [round(r, 8) for r in loc.predicted])
print("detected: ", [round(r, 8) for r in loc.detected])
print("min relative gap on the scan:", float(loc.min_gap))
for r, g in list(zip(loc.scan_radii, loc.scan_relative_gap))[:: max(1, len(loc.scan_radii) // 12)]:
    print(f"  |z0| = {r:8.5f}   gap/rhs = {float(g):.3e}")
