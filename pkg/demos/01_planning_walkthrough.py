"""Dimensioning walkthrough: from a link budget to a site count.

Start with nothing but a power budget and see how far a cell reaches at
3.5 GHz vs 28 GHz, and how many sites an 8 x 8 km service area needs.
Run with: python3 demos/01_planning_walkthrough.py
"""

import numpy as np

from rfplan.planning import (LinkBudget, cell_radius_m, max_allowed_pathloss_db,
                             receiver_sensitivity_dbm, required_site_count)
from rfplan.propagation import PathlossQuery, pathloss_db

# A fairly standard macro budget: 43 dBm PA, 17 dBi panel, a few dB of
# cable loss and planning margins.
budget = LinkBudget(tx_power_dbm=43.0, tx_antenna_gain_dbi=17.0,
                    cable_loss_db=3.0, interference_margin_db=4.0,
                    shadow_margin_db=6.0, noise_figure_db=7.0,
                    bandwidth_mhz=100.0)

sens = receiver_sensitivity_dbm(budget)
mapl = max_allowed_pathloss_db(budget)
print(f"receiver sensitivity : {sens:8.2f} dBm")
print(f"max allowed pathloss : {mapl:8.2f} dB")

# The pathloss curve is monotone in distance, so the cell edge is just
# the inverse of the curve at the MAPL. NLOS keeps the plan conservative.
area_m2 = 8000.0 * 8000.0
print()
print("fc [GHz]   radius [m]   sites for 8x8 km")
for fc in (0.7, 2.1, 3.5, 28.0):
    r = cell_radius_m(mapl, "UMa", "NLOS", fc, 25.0, 1.5)
    n = required_site_count(area_m2, r)
    print(f"{fc:7.1f}   {r:9.1f}   {n:6d}")

# Sanity: walking back through the forward model should land on the MAPL.
r35 = cell_radius_m(mapl, "UMa", "NLOS", 3.5, 25.0, 1.5)
pl = pathloss_db(PathlossQuery(r35, 3.5, 25.0, 1.5, "UMa", "NLOS"))
print()
print(f"round trip at 3.5 GHz: PL({r35:.1f} m) = {pl:.2f} dB "
      f"(MAPL {mapl:.2f} dB)")

# And the dual-slope LOS curve itself, if you want to eyeball it.
d = np.logspace(1, 4, 10)
pl_curve = [pathloss_db(PathlossQuery(x, 3.5, 25.0, 1.5, "UMa", "LOS"))
            for x in d]
print()
print("d2d [m] ", "  ".join(f"{x:7.0f}" for x in d))
print("PL  [dB]", "  ".join(f"{x:7.1f}" for x in pl_curve))
