"""
The tangent method at finite size
=================================

Displace one starting point to depth r = z n below a gap and find the most
likely entry point exactly.  As n grows, ell*/n approaches the value read
off from the curve.
"""

from tangent_arctic import AlphaProfile
from tangent_arctic.combinatorics import PortionKind
from tangent_arctic.tangent_verify import (action_S0, action_S1, convergence_table,
                                           default_interval)

profile = AlphaProfile.build([0.5, 0.5], [2, 2], [1.0])
iv = default_interval(profile, PortionKind.F)

table = convergence_table(profile, iv, PortionKind.F, 0.25, [20, 40, 80, 160, 320])
print(table.to_csv())

# the rate of the weight, S0 + S1, peaks at the predicted entry point
xi_star = table.rows[0][2]
for xi in (xi_star - 0.1, xi_star, xi_star + 0.1):
    s = action_S0(PortionKind.F, 0.25, xi, iv.extent) + action_S1(profile, PortionKind.F, xi, iv)
    print(f"xi={xi:.4f}  S0+S1={s:.6f}")

saw = AlphaProfile.build([1, 1, 1], [2, 1, 2])
print(convergence_table(saw, default_interval(saw, PortionKind.R), PortionKind.R, 1 / 3,
                        [30, 60, 120]).to_csv())
