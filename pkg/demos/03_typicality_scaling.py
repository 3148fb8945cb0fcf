"""
Typicality of X_2 as the particle number grows
==============================================

With the window width n growing like N^alpha, the relative fluctuation
delta/mean of X_2 decays like N^(alpha - 1).  For alpha < 1 the observable
becomes typical; for alpha = 1 it does not.  The sweep uses closed forms, so
N = 10^6 costs nothing.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from qtypical import loglog_slope, scaling_sweep

Ns = [10**e for e in range(2, 7)]
fig, ax = plt.subplots(figsize=(5, 4))
for alpha, c in [(0.0, 1.0), (0.5, 1.0), (1.0, 0.5)]:
    res = scaling_sweep(1, alpha, c, Ns)
    ratios = [r.ratio for r in res.rows]
    print(f"alpha={alpha}: slope {loglog_slope(res):+.3f}  ratios {np.round(ratios, 6)}")
    ax.loglog(Ns, ratios, "o-", label=f"alpha = {alpha}")

ax.set_xlabel("N")
ax.set_ylabel("delta X_2 / mean X_2")
ax.legend()
fig.tight_layout()
fig.savefig("typicality_scaling.png", dpi=120)
print("wrote typicality_scaling.png")
