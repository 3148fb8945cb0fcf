"""
Fitting the variance expansion
==============================

The exact window variance is fitted to N^2/4, n^2, N and 1.  For even
powers the N^2 coefficient vanishes because the two modes have opposite
parity, and the n^2 coefficient is (m11 - m00)^2 / 12.  The odd power
x^1 shows the other branch: a nonzero N^2 term.
"""

from qtypical import analytic_coefficients, fit_expansion

for nu in (1, 2, 3):
    fit = fit_expansion(nu)
    print(f"x^{2 * nu}: d20 fit {fit.d20:+.2e} (exact {fit.exact.d20}), "
          f"d02 fit {fit.d02:.10f} (exact {fit.exact.d02})")

odd = fit_expansion(None, power=1)
print(f"x^1: d20 fit {odd.d20:.10f} (exact {odd.exact.d20}), "
      f"n^2 fit {odd.d02:.10f} (exact {odd.exact.n2_coefficient})")

# The n^2 coefficient of x^1 is -1/12, not the (m11 - m00)^2/12 = 0 one might
# read off the diagonal part alone: the hopping term also depends on l^2.
print(analytic_coefficients(power=1))
