"""
Oscillator moments and collective observables
=============================================

The two lowest harmonic-oscillator eigenfunctions give a 2x2 matrix of
moments <phi_i|x^p|phi_j>.  Everything here is exact rational arithmetic;
odd cross moments carry one factor of sqrt(2).
"""

from qtypical import TwoModeSpace, build_observable, moment_matrix, oscillator_moment, to_dense

# Even moments of the ground state are (2m)! / (4^m m!): 1, 1/2, 3/4, 15/8, ...
for p in range(0, 9, 2):
    print(f"<phi0|x^{p}|phi0> = {oscillator_moment(0, 0, p)}"
          f"   <phi1|x^{p}|phi1> = {oscillator_moment(1, 1, p)}")

# Parity: even powers never connect the two modes, odd powers only do.
print("cross moments:", [str(oscillator_moment(0, 1, p)) for p in range(6)])

# The collective observable X_2 on N = 4 particles is diagonal on the ladder
# |l> = |N/2 + l, N/2 - l>, with entries m00 (N/2 + l) + m11 (N/2 - l).
x2 = build_observable(TwoModeSpace(4), moment_matrix(2))
print("X_2 diagonal, l = -2..2:", [str(v) for v in x2.diagonal])

# X_1 only hops one particle between the modes, with bosonic sqrt factors.
print(to_dense(build_observable(TwoModeSpace(4), moment_matrix(1))).round(4))
