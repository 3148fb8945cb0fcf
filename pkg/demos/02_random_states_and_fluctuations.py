"""
Random states on a window and their fluctuations
================================================

Draw Haar-random states from the window |l| <= k and split the spread of
measurement outcomes into a statistical part (state-to-state variation of
<A>) and a quantum part (mean of <A^2> - <A>^2).  Their sum needs only
traces and is computed exactly.
"""

from qtypical import (
    SamplerConfig,
    TwoModeSpace,
    build_observable,
    exact_total_variance,
    make_window,
    mc_decomposition,
    moment_matrix,
)

space = TwoModeSpace(100)
window = make_window(space, 5)  # n = 11 states
x2 = build_observable(space, moment_matrix(2))

exact = exact_total_variance(window, x2)
print("exact:       mean", exact.mean, " delta^2", exact.delta_sq,
      " (statistical", exact.delta_s_sq, "+ quantum", exact.delta_q_sq, ")")

mc = mc_decomposition(window, x2, SamplerConfig(master_seed=42), 20_000)
se = mc.stderr
print(f"monte carlo: delta_s^2 = {mc.delta_s_sq:.4f} +- {se['delta_s_sq']:.4f}")
print(f"             delta_q^2 = {mc.delta_q_sq:.4f} +- {se['delta_q_sq']:.4f}")
print(f"             sum       = {mc.delta_sq:.4f} +- {se['delta_sq']:.4f}"
      f"   (exact {float(exact.delta_sq):.4f})")

# Most of the spread is quantum: a random superposition of 11 number states
# is far from an eigenstate, while its expectation value barely moves.
