"""Re-derive the 19-tap first-stage synthesis lowpass from the published
13-tap analysis lowpass and assert the table frozen in scatterkit.filters.

The two-channel first stage reconstructs perfectly iff the product
P = conv(analysis_lo, synthesis_lo) is halfband: its center tap is 1 and
every other even-offset tap is 0, with the highpass pair obtained from the
lowpass pair by alternating signs. P has 31 taps, so by symmetry that is
8 independent conditions on the 10 free coefficients of a symmetric 19-tap
filter. The remaining 2 degrees of freedom are spent on smoothness at the
Nyquist frequency: G(-1) = 0 and G''(-1) = 0.
"""

import sys

sys.path.insert(0, "src")

import numpy as np

from scatterkit import filters

h0 = filters.LEVEL1_ANALYSIS_LO_13
n_half = 10  # symmetric 19-tap filter: taps g[9-k] = g[9+k], k = 0..9

# Build conv(h0, g0) as a linear map of the half-coefficients c[k] = g[9+k].
basis = np.zeros((n_half, 19))
basis[0, 9] = 1.0
for k in range(1, n_half):
    basis[k, 9 - k] = 1.0
    basis[k, 9 + k] = 1.0

rows = []
rhs = []
prods = np.array([np.convolve(h0, b) for b in basis])  # each 31 taps, center 15
rows.append(prods[:, 15])
rhs.append(1.0)
for d in range(2, 16, 2):
    rows.append(prods[:, 15 + d])
    rhs.append(0.0)
signs = (-1.0) ** np.arange(19)
rows.append(basis @ signs)
rhs.append(0.0)
rows.append(basis @ (signs * (np.arange(19) - 9.0) ** 2))
rhs.append(0.0)

A = np.array(rows)
c = np.linalg.solve(A, np.array(rhs))
g0 = basis.T @ c

prod = np.convolve(h0, g0)
err = max(abs(prod[15] - 1.0), max(abs(prod[15 + d]) for d in range(2, 16, 2)))
print(f"halfband residual: {err:.3e}")
print(f"table match: {np.abs(g0 - filters.LEVEL1_SYNTHESIS_LO_19).max():.3e}")
assert np.allclose(g0, filters.LEVEL1_SYNTHESIS_LO_19, atol=1e-12)
print("frozen LEVEL1_SYNTHESIS_LO_19 reproduced")
