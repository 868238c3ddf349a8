"""Measure white-noise energy gains of the raw transform and print the
scale factors frozen into scatterkit.filters.

Targets: a band at level j should carry a 4^-j / 2 share of a white
input's energy (six bands per level then sum to 3 * 4^-j), and the final
interleaved lowpass a 4^-J share, so that band plus lowpass energies total
the input energy exactly in expectation: 3 * sum_j 4^-j + 4^-J = 1.

Run from the repository root with src on the path. The script clears the
frozen gain tables first so it always measures the unscaled transform.
"""

import sys

sys.path.insert(0, "src")

import numpy as np

from scatterkit import dtcwt, filters

filters.BAND_GAINS.clear()
filters.LOWPASS_GAINS.clear()

J_MAX = 4
SIZE = 128
TRIALS = 100

rng = np.random.default_rng(314159)
raw_bands = np.zeros((J_MAX, 6))
raw_lo = np.zeros(J_MAX)
for _ in range(TRIALS):
    x = rng.standard_normal((SIZE, SIZE))
    ex = float((x**2).sum())
    for j_total in range(1, J_MAX + 1):
        p = dtcwt.forward(x, j_total)
        raw_lo[j_total - 1] += (p.lowpass_interleaved**2).sum() / ex
    for j in range(J_MAX):
        raw_bands[j] += (np.abs(p.bands[j]) ** 2).sum(axis=(0, 1)) / ex
raw_bands /= TRIALS
raw_lo /= TRIALS

print("BAND_GAINS = {")
for j in range(1, J_MAX + 1):
    target = 4.0 ** (-j) / 2.0
    scales = np.sqrt(target / raw_bands[j - 1])
    inner = ", ".join(f"{s:.6f}" for s in scales)
    print(f"    {j}: np.array([{inner}]),")
print("}")

print("LOWPASS_GAINS = {")
for j_total in range(1, J_MAX + 1):
    target = 4.0 ** (-j_total)
    print(f"    {j_total}: {np.sqrt(target / raw_lo[j_total - 1]):.6f},")
print("}")
