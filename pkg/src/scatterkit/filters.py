"""Wavelet filter tables and the filter-set container.

Level 1 uses an odd-length near-symmetric biorthogonal pair. The 13-tap
analysis lowpass is the standard published table (7 decimal places). Its
19-tap synthesis partner is not embedded from literature: it is solved to
machine precision from the halfband perfect-reconstruction conditions on
the product filter plus two vanishing-moment constraints, which pins all
ten free coefficients. The derivation script lives in
tools/derive_level1_filters.py and asserts the frozen values below.

Levels 2 and up use the standard published 14-tap quarter-shift prototype
(sums to sqrt(2)); the four per-tree filters follow from it by reversal
and alternate-sign modulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LEVEL1_ANALYSIS_LO_13 = np.array([
    -0.0017581, 0.0000000, 0.0222656, -0.0468750, -0.0482422,
    0.2968750, 0.5554688, 0.2968750, -0.0482422, -0.0468750,
    0.0222656, 0.0000000, -0.0017581,
])

# Solved partner; halfband product residual 3.4e-17. The two entries frozen
# as literal 0.0 came out at 3.6e-16 in the solve.
LEVEL1_SYNTHESIS_LO_19 = np.array([
    5.80532194854936e-05,
    0.0,
    -0.0015469087690567745,
    -0.0015478326963338214,
    0.011060097135974728,
    0.03144444252362649,
    -0.08385305473683645,
    -0.10559456832424667,
    0.5742821131506131,
    1.1513965169942688,
    0.5742821131506131,
    -0.10559456832424667,
    -0.08385305473683645,
    0.03144444252362649,
    0.011060097135974728,
    -0.0015478326963338214,
    -0.0015469087690567745,
    0.0,
    5.80532194854936e-05,
])

# Quarter-shift prototype (14 taps). Published table; the same values
# appear in the reference implementations this package was checked against.
QSHIFT_HL_14 = np.array([
    0.0032531427636532, -0.0038832119991585, 0.0346603468448535,
    -0.0388728012688278, -0.1172038876991153, 0.2752953846688820,
    0.7561456438925225, 0.5688104207121227, 0.0118660920337970,
    -0.1067118046866654, 0.0238253847949203, 0.0170252238815540,
    -0.0054394759372741, -0.0045568956284755,
])


# Averaging kernel for the scattering cascade, one stage per scale. All
# taps are positive, so averaged moduli stay non-negative, and the taps
# are dyadic rationals, so the unit DC gain is exact in floating point.
SCATTER_AVERAGING_5 = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0


def _alternate_negate(f: np.ndarray) -> np.ndarray:
    # Negate samples at odd offsets from the filter's t=0 sample, which for
    # an even-length prototype sits at index len//2.
    out = f.copy()
    start = (len(f) // 2 + 1) % 2
    out[start::2] = -out[start::2]
    return out


def _modulate(f: np.ndarray, parity: int) -> np.ndarray:
    signs = np.array([(-1.0) ** (k + parity) for k in range(len(f))])
    return f * signs


@dataclass(frozen=True)
class WaveletFilterSet:
    """Immutable bundle of analysis and synthesis filters for both trees.

    Level-1 trees share one biorthogonal pair and differ only in sampling
    phase (the even and odd output phases of a full-rate filtering), so
    the level-1 fields carry a single (lo, hi) analysis pair and its
    synthesis partners with the 1/2 reconstruction factor folded in.

    Quarter-shift fields are per tree: the tree living on even positions
    of an interleaved axis analyzes with the `_even` filters, and its
    synthesis uses the opposite tree's filters (time reversal).
    """

    level1_lo: np.ndarray
    level1_hi: np.ndarray
    level1_synth_lo: np.ndarray
    level1_synth_hi: np.ndarray
    qshift_lo_even: np.ndarray
    qshift_hi_even: np.ndarray
    qshift_lo_odd: np.ndarray
    qshift_hi_odd: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        for name in (
            "level1_lo", "level1_hi", "level1_synth_lo", "level1_synth_hi",
            "qshift_lo_even", "qshift_hi_even", "qshift_lo_odd",
            "qshift_hi_odd", "phi",
        ):
            getattr(self, name).setflags(write=False)


def build_filter_set() -> WaveletFilterSet:
    h0 = LEVEL1_ANALYSIS_LO_13.copy()
    g0 = LEVEL1_SYNTHESIS_LO_19.copy()
    h1 = _modulate(g0, 0)
    sg1 = _modulate(h0, 1)

    hl = QSHIFT_HL_14.copy()
    h00b = hl
    h00a = hl[::-1].copy()
    h01a = _alternate_negate(hl)
    h01b = h01a[::-1].copy()

    return WaveletFilterSet(
        level1_lo=h0,
        level1_hi=h1,
        level1_synth_lo=g0 / 2.0,
        level1_synth_hi=sg1 / 2.0,
        qshift_lo_even=h00a,
        qshift_hi_even=h01a,
        qshift_lo_odd=h00b,
        qshift_hi_odd=h01b,
        phi=SCATTER_AVERAGING_5.copy(),
    )


_DEFAULT_SET = build_filter_set()


def default_filter_set() -> WaveletFilterSet:
    return _DEFAULT_SET


# Per-band scale factors making the transform approximately energy
# preserving: a scaled band's expected share of a white-noise input's
# energy equals its spectral occupancy (half of 4^-level per band, 4^-J
# for the lowpass), so band plus lowpass energies sum to about the input
# energy. Raw white-noise gains were measured by tools/calibrate_gains.py
# and are frozen here as the resulting scale factors, indexed by level
# (1-based) then orientation slot.
BAND_GAINS: dict[int, np.ndarray] = {
    1: np.array([0.500247, 0.248972, 0.499963, 0.499985, 0.248572, 0.500048]),
    2: np.array([1.000572, 1.020085, 1.000748, 0.997964, 1.025273, 1.001190]),
    3: np.array([0.989339, 0.996864, 0.984684, 0.979110, 0.995576, 0.986190]),
    4: np.array([0.967711, 0.997618, 0.967815, 0.973145, 1.003139, 0.979818]),
}

LOWPASS_GAINS: dict[int, float] = {
    1: 1.001364,
    2: 0.983698,
    3: 0.969504,
    4: 0.936663,
}


def band_gain(level: int) -> np.ndarray:
    """Six per-orientation scale factors for bands at `level` (1-based)."""
    if not BAND_GAINS:
        return np.ones(6)
    key = min(level, max(BAND_GAINS))
    return BAND_GAINS[key]


def lowpass_gain(levels: int) -> float:
    """Scale factor for the final interleaved lowpass of a J-level pyramid."""
    if not LOWPASS_GAINS:
        return 1.0
    key = min(levels, max(LOWPASS_GAINS))
    return LOWPASS_GAINS[key]
