"""Measure each oriented band's center frequency.

For every level and orientation slot, synthesize the band's impulse
response (real and imaginary settings combined into one complex field)
and locate the dominant signed frequency with an FFT.  The printed
table is frozen into the tests that build grating corpora matched to
the bands.

Run from the repository root:  python3 tools/measure_band_peaks.py
"""

import sys

sys.path.insert(0, "src")

import numpy as np

from scatterkit import dtcwt

SIZE = 256  # fine frequency grid so the peak is well resolved


def complex_wavelet(theta: int, level: int) -> np.ndarray:
    p = dtcwt.ComplexPyramid.zeros((SIZE, SIZE), level)
    centre = tuple(s // 2 for s in p.bands[level - 1].shape[:2])
    p.bands[level - 1][centre + (theta,)] = 1.0
    xr = dtcwt.inverse(p)
    p.bands[level - 1][centre + (theta,)] = 1.0j
    xi = dtcwt.inverse(p)
    return xr + 1j * xi


def main() -> None:
    freqs = np.fft.fftfreq(SIZE)
    print("BAND_PEAKS = {")
    for level in (1, 2, 3, 4):
        rows = []
        for theta in range(6):
            spectrum = np.abs(np.fft.fft2(complex_wavelet(theta, level)))
            iy, ix = np.unravel_index(np.argmax(spectrum), spectrum.shape)
            rows.append((float(freqs[iy]), float(freqs[ix])))
        cells = ", ".join(f"({fy:+.6f}, {fx:+.6f})" for fy, fx in rows)
        print(f"    {level}: [{cells}],")
    print("}")


if __name__ == "__main__":
    main()
