"""Shared helpers for the test suite."""

import numpy as np
import pytest


class ListCorpus:
    """In-memory corpus over a list of (image_id, array) pairs.

    Duck-types the corpus protocol the retrieval pipeline expects:
    iteration yields ids in ingestion order, load returns the pixels.
    """

    def __init__(self, items):
        self._items = list(items)
        self._by_id = dict(self._items)

    def __iter__(self):
        return iter(image_id for image_id, _ in self._items)

    def __len__(self):
        return len(self._items)

    def load(self, image_id):
        return self._by_id[image_id]


def smooth_image(rng, shape, passes=3):
    """Random non-negative image dominated by low frequencies.

    Repeated 5-tap binomial blur along both axes (circular), shifted and
    scaled into [0, 1].
    """
    kernel = np.array([1.0, 4.0, 6.0, 4.0, 1.0]) / 16.0
    x = rng.standard_normal(shape)
    for _ in range(passes):
        for axis in range(2):
            pad = [(0, 0)] * x.ndim
            pad[axis] = (2, 2)
            padded = np.pad(x, pad, mode="wrap")
            x = np.apply_along_axis(
                lambda row: np.convolve(row, kernel, mode="valid"), axis, padded
            )
    x = x - x.min()
    peak = x.max()
    if peak > 0:
        x = x / peak
    return x


def powerlaw_image(rng, shape, alpha=1.0):
    """Random field with a 1/f amplitude spectrum, values in [0, 1].

    Energy falls off smoothly but every octave keeps a real share, the
    spectral profile typical of natural images. Synthesized by FFT, so
    the field is periodic and circular shifts introduce no seam.
    """
    fy = np.fft.fftfreq(shape[0])[:, None]
    fx = np.fft.fftfreq(shape[1])[None, :]
    radius = np.hypot(fy, fx)
    radius[0, 0] = 1.0
    spectrum = (
        rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    ) * radius**-alpha
    spectrum[0, 0] = 0.0
    x = np.fft.ifft2(spectrum).real
    x = x - x.min()
    return x / x.max()


def grating(shape, fy, fx):
    """Real cosine grating at the given signed frequency, values in [0, 1]."""
    rows = np.arange(shape[0])[:, None]
    cols = np.arange(shape[1])[None, :]
    return 0.5 + 0.5 * np.cos(2.0 * np.pi * (fy * rows + fx * cols))


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
