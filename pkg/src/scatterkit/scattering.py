"""The scattering cascade: oriented wavelet moduli averaged to a coarse grid.

Order 0 is each retained color plane pushed through the full averaging
cascade. Order 1 takes the complex wavelet transform of the working plane,
drops each band's phase (keeping it in a side store), and averages the
modulus down to the output grid. Order 2 re-expands each order-1 modulus
with a shallower wavelet transform and repeats the trick, visiting only
strictly coarser second scales. Every channel therefore lands on the same
(H/2^levels, W/2^levels) grid and the channel axis concatenates
order 0, order 1, then order 2 in lexicographic index order.

The averaging filter has strictly positive taps, so channels of order 1
and 2 are non-negative everywhere. Discarded phases are unit-modulus by
construction (zero-modulus sites store 1+0j), which is what makes the
cascade invertible downstream.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import dtcwt
from .errors import (
    DimensionError,
    ParameterError,
    ScaleError,
    UnsupportedOrderError,
    ValidationError,
)
from .extension import lowpass_decimate
from .filters import default_filter_set

# ITU-R BT.601 luma weights.
LUMA_WEIGHTS = np.array([0.299, 0.587, 0.114])

COLOR_MODES = ("split-luminance", "per-channel")


@dataclass(frozen=True)
class ScatterConfig:
    """Hyper-parameters of the cascade.

    levels: output grid is 2^-levels of the input grid, and equivalently
        the invariance cutoff frequency is 2^-levels times half the
        sampling rate (see `cutoff_frequency`).
    max_order: deepest modulus stage, 1 or 2.
    orientations: bands per scale; the transform in this package has 6.
    color_mode: "split-luminance" keeps color only at order 0 and runs
        higher orders on the luma plane; "per-channel" runs the full
        cascade independently on every input plane.
    input_size: optional (H, W) of the unpadded input, used to validate
        inputs and to crop reconstructions back to source geometry.
    """

    levels: int = 4
    max_order: int = 2
    orientations: int = 6
    color_mode: str = "split-luminance"
    input_size: tuple[int, int] | None = None

    def __post_init__(self):
        if self.max_order > 2:
            raise UnsupportedOrderError(
                f"max_order {self.max_order} not supported, the cascade stops at 2"
            )
        if self.max_order < 1:
            raise ParameterError(f"max_order must be 1 or 2, got {self.max_order}")
        if self.levels < 1:
            raise ParameterError(f"levels must be at least 1, got {self.levels}")
        if self.orientations != 6:
            raise ParameterError(
                f"this transform produces 6 orientations, got {self.orientations}"
            )
        if self.color_mode not in COLOR_MODES:
            raise ParameterError(f"unknown color_mode {self.color_mode!r}")
        if self.input_size is not None:
            h, w = self.input_size
            object.__setattr__(self, "input_size", (int(h), int(w)))

    def cutoff_frequency(self, sample_rate: float = 1.0) -> float:
        """Frequencies above 2^-levels * sample_rate / 2 are discarded by
        the averaging; everything below survives in some channel."""
        return 2.0 ** (-self.levels) * sample_rate / 2.0

    def channels_per_plane(self) -> int:
        """Order-1 plus order-2 channel count for one working plane."""
        j, l = self.levels, self.orientations
        n = l * j
        if self.max_order >= 2:
            n += l * l * j * (j - 1) // 2
        return n

    def channel_count(self, planes: int = 3) -> int:
        if self.color_mode == "per-channel":
            return planes * (1 + self.channels_per_plane())
        return planes + self.channels_per_plane()


@dataclass
class ScatterOutput:
    """Stacked scattering channels plus the bookkeeping to read them.

    tensor: (H/2^levels, W/2^levels, C) real array.
    channel_map: per channel, a pair (order, detail) where detail is the
        plane index for order 0, (j1, theta1) for order 1 and
        (j1, theta1, j2, theta2) for order 2; in per-channel color mode
        the plane index is prepended to the order-1/2 tuples.
    crop: (top, bottom, left, right) padding applied before the cascade,
        needed to crop reconstructions back to the source geometry.
    """

    tensor: np.ndarray
    channel_map: list[tuple]
    crop: tuple[int, int, int, int] = (0, 0, 0, 0)


@dataclass
class PhaseStore:
    """Unit-modulus phases discarded by the modulus stages.

    order1[j1][theta1] is the phase plane of the order-1 band at scale j1,
    at resolution 2^-j1. order2[(j1, theta1)][j2][theta2] is the phase of
    the second-stage band at absolute scale j2 (resolution 2^-j2). In
    per-channel color mode the leading key gains the plane index:
    order1[(plane, j1)] and order2[(plane, j1, theta1)].
    """

    order1: dict = field(default_factory=dict)
    order2: dict = field(default_factory=dict)


@dataclass
class PropagatedSignal:
    """A non-negative modulus plane on its natural dyadic grid.

    resolution is the decimation exponent: the values sit on the 2^-r
    grid of the source image. path records the scale/orientation indices
    that produced the plane, e.g. (j1, theta1) at order 1.
    """

    values: np.ndarray
    order: int
    path: tuple
    resolution: int

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.size and float(v.min()) < 0.0:
            raise ValidationError("propagated signal has negative entries")


def luminance_split(image: np.ndarray) -> tuple[tuple[np.ndarray, ...], np.ndarray]:
    """Split an H x W x 3 array into its color planes and a luma plane."""
    x = np.asarray(image, dtype=np.float64)
    if x.ndim != 3 or x.shape[2] != 3:
        raise DimensionError(f"expected an H x W x 3 array, got shape {x.shape}")
    planes = tuple(x[:, :, c] for c in range(3))
    return planes, x @ LUMA_WEIGHTS


def lowpass_project(u: PropagatedSignal, config: ScatterConfig) -> np.ndarray:
    """Average a propagated signal the rest of the way down to the output
    grid: one decimating smoothing stage per remaining scale, each with
    unit DC gain, so constants pass through unchanged."""
    if u.resolution > config.levels:
        raise ScaleError(
            f"signal at resolution 2^-{u.resolution} is below the "
            f"2^-{config.levels} output grid"
        )
    return _average_pool(
        np.asarray(u.values, dtype=np.float64),
        config.levels - u.resolution,
    )


def channel_descriptors(config: ScatterConfig, planes: int = 3) -> list[tuple]:
    """Channel map the cascade would produce, without running it.

    Same entries, same order as ScatterOutput.channel_map for an image
    with the given number of colour planes.
    """
    if planes not in (1, 3):
        raise ParameterError(f"planes must be 1 or 3, got {planes}")
    j_max = config.levels

    def details(prefix: tuple) -> list[tuple]:
        out = []
        for j1 in range(1, j_max + 1):
            for t1 in range(6):
                out.append((1, prefix + (j1, t1)))
        if config.max_order >= 2:
            for j1 in range(1, j_max):
                for t1 in range(6):
                    for j2 in range(j1 + 1, j_max + 1):
                        for t2 in range(6):
                            out.append((2, prefix + (j1, t1, j2, t2)))
        return out

    table: list[tuple] = []
    if config.color_mode == "per-channel":
        for p in range(planes):
            table.append((0, p))
            table.extend(details((p,)))
    else:
        for p in range(planes):
            table.append((0, p))
        table.extend(details(()))
    return table


def scatter(image: np.ndarray, config: ScatterConfig) -> tuple[ScatterOutput, PhaseStore]:
    """Run the cascade on an H x W x {1,3} (or plain H x W) image."""
    x = np.asarray(image, dtype=np.float64)
    if x.ndim == 2:
        x = x[:, :, None]
    if x.ndim != 3 or x.shape[2] not in (1, 3):
        raise DimensionError(
            f"expected an H x W x 1 or H x W x 3 image, got shape {x.shape}"
        )
    if not np.isfinite(x).all():
        raise ValidationError("image contains NaN or Inf")
    if config.input_size is not None and tuple(x.shape[:2]) != config.input_size:
        raise ValidationError(
            f"image shape {x.shape[:2]} does not match configured "
            f"input_size {config.input_size}"
        )

    padded, crop = dtcwt.pad_to_multiple(x, config.levels)
    n_planes = padded.shape[2]

    channels: list[np.ndarray] = []
    channel_map: list[tuple] = []
    phases = PhaseStore()

    if config.color_mode == "per-channel":
        for p in range(n_planes):
            plane = padded[:, :, p]
            channels.append(_average_pool(plane, config.levels))
            channel_map.append((0, p))
            s1, s2, ph1, ph2 = _plane_cascade(plane, config)
            for detail, arr in s1:
                channels.append(arr)
                channel_map.append((1, (p,) + detail))
            for detail, arr in s2:
                channels.append(arr)
                channel_map.append((2, (p,) + detail))
            for j1, by_theta in ph1.items():
                phases.order1[(p, j1)] = by_theta
            for key, sub in ph2.items():
                phases.order2[(p,) + key] = sub
    else:
        if n_planes == 3:
            planes, luma = luminance_split(padded)
        else:
            planes, luma = (padded[:, :, 0],), padded[:, :, 0]
        for p, plane in enumerate(planes):
            channels.append(_average_pool(plane, config.levels))
            channel_map.append((0, p))
        s1, s2, ph1, ph2 = _plane_cascade(luma, config)
        for detail, arr in s1:
            channels.append(arr)
            channel_map.append((1, detail))
        for detail, arr in s2:
            channels.append(arr)
            channel_map.append((2, detail))
        phases.order1.update(ph1)
        phases.order2.update(ph2)

    out = ScatterOutput(
        tensor=np.stack(channels, axis=-1),
        channel_map=channel_map,
        crop=crop,
    )
    return out, phases


def _average_pool(values: np.ndarray, stages: int) -> np.ndarray:
    phi = default_filter_set().phi
    out = values
    for _ in range(stages):
        out = lowpass_decimate(out, phi, axis=0)
        out = lowpass_decimate(out, phi, axis=1)
    return out


def _unit_phases(w: np.ndarray, u: np.ndarray) -> np.ndarray:
    out = np.ones_like(w)
    np.divide(w, u, out=out, where=u > 0)
    return out


def _plane_cascade(plane: np.ndarray, config: ScatterConfig):
    """Orders 1 and 2 for one working plane.

    Returns (s1, s2, phases1, phases2) where s1/s2 are lists of
    (detail tuple, output-grid array) in lexicographic detail order.
    """
    j_max = config.levels
    pyr1 = dtcwt.forward(plane, j_max)

    s1: list[tuple[tuple, np.ndarray]] = []
    s2: list[tuple[tuple, np.ndarray]] = []
    phases1: dict = {}
    phases2: dict = {}

    for j1 in range(1, j_max + 1):
        w1 = pyr1.bands[j1 - 1]
        u1 = np.abs(w1)
        phases1[j1] = {
            t1: _unit_phases(w1[:, :, t1], u1[:, :, t1]) for t1 in range(6)
        }
        for t1 in range(6):
            s1.append(((j1, t1), _average_pool(u1[:, :, t1], j_max - j1)))
            if config.max_order >= 2 and j1 < j_max:
                pyr2 = dtcwt.forward(u1[:, :, t1], j_max - j1)
                sub_phases: dict = {}
                for r in range(1, j_max - j1 + 1):
                    j2 = j1 + r
                    w2 = pyr2.bands[r - 1]
                    u2 = np.abs(w2)
                    sub_phases[j2] = {
                        t2: _unit_phases(w2[:, :, t2], u2[:, :, t2])
                        for t2 in range(6)
                    }
                    for t2 in range(6):
                        s2.append(
                            ((j1, t1, j2, t2), _average_pool(u2[:, :, t2], j_max - j2))
                        )
                phases2[(j1, t1)] = sub_phases
    return s1, s2, phases1, phases2
