"""Back-projection from scattering coefficients to pixel space.

Each averaging cascade is undone by its exact adjoint (zero-insertion
upsampling against the mirrored kernel, boundary weights folded back), the
discarded phases are multiplied back onto the recovered moduli, and the
wavelet synthesis banks carry the result the rest of the way. Chaining the
order-2 path into the order-1 path and summing with the order-0 path gives
a linear map from the coefficient tensor to an image, for fixed phases.

Recovery is approximate by construction: averaging loses everything the
adjoint cannot restore. What the map does preserve is location and
orientation, which is why masking all but one coefficient paints the
pattern that drove that coefficient, where it occurred.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dtcwt
from .errors import (
    ConsistencyError,
    DimensionError,
    ParameterError,
    ValidationError,
)
from .extension import lowpass_decimate_adjoint
from .filters import default_filter_set
from .scattering import LUMA_WEIGHTS, PhaseStore, ScatterConfig, ScatterOutput

MASK_MODES = ("single-value", "full-channel", "full-tensor")


@dataclass(frozen=True)
class CoefficientMask:
    """Selects which coefficients survive before back-projection.

    full-tensor keeps everything; full-channel keeps one channel's whole
    spatial grid; single-value keeps one value at spatial_site of one
    channel. Unused selector fields may stay None.
    """

    mode: str = "full-tensor"
    channel: int | None = None
    spatial_site: tuple[int, int] | None = None

    def __post_init__(self):
        if self.mode not in MASK_MODES:
            raise ParameterError(f"unknown mask mode {self.mode!r}")
        if self.mode != "full-tensor" and self.channel is None:
            raise ParameterError(f"mask mode {self.mode!r} needs a channel index")
        if self.mode == "single-value" and self.spatial_site is None:
            raise ParameterError("single-value mask needs a spatial_site")

    def apply(self, tensor: np.ndarray) -> np.ndarray:
        """Return a masked copy of a (H, W, C) coefficient tensor."""
        if self.mode == "full-tensor":
            return np.array(tensor)
        if not 0 <= self.channel < tensor.shape[2]:
            raise ParameterError(
                f"channel {self.channel} outside tensor with {tensor.shape[2]} channels"
            )
        out = np.zeros_like(tensor)
        if self.mode == "full-channel":
            out[:, :, self.channel] = tensor[:, :, self.channel]
            return out
        r, c = self.spatial_site
        if not (0 <= r < tensor.shape[0] and 0 <= c < tensor.shape[1]):
            raise ParameterError(
                f"spatial_site {self.spatial_site} outside grid "
                f"{tensor.shape[0]}x{tensor.shape[1]}"
            )
        out[r, c, self.channel] = tensor[r, c, self.channel]
        return out


def invert_lowpass(s: np.ndarray, target_shape: tuple[int, int]) -> np.ndarray:
    """Adjoint of the averaging cascade, stage by stage, up to target_shape.

    The target must be the source grid scaled by one power of two on both
    axes. Satisfies the inner-product identity with `lowpass_project`
    exactly, which is what makes masked back-projections energy-faithful.
    """
    x = np.asarray(s, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"expected a 2-D array, got shape {x.shape}")
    h, w = x.shape
    th, tw = int(target_shape[0]), int(target_shape[1])
    if th % h or tw % w:
        raise DimensionError(
            f"target {target_shape} is not a multiple of source {x.shape}"
        )
    ratio = th // h
    if tw // w != ratio or ratio & (ratio - 1):
        raise DimensionError(
            f"target {target_shape} must scale source {x.shape} by one "
            f"power of two on both axes"
        )
    phi = default_filter_set().phi
    out = x
    while h < th:
        out = lowpass_decimate_adjoint(out, phi, axis=1, n_out=2 * w)
        out = lowpass_decimate_adjoint(out, phi, axis=0, n_out=2 * h)
        h, w = 2 * h, 2 * w
    return out


def invert_modulus(u_hat: np.ndarray, phases: np.ndarray) -> np.ndarray:
    """Reattach saved unit phases to a recovered modulus."""
    u = np.asarray(u_hat)
    p = np.asarray(phases)
    if u.shape != p.shape:
        raise DimensionError(
            f"modulus shape {u.shape} does not match phase shape {p.shape}"
        )
    drift = np.abs(np.abs(p) - 1.0).max() if p.size else 0.0
    if drift > 1e-6:
        raise ValidationError(f"phases deviate from unit modulus by {drift:.3e}")
    return u * p


def descatter(
    s: ScatterOutput,
    phases: PhaseStore,
    mask: CoefficientMask,
    config: ScatterConfig,
) -> np.ndarray:
    """Back-project (masked) scattering coefficients to an image.

    Returns an (H, W, planes) array cropped by the forward pass's pad
    record. Channels that the mask zeroed are skipped outright, so sparse
    masks cost far less than the full tensor.
    """
    tensor = np.asarray(s.tensor, dtype=np.float64)
    if tensor.ndim != 3:
        raise DimensionError(f"expected an (H, W, C) tensor, got {tensor.shape}")
    if len(s.channel_map) != tensor.shape[2]:
        raise ConsistencyError(
            f"channel_map lists {len(s.channel_map)} channels, tensor has "
            f"{tensor.shape[2]}"
        )
    masked = mask.apply(tensor)
    j_max = config.levels
    pad_h, pad_w = tensor.shape[0] << j_max, tensor.shape[1] << j_max

    order0: dict[int, int] = {}
    order1: dict[tuple, dict[tuple, int]] = {}
    order2: dict[tuple, dict[tuple, int]] = {}
    per_plane = config.color_mode == "per-channel"
    for idx, (order, detail) in enumerate(s.channel_map):
        if order == 0:
            order0[detail] = idx
        elif order == 1:
            prefix = (detail[0],) if per_plane else ()
            order1.setdefault(prefix, {})[detail[-2:]] = idx
        elif order == 2:
            prefix = (detail[0],) if per_plane else ()
            order2.setdefault(prefix, {})[detail[-4:]] = idx
        else:
            raise ConsistencyError(f"channel {idx} has unknown order {order}")

    planes = [np.zeros((pad_h, pad_w)) for _ in range(len(order0))]
    for p, idx in order0.items():
        if masked[:, :, idx].any():
            planes[p] = invert_lowpass(masked[:, :, idx], (pad_h, pad_w))

    for prefix in sorted(set(order1) | set(order2)):
        img = _invert_working_plane(
            masked, phases, config, (pad_h, pad_w),
            order1.get(prefix, {}), order2.get(prefix, {}), prefix,
        )
        if img is None:
            continue
        if per_plane:
            planes[prefix[0]] = planes[prefix[0]] + img
        elif len(planes) == 3:
            for c in range(3):
                planes[c] = planes[c] + LUMA_WEIGHTS[c] * img
        else:
            planes[0] = planes[0] + img

    out = np.stack([dtcwt.unpad(pl, s.crop) for pl in planes], axis=-1)
    if config.input_size is not None and tuple(out.shape[:2]) != config.input_size:
        raise ConsistencyError(
            f"reconstruction shape {out.shape[:2]} does not match configured "
            f"input_size {config.input_size}"
        )
    return out


def _phase_plane(store: dict, key, theta: int, want_shape) -> np.ndarray:
    try:
        plane = store[key][theta]
    except KeyError:
        raise ConsistencyError(
            f"phase store has no entry for scale key {key!r}, orientation {theta}"
        ) from None
    if plane.shape != want_shape:
        raise ConsistencyError(
            f"phase plane for {key!r}/{theta} has shape {plane.shape}, "
            f"expected {want_shape}"
        )
    return plane


def _invert_working_plane(
    masked: np.ndarray,
    phases: PhaseStore,
    config: ScatterConfig,
    padded_shape: tuple[int, int],
    s1_idx: dict[tuple, int],
    s2_idx: dict[tuple, int],
    prefix: tuple,
) -> np.ndarray | None:
    """Rebuild one working plane from its order-1/2 channels, or None if
    every contributing channel was masked away."""
    j_max = config.levels
    pad_h, pad_w = padded_shape
    pyramid = dtcwt.ComplexPyramid.zeros(padded_shape, j_max)
    touched = False

    for j1 in range(1, j_max + 1):
        h1, w1 = pad_h >> j1, pad_w >> j1
        for t1 in range(6):
            idx = s1_idx.get((j1, t1))
            if idx is None:
                raise ConsistencyError(
                    f"channel map is missing the order-1 entry ({j1}, {t1})"
                )
            chan = masked[:, :, idx]
            u1 = invert_lowpass(chan, (h1, w1)) if chan.any() else None

            if config.max_order >= 2 and j1 < j_max:
                w2_part = _second_order_contribution(
                    masked, phases, config, (h1, w1), s2_idx, prefix, j1, t1
                )
                if w2_part is not None:
                    u1 = w2_part if u1 is None else u1 + w2_part

            if u1 is None:
                continue
            phase = _phase_plane(
                phases.order1, prefix + (j1,) if prefix else j1, t1, (h1, w1)
            )
            pyramid.bands[j1 - 1][:, :, t1] = invert_modulus(u1, phase)
            touched = True

    return dtcwt.inverse(pyramid) if touched else None


def _second_order_contribution(
    masked, phases, config, u1_shape, s2_idx, prefix, j1, t1
):
    j_max = config.levels
    h1, w1 = u1_shape
    pyr2 = None
    for j2 in range(j1 + 1, j_max + 1):
        h2, w2 = h1 >> (j2 - j1), w1 >> (j2 - j1)
        for t2 in range(6):
            idx = s2_idx.get((j1, t1, j2, t2))
            if idx is None:
                raise ConsistencyError(
                    f"channel map is missing the order-2 entry "
                    f"({j1}, {t1}, {j2}, {t2})"
                )
            chan = masked[:, :, idx]
            if not chan.any():
                continue
            u2 = invert_lowpass(chan, (h2, w2))
            key = prefix + (j1, t1)
            try:
                sub = phases.order2[key]
            except KeyError:
                raise ConsistencyError(
                    f"phase store has no order-2 entry for path {key}"
                ) from None
            phase = _phase_plane(sub, j2, t2, (h2, w2))
            if pyr2 is None:
                pyr2 = dtcwt.ComplexPyramid.zeros(u1_shape, j_max - j1)
            pyr2.bands[j2 - j1 - 1][:, :, t2] = u2 * phase
    return dtcwt.inverse(pyr2) if pyr2 is not None else None
