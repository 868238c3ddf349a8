"""Complex filtering across the orientation axis of a wavelet scale.

A scale's six oriented bands cover 180 degrees of wavevector angle; their
complex conjugates cover the other half. Stacking both gives a circular
12-sample orientation axis (30 degrees per step) on which small complex
filters act: a dot product across orientation, optionally combined with a
3x3 spatial window. The modulus of the filtered field responds to
conjunctions of orientations, which is how corner, cross, curve and ring
sensitivities arise from purely oriented bands.

Filters may be rolled along the orientation axis to rotate their preferred
pattern in 30-degree steps, and any filter's real/imaginary pixel-space
sensitivity pair can be rendered by back-projecting a one-hot filtered
field through the adjoint of the layer and the wavelet synthesis bank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dtcwt
from .errors import ParameterError, ScaleError, ValidationError
from .extension import filter2_same, filter2_same_adjoint
from .scattering import PropagatedSignal

ORIENTATIONS_FULL = 12  # six bands plus their conjugates


@dataclass(frozen=True)
class CrossOrientFilter:
    """A complex kernel of shape (h, w, 12) with h, w in {1, 3}.

    Slot k of the orientation axis means wavevector angle 15 + 30k
    degrees; slots 6..11 address the conjugate bands.
    """

    kernel: np.ndarray
    name: str = ""

    def __post_init__(self):
        k = np.asarray(self.kernel, dtype=complex)
        if k.ndim != 3 or k.shape[2] != ORIENTATIONS_FULL:
            raise ValidationError(
                f"filter kernel must have a 12-long orientation axis, "
                f"got shape {k.shape}"
            )
        if k.shape[0] not in (1, 3) or k.shape[1] not in (1, 3):
            raise ParameterError(
                f"spatial support must be 1x1 or 3x3, got "
                f"{k.shape[0]}x{k.shape[1]}"
            )
        k.setflags(write=False)
        object.__setattr__(self, "kernel", k)


@dataclass
class ExtendedBands:
    """One scale's bands on the full 12-sample orientation axis.

    bands12[theta] is the (H, W) complex band at angle 15 + 30*theta
    degrees; entries 6..11 are the conjugates of entries 0..5.
    """

    bands12: np.ndarray

    def check_conjugate_pairing(self, tol: float = 0.0) -> None:
        a = self.bands12[:6]
        b = np.conj(self.bands12[6:])
        if np.abs(a - b).max() > tol:
            raise ValidationError("conjugate-extension invariant violated")


def extend_orientations(pyramid_scale: np.ndarray) -> ExtendedBands:
    """Extend six oriented bands with their conjugates to cover 360 deg."""
    b = np.asarray(pyramid_scale, dtype=complex)
    if b.ndim != 3 or b.shape[2] != 6:
        raise ValidationError(
            f"expected an (H, W, 6) band array, got shape {b.shape}"
        )
    native = np.moveaxis(b, 2, 0)
    return ExtendedBands(np.concatenate([native, np.conj(native)], axis=0))


def apply_cross_filter(w: ExtendedBands, f: CrossOrientFilter) -> np.ndarray:
    """Filter the extended bands down to one complex field V.

    Spatially this is a same-size convolution with symmetric extension;
    across orientation it is a plain dot product (the filter value at slot
    theta multiplies band theta). Linear in both arguments.
    """
    stack = np.asarray(w.bands12)
    if stack.ndim != 3 or stack.shape[0] != ORIENTATIONS_FULL:
        raise ValidationError(
            f"expected 12 extended bands, got shape {stack.shape}"
        )
    kernel = f.kernel
    out = np.zeros(stack.shape[1:], dtype=complex)
    for theta in range(ORIENTATIONS_FULL):
        k_sp = kernel[:, :, theta]
        if not k_sp.any():
            continue
        out += filter2_same(stack[theta], k_sp[::-1, ::-1])
    return out


def adjoint_cross_filter(v: np.ndarray, f: CrossOrientFilter) -> ExtendedBands:
    """Exact adjoint of apply_cross_filter for a fixed filter.

    Spreads a filtered field back across the 12 orientations; the building
    block of filter-shape reconstruction.
    """
    field = np.asarray(v, dtype=complex)
    kernel = f.kernel
    out = np.zeros((ORIENTATIONS_FULL,) + field.shape, dtype=complex)
    for theta in range(ORIENTATIONS_FULL):
        k_sp = kernel[:, :, theta]
        if not k_sp.any():
            continue
        out[theta] = filter2_same_adjoint(field, np.conj(k_sp[::-1, ::-1]))
    return ExtendedBands(out)


def fold_orientations(w: ExtendedBands) -> np.ndarray:
    """Collapse 12 orientations back onto the 6 native bands (adjoint of
    extend_orientations): band theta collects its own entry plus the
    conjugate of entry theta+6. Returns an (H, W, 6) array."""
    stack = np.asarray(w.bands12)
    folded = stack[:6] + np.conj(stack[6:])
    return np.moveaxis(folded, 0, 2)


def modulus_v(
    v: np.ndarray, resolution: int = 0, path: tuple = ()
) -> PropagatedSignal:
    """Second modulus: the orientation-conjunction energy field."""
    return PropagatedSignal(
        values=np.abs(v), order=2, path=path, resolution=resolution
    )


def roll_filter(f: CrossOrientFilter, steps: int) -> CrossOrientFilter:
    """Rotate a filter's preferred pattern by steps x 30 degrees.

    Circular along the orientation axis; rolling by 12 is the identity.
    """
    return CrossOrientFilter(
        kernel=np.roll(f.kernel, steps, axis=-1), name=f.name
    )


def make_rototranslation_bank(count: int) -> list[CrossOrientFilter]:
    """Unit-norm orientation waves e^(j 2 pi k theta / 12), k = 0..count-1.

    k = 0 averages across orientation (the rotation-invariant filter);
    every k >= 1 wave has exactly zero mean, and distinct waves are
    orthogonal on the orientation axis.
    """
    if not 1 <= count <= 6:
        raise ParameterError(f"count must be between 1 and 6, got {count}")
    theta = np.arange(ORIENTATIONS_FULL)
    bank = []
    for k in range(count):
        wave = np.exp(2j * np.pi * k * theta / ORIENTATIONS_FULL)
        wave = wave / np.sqrt(ORIENTATIONS_FULL)
        bank.append(
            CrossOrientFilter(
                kernel=wave.reshape(1, 1, ORIENTATIONS_FULL),
                name=f"orientation-wave-{k}",
            )
        )
    return bank


def reconstruct_filter_shape(
    f: CrossOrientFilter,
    part: str,
    scale: int,
    image_size: int | tuple[int, int] = 128,
) -> np.ndarray:
    """Pixel-space pattern a filter is sensitive to, at one scale.

    Plants a one-hot purely real (part="real") or purely imaginary
    (part="imaginary") filtered value at the center of the scale's grid,
    back-projects it through the layer adjoint, folds the conjugate
    orientations onto the native six bands, and synthesizes with the
    wavelet bank. The real and imaginary shapes of one filter form a
    quadrature pair: distinct pixel patterns with the same |V|.
    """
    if part not in ("real", "imaginary"):
        raise ParameterError(f"part must be 'real' or 'imaginary', got {part!r}")
    if isinstance(image_size, int):
        image_size = (image_size, image_size)
    h, w = image_size
    if scale < 1:
        raise ScaleError(f"scale must be at least 1, got {scale}")
    if h % (1 << scale) or w % (1 << scale):
        raise ScaleError(
            f"image size {image_size} does not hold {scale} dyadic scales"
        )
    bh, bw = h >> scale, w >> scale
    v = np.zeros((bh, bw), dtype=complex)
    v[bh // 2, bw // 2] = 1.0 if part == "real" else 1.0j

    folded = fold_orientations(adjoint_cross_filter(v, f))
    pyramid = dtcwt.ComplexPyramid.zeros((h, w), scale)
    pyramid.bands[scale - 1][:] = folded
    return dtcwt.inverse(pyramid)


def filter_gallery() -> dict[str, CrossOrientFilter]:
    """Small named set of example filters.

    "corner" is the classic quarter-turn detector: four consecutive
    orientations with a 90-degree phase twist in the middle. The 3x3
    entries are illustrative conjunction patterns with 4 to 8 non-zero
    coefficients; their exact values are a design choice, not ground
    truth.
    """
    corner = np.zeros((1, 1, 12), dtype=complex)
    corner[0, 0, :4] = [1.0, 1.0j, 1.0j, 1.0]

    # Two bars meeting at the centre, each bar a run of one orientation.
    cross = np.zeros((3, 3, 12), dtype=complex)
    cross[1, 0, 3] = 1.0
    cross[1, 1, 3] = 1.0
    cross[1, 2, 3] = 1.0
    cross[0, 1, 0] = 1.0
    cross[1, 1, 0] = 1.0
    cross[2, 1, 0] = 1.0

    curve = np.zeros((3, 3, 12), dtype=complex)
    curve[2, 0, 1] = 1.0
    curve[1, 1, 2] = np.exp(0.25j * np.pi)
    curve[0, 2, 3] = 1.0j
    curve[2, 0, 7] = 0.5
    curve[1, 1, 8] = 0.5 * np.exp(-0.25j * np.pi)
    curve[0, 2, 9] = -0.5j

    # Eight sites around the centre, each looking for the locally tangent
    # edge, i.e. the orientation whose wave vector points at the centre.
    ring = np.zeros((3, 3, 12), dtype=complex)
    ring[0, 1, 3] = 1.0
    ring[0, 2, 4] = 1.0
    ring[1, 2, 5] = 1.0
    ring[2, 2, 1] = 1.0
    ring[2, 1, 2] = 1.0
    ring[2, 0, 4] = 1.0
    ring[1, 0, 0] = 1.0
    ring[0, 0, 1] = 1.0

    return {
        name: CrossOrientFilter(kernel=k, name=name)
        for name, k in (
            ("corner", corner),
            ("cross", cross),
            ("curve", curve),
            ("ring", ring),
        )
    }
