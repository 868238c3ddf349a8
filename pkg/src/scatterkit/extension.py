"""Symmetric-extension FIR filtering primitives.

Every filtering step in this package extends its input by half-sample
symmetric reflection: the signal is mirrored about the array edges with the
edge sample repeated (..., x1, x0 | x0, x1, ...). The reflection pattern is
periodic with period 2n, so the index map below stays valid for extensions
of any length, including extensions longer than the signal itself.

Two families of operations live here:

* same-rate filtering with odd symmetric kernels (level-1 wavelet filters,
  the averaging cascade, small spatial kernels), plus the decimating and
  adjoint forms used by the averaging cascade;
* the two-tree decimating/interpolating forms used by the quarter-shift
  levels of the dual-tree transform, where even and odd samples along an
  axis belong to different filter trees.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def reflect_indices(start: int, stop: int, n: int) -> np.ndarray:
    """Map global positions [start, stop) onto source indices in [0, n).

    Half-sample reflection: position -1 maps to 0, -2 to 1, n to n-1,
    n+1 to n-2, and so on, repeating with period 2n.
    """
    if n <= 0:
        raise ValueError("cannot reflect into an empty axis")
    pos = np.arange(start, stop)
    m = np.mod(pos, 2 * n)
    return np.where(m < n, m, 2 * n - 1 - m)


def pad_axis(a: np.ndarray, pre: int, post: int, axis: int) -> np.ndarray:
    """Extend `a` along `axis` by half-sample symmetric reflection."""
    n = a.shape[axis]
    idx = reflect_indices(-pre, n + post, n)
    return np.take(a, idx, axis=axis)


def _correlate_valid(ext: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    # Convolution semantics (kernel reversed), valid region only.
    win = sliding_window_view(ext, len(kernel), axis=axis)
    return win @ kernel[::-1]


def filter_same(a: np.ndarray, kernel: np.ndarray, axis: int = -1) -> np.ndarray:
    """Filter along `axis` with an odd-length kernel, output same length.

    The kernel is treated as centered: output sample i lines up with input
    sample i. Extension is half-sample symmetric.
    """
    m = len(kernel)
    pre = (m - 1) // 2
    ext = pad_axis(a, pre, m - 1 - pre, axis)
    return _correlate_valid(ext, kernel, axis)


def filter2_same(a: np.ndarray, kernel2d: np.ndarray) -> np.ndarray:
    """Spatial correlation of the two leading axes with a small 2-D kernel.

    Output sample (r, c) is sum_{u,v} a[r+u-cr, c+v-cc] * kernel2d[u, v],
    i.e. correlation with the kernel centered on each site, with symmetric
    extension at the borders. Trailing axes are carried along unchanged.
    """
    kh, kw = kernel2d.shape
    cr, cw = (kh - 1) // 2, (kw - 1) // 2
    ext = pad_axis(a, cr, kh - 1 - cr, 0)
    ext = pad_axis(ext, cw, kw - 1 - cw, 1)
    win = sliding_window_view(ext, (kh, kw), axis=(0, 1))
    # window axes arrive last: (..., kh, kw)
    return np.einsum("rc...uv,uv->rc...", win, kernel2d)


def filter2_same_adjoint(y: np.ndarray, kernel2d: np.ndarray) -> np.ndarray:
    """Exact adjoint of filter2_same over the real inner product.

    Boundary reflection weights are folded back onto their source samples,
    so <filter2_same(a), y> == <a, filter2_same_adjoint(y)> holds to
    rounding error for any shapes.
    """
    kh, kw = kernel2d.shape
    cr, cw = (kh - 1) // 2, (kw - 1) // 2
    h, w = y.shape[0], y.shape[1]
    rows = reflect_indices(-cr, h + (kh - 1 - cr), h)
    cols = reflect_indices(-cw, w + (kw - 1 - cw), w)
    out = np.zeros(y.shape, dtype=np.result_type(y, kernel2d))
    for u in range(kh):
        for v in range(kw):
            block = y * kernel2d[u, v]
            np.add.at(out, np.ix_(rows[u : u + h], cols[v : v + w]), block)
    return out


def lowpass_decimate(a: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    """One averaging stage along `axis`: extend, filter, keep even samples."""
    y = filter_same(a, kernel, axis)
    sl = [slice(None)] * y.ndim
    sl[axis] = slice(0, None, 2)
    return y[tuple(sl)]


def lowpass_decimate_adjoint(
    y: np.ndarray, kernel: np.ndarray, axis: int, n_out: int
) -> np.ndarray:
    """Exact adjoint of lowpass_decimate along `axis`.

    `n_out` is the length of the original (pre-decimation) axis. Equivalent
    to zero-insertion upsampling followed by correlation with the mirrored
    kernel, with the boundary reflection weights folded back exactly.
    """
    m = len(kernel)
    pre = (m - 1) // 2
    n_half = y.shape[axis]
    if n_half != (n_out + 1) // 2:
        raise ValueError(
            f"adjoint length mismatch: axis has {n_half}, expected {(n_out + 1) // 2}"
        )
    # forward: out[i] = sum_j kernel[m-1-j] * a[reflect(2i - pre + j)]
    i = np.arange(n_half)[:, None]
    j = np.arange(m)[None, :]
    src = reflect_indices(0, 2 * n_out, n_out)[
        np.mod(2 * i - pre + j, 2 * n_out)
    ]  # (n_half, m)
    moved = np.moveaxis(np.asarray(y), axis, -1)
    lead = moved.shape[:-1]
    flat = moved.reshape(-1, n_half)
    out = np.zeros((flat.shape[0], n_out), dtype=np.result_type(y, kernel))
    contrib = flat[:, :, None] * kernel[::-1][None, None, :]
    rows = np.arange(flat.shape[0])[:, None, None]
    np.add.at(out, (rows, src[None, :, :]), contrib)
    return np.moveaxis(out.reshape(*lead, n_out), -1, axis)


def filter_downsample_trees(
    a: np.ndarray, f_even: np.ndarray, f_odd: np.ndarray, axis: int
) -> np.ndarray:
    """One quarter-shift analysis stage along `axis`.

    The axis interleaves two filter trees: even positions belong to one
    tree, odd positions to the other. Each tree is extended with the
    time-reversed samples of the opposite tree, which is exactly what
    half-sample reflection in the interleaved index domain produces, so a
    single symmetric extension of the interleaved array serves both trees.
    Each tree is filtered (f_even on the even-position tree), decimated by
    two, and the results re-interleaved. Axis length halves.
    """
    n = a.shape[axis]
    if n % 4 != 0:
        raise ValueError(f"axis length {n} not divisible by 4")
    m = len(f_even)
    pre_t = (m - 1) // 2
    post_t = m - pre_t - 1
    ext = pad_axis(a, 2 * pre_t, 2 * post_t, axis)

    sl_even = [slice(None)] * a.ndim
    sl_even[axis] = slice(0, None, 2)
    sl_odd = [slice(None)] * a.ndim
    sl_odd[axis] = slice(1, None, 2)
    tree_e = ext[tuple(sl_even)]
    tree_o = ext[tuple(sl_odd)]

    dec = [slice(None)] * a.ndim
    dec[axis] = slice(0, None, 2)
    y_e = _correlate_valid(tree_e, f_even, axis)[tuple(dec)]
    y_o = _correlate_valid(tree_o, f_odd, axis)[tuple(dec)]

    shape = list(a.shape)
    shape[axis] = n // 2
    out = np.empty(shape, dtype=y_e.dtype)
    out[tuple(sl_even)] = y_e
    out[tuple(sl_odd)] = y_o
    return out


def upsample_filter_trees(
    a: np.ndarray, f_even: np.ndarray, f_odd: np.ndarray, axis: int
) -> np.ndarray:
    """One quarter-shift synthesis stage along `axis`; axis length doubles.

    Inverse counterpart of filter_downsample_trees: each tree's samples are
    symmetrically extended (again via one interleaved-domain reflection),
    spread onto the odd slots of a zero array, and filtered full length.
    The caller passes the synthesis filter for each tree; summing the
    low and high subband results of this stage reconstructs the parent.
    """
    n = a.shape[axis]
    if n % 2 != 0:
        raise ValueError(f"axis length {n} must be even")
    m = len(f_even)
    pre_t = (m - 1) // 2  # per-tree extension lengths after upsampling
    post_t = m - pre_t - 1
    pre_s = (pre_t + 1) // 2  # samples actually prepended per tree
    post_s = post_t // 2
    ext = pad_axis(a, 2 * pre_s, 2 * post_s, axis)

    sl_even = [slice(None)] * a.ndim
    sl_even[axis] = slice(0, None, 2)
    sl_odd = [slice(None)] * a.ndim
    sl_odd[axis] = slice(1, None, 2)
    tree_e = ext[tuple(sl_even)]
    tree_o = ext[tuple(sl_odd)]

    k = n // 2  # samples per tree before upsampling
    up_len = 2 * k + pre_t + post_t
    first = (pre_t + 1) % 2  # parity of the first occupied slot

    def one_tree(tree: np.ndarray, f: np.ndarray) -> np.ndarray:
        shape = list(tree.shape)
        shape[axis] = up_len
        up = np.zeros(shape, dtype=tree.dtype)
        put = [slice(None)] * tree.ndim
        put[axis] = slice(first, first + 2 * tree.shape[axis] - 1, 2)
        up[tuple(put)] = tree
        return _correlate_valid(up, f, axis)

    y_e = one_tree(tree_e, f_even)
    y_o = one_tree(tree_o, f_odd)

    shape = list(a.shape)
    shape[axis] = 2 * n
    out = np.empty(shape, dtype=y_e.dtype)
    out[tuple(sl_even)] = y_e
    out[tuple(sl_odd)] = y_o
    return out
