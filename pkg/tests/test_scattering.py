"""Unit tests for the scattering cascade."""

import numpy as np
import pytest

from scatterkit.errors import (
    DimensionError,
    ParameterError,
    ScaleError,
    UnsupportedOrderError,
    ValidationError,
)
from scatterkit.scattering import (
    LUMA_WEIGHTS,
    PropagatedSignal,
    ScatterConfig,
    channel_descriptors,
    lowpass_project,
    luminance_split,
    scatter,
)

from conftest import powerlaw_image


def test_config_validation():
    with pytest.raises(ParameterError):
        ScatterConfig(levels=0)
    with pytest.raises(ParameterError):
        ScatterConfig(max_order=0)
    with pytest.raises(UnsupportedOrderError):
        ScatterConfig(max_order=3)
    with pytest.raises(ParameterError):
        ScatterConfig(orientations=8)
    with pytest.raises(ParameterError):
        ScatterConfig(color_mode="grayscale")


def test_channel_count_formulas():
    assert ScatterConfig(levels=4, max_order=2).channel_count() == 243
    assert ScatterConfig(levels=4, max_order=1).channel_count() == 27
    assert ScatterConfig(levels=3, max_order=2).channel_count(planes=1) == 127
    per_channel = ScatterConfig(levels=2, max_order=2, color_mode="per-channel")
    # per plane: 1 + 12 order-1 + 36 order-2
    assert per_channel.channel_count() == 3 * 49


def test_cutoff_frequency_halves_per_level():
    assert ScatterConfig(levels=1).cutoff_frequency() == 0.25
    assert ScatterConfig(levels=4).cutoff_frequency() == 2.0**-5
    assert ScatterConfig(levels=2).cutoff_frequency(sample_rate=8.0) == 1.0


def test_constant_image_lands_entirely_in_order0():
    config = ScatterConfig(levels=3, max_order=2)
    image = np.full((32, 32, 3), 0.625)
    out, _ = scatter(image, config)
    orders = np.array([o for o, _ in out.channel_map])
    s0 = out.tensor[:, :, orders == 0]
    rest = out.tensor[:, :, orders != 0]
    # each averaging stage has unit DC gain, so order 0 is the constant itself
    assert np.abs(s0 - 0.625).max() < 1e-12
    # the published highpass taps sum to ~1e-6 rather than exactly zero, so
    # a constant leaks that much into the detail channels and no further
    assert np.abs(rest).max() < 1e-5


def test_tensor_is_non_negative_beyond_order0(rng):
    out, _ = scatter(powerlaw_image(rng, (32, 32)), ScatterConfig(levels=2))
    orders = np.array([o for o, _ in out.channel_map])
    assert out.tensor[:, :, orders >= 1].min() >= 0.0


def test_channel_map_matches_descriptors(rng):
    for color_mode in ("split-luminance", "per-channel"):
        for max_order in (1, 2):
            config = ScatterConfig(
                levels=3, max_order=max_order, color_mode=color_mode
            )
            image = rng.random((32, 32, 3))
            out, _ = scatter(image, config)
            assert out.channel_map == channel_descriptors(config, planes=3)
            gray = rng.random((32, 32))
            out1, _ = scatter(gray, config)
            assert out1.channel_map == channel_descriptors(config, planes=1)


def test_channel_order_is_lexicographic():
    table = channel_descriptors(ScatterConfig(levels=3, max_order=2), planes=1)
    assert table[0] == (0, 0)
    order1 = [d for o, d in table if o == 1]
    assert order1 == sorted(order1)
    assert order1[0] == (1, 0) and order1[-1] == (3, 5)
    order2 = [d for o, d in table if o == 2]
    assert order2 == sorted(order2)
    assert all(j2 > j1 for j1, _, j2, _ in order2)


def test_gray_input_equals_single_plane(rng):
    config = ScatterConfig(levels=2)
    gray = powerlaw_image(rng, (32, 32))
    out_2d, _ = scatter(gray, config)
    out_3d, _ = scatter(gray[:, :, None], config)
    assert np.array_equal(out_2d.tensor, out_3d.tensor)
    assert out_2d.tensor.shape[2] == config.channel_count(planes=1)


def test_split_luminance_higher_orders_use_luma(rng):
    config = ScatterConfig(levels=2, max_order=2)
    image = rng.random((32, 32, 3))
    _, luma = luminance_split(image)
    out_rgb, _ = scatter(image, config)
    out_luma, _ = scatter(luma, config)
    orders_rgb = np.array([o for o, _ in out_rgb.channel_map])
    orders_luma = np.array([o for o, _ in out_luma.channel_map])
    assert np.array_equal(
        out_rgb.tensor[:, :, orders_rgb >= 1],
        out_luma.tensor[:, :, orders_luma >= 1],
    )


def test_per_channel_mode_is_three_independent_cascades(rng):
    config = ScatterConfig(levels=2, max_order=2, color_mode="per-channel")
    image = rng.random((32, 32, 3))
    out, _ = scatter(image, config)
    block = config.channel_count() // 3
    for p in range(3):
        alone, _ = scatter(image[:, :, p], config)
        assert np.array_equal(
            out.tensor[:, :, p * block : (p + 1) * block], alone.tensor
        )


def test_luminance_split_weights():
    image = np.zeros((4, 4, 3))
    image[:, :, 1] = 1.0
    planes, luma = luminance_split(image)
    assert np.allclose(luma, LUMA_WEIGHTS[1])
    assert np.array_equal(planes[1], np.ones((4, 4)))
    assert abs(LUMA_WEIGHTS.sum() - 1.0) < 1e-12
    with pytest.raises(DimensionError):
        luminance_split(np.zeros((4, 4)))


def test_scatter_input_validation(rng):
    config = ScatterConfig(levels=2)
    with pytest.raises(DimensionError):
        scatter(rng.random((8, 8, 4)), config)
    with pytest.raises(ValidationError):
        scatter(np.full((8, 8), np.nan), config)
    sized = ScatterConfig(levels=2, input_size=(16, 16))
    with pytest.raises(ValidationError):
        scatter(rng.random((8, 8)), sized)
    scatter(rng.random((16, 16)), sized)  # matching size passes


def test_odd_sizes_are_padded_and_recorded(rng):
    config = ScatterConfig(levels=3, max_order=1)
    out, _ = scatter(rng.random((37, 50)), config)
    top, bottom, left, right = out.crop
    assert (37 + top + bottom) % 8 == 0
    assert (50 + left + right) % 8 == 0
    assert out.tensor.shape[:2] == ((37 + top + bottom) // 8, (50 + left + right) // 8)


def test_scatter_is_deterministic(rng):
    image = rng.random((32, 32, 3))
    config = ScatterConfig(levels=2)
    a, _ = scatter(image, config)
    b, _ = scatter(image, config)
    assert np.array_equal(a.tensor, b.tensor)


def test_phase_store_layout_and_unit_modulus(rng):
    config = ScatterConfig(levels=3, max_order=2)
    _, phases = scatter(powerlaw_image(rng, (32, 32)), config)
    assert sorted(phases.order1) == [1, 2, 3]
    for j1, bands in phases.order1.items():
        assert sorted(bands) == list(range(6))
        for plane in bands.values():
            assert plane.shape == (32 >> j1, 32 >> j1)
            assert np.abs(np.abs(plane) - 1.0).max() < 1e-12
    for (j1, _t1), deeper in phases.order2.items():
        assert all(j2 > j1 for j2 in deeper)
        for j2, bands in deeper.items():
            for plane in bands.values():
                assert plane.shape == (32 >> j2, 32 >> j2)
                assert np.abs(np.abs(plane) - 1.0).max() < 1e-12


def test_per_channel_phase_keys_carry_the_plane(rng):
    config = ScatterConfig(levels=2, max_order=2, color_mode="per-channel")
    _, phases = scatter(rng.random((16, 16, 3)), config)
    assert sorted(phases.order1) == [(p, j) for p in range(3) for j in (1, 2)]
    assert all(len(key) == 3 for key in phases.order2)


def test_order1_channel_is_pooled_band_modulus(rng):
    """The advertised pipeline, checked literally for one channel: wavelet
    band, modulus, averaging the rest of the way down."""
    from scatterkit import dtcwt
    from scatterkit.scattering import _average_pool

    config = ScatterConfig(levels=3, max_order=1)
    gray = powerlaw_image(rng, (32, 32))
    out, _ = scatter(gray, config)
    pyramid = dtcwt.forward(gray, 3)
    j1, theta = 2, 4
    expected = _average_pool(np.abs(pyramid.bands[j1 - 1][:, :, theta]), 3 - j1)
    ch = out.channel_map.index((1, (j1, theta)))
    assert np.abs(out.tensor[:, :, ch] - expected).max() < 1e-12


def test_lowpass_project_keeps_constants():
    sig = PropagatedSignal(
        values=np.full((32, 32), 3.25), order=1, path=(1, 0), resolution=0
    )
    proj = lowpass_project(sig, ScatterConfig(levels=3))
    assert proj.shape == (4, 4)
    assert np.abs(proj - 3.25).max() < 1e-12


def test_lowpass_project_rejects_too_deep_signals():
    sig = PropagatedSignal(
        values=np.ones((4, 4)), order=1, path=(1, 0), resolution=3
    )
    with pytest.raises(ScaleError):
        lowpass_project(sig, ScatterConfig(levels=2))


def test_propagated_signal_rejects_negatives():
    with pytest.raises(ValidationError):
        PropagatedSignal(
            values=np.array([[0.5, -0.1]]), order=1, path=(1, 0), resolution=0
        )
