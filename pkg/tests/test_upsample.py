import numpy as np
import pytest

from chromasub import (
    BlockContext,
    ImagePlane,
    NeighborChroma,
    UpsampleMethod,
    block_estimates,
    build_model,
    upsample,
)
from chromasub.patterns import pattern_for
from chromasub.upsample import _CUBIC_PHASES


def test_output_doubles_both_axes(rng):
    plane = ImagePlane(rng.uniform(0, 255, size=(3, 5)))
    for method in UpsampleMethod:
        out = upsample(method, plane)
        assert (out.height, out.width) == (6, 10)


def test_method_accepts_string():
    out = upsample("COPY", ImagePlane.full(2, 2, 9.0))
    assert np.all(out.data == 9.0)


def test_copy_repeats_sites():
    plane = ImagePlane([[1.0, 2.0], [3.0, 4.0]])
    out = upsample(UpsampleMethod.COPY, plane)
    np.testing.assert_array_equal(
        out.data,
        [
            [1, 1, 2, 2],
            [1, 1, 2, 2],
            [3, 3, 4, 4],
            [3, 3, 4, 4],
        ],
    )


class TestBilinear:
    def test_constant_integer_plane_exact(self):
        out = upsample(UpsampleMethod.BILI, ImagePlane.full(4, 3, 201.0))
        assert np.all(out.data == 201.0)

    def test_interior_weights(self, rng):
        s = rng.uniform(0, 255, size=(4, 4))
        out = upsample(UpsampleMethod.BILI, ImagePlane(s)).data
        # pixel (2*1, 2*1) is the top-left quadrant of site (1, 1): its
        # vertical neighbor is site row 0 and horizontal neighbor column 0
        expected = (
            9.0 / 16.0 * s[1, 1]
            + 3.0 / 16.0 * s[0, 1]
            + 3.0 / 16.0 * s[1, 0]
            + 1.0 / 16.0 * s[0, 0]
        )
        assert out[2, 2] == pytest.approx(expected, rel=1e-15)
        # bottom-right quadrant leans on sites below and to the right
        expected = (
            9.0 / 16.0 * s[1, 1]
            + 3.0 / 16.0 * s[2, 1]
            + 3.0 / 16.0 * s[1, 2]
            + 1.0 / 16.0 * s[2, 2]
        )
        assert out[3, 3] == pytest.approx(expected, rel=1e-15)

    def test_single_site_replicates(self):
        out = upsample(UpsampleMethod.BILI, ImagePlane.full(1, 1, 42.0))
        assert np.all(out.data == 42.0)

    def test_corner_pixel_equals_site_for_integers(self):
        plane = ImagePlane([[10.0, 200.0], [90.0, 160.0]])
        out = upsample(UpsampleMethod.BILI, plane)
        # all four neighbor reads clamp onto the corner site itself
        assert out.data[0, 0] == 10.0

    def test_matches_block_model_estimates_bitwise(self, rng):
        """Decoding with BILI must reproduce exactly the estimates that the
        encoder-side model assumed for an interior block."""
        sites = rng.uniform(0, 255, size=(3, 3, 2))
        plane_u = ImagePlane(sites[:, :, 0])
        plane_v = ImagePlane(sites[:, :, 1])
        up_u = upsample(UpsampleMethod.BILI, plane_u).data
        up_v = upsample(UpsampleMethod.BILI, plane_v).data
        n = NeighborChroma(
            tl=tuple(sites[0, 0]),
            t=tuple(sites[0, 1]),
            tr=tuple(sites[0, 2]),
            l=tuple(sites[1, 0]),
            r=tuple(sites[1, 2]),
            bl=tuple(sites[2, 0]),
            b=tuple(sites[2, 1]),
            br=tuple(sites[2, 2]),
        )
        ctx = BlockContext(
            pattern=pattern_for("rgb"),
            yuv_block=((0.0, 0.0, 0.0),) * 4,
            neighbors=n,
        )
        m = build_model(ctx)
        estimates = block_estimates(m, float(sites[1, 1, 0]), float(sites[1, 1, 1]))
        for i, (py, px) in enumerate(((2, 2), (2, 3), (3, 2), (3, 3))):
            assert up_u[py, px] == estimates[i][0]
            assert up_v[py, px] == estimates[i][1]


class TestBicubic:
    def test_phase_weights_sum_to_one_exactly(self):
        for offsets, taps in _CUBIC_PHASES.values():
            assert len(offsets) == len(taps) == 4
            assert sum(taps) == 1.0

    def test_constant_integer_plane_exact(self):
        out = upsample(UpsampleMethod.BICUBIC, ImagePlane.full(5, 4, 255.0))
        assert np.all(out.data == 255.0)

    def test_reproduces_linear_ramps_in_the_interior(self):
        w = 12
        ramp = np.tile(np.arange(float(w)), (4, 1))
        out = upsample(UpsampleMethod.BICUBIC, ImagePlane(ramp)).data
        # cubic interpolation has linear precision: interior pixels land at
        # site coordinate px/2 - 1/4
        for px in range(4, 2 * w - 4):
            expected = px / 2.0 - 0.25
            np.testing.assert_allclose(out[:, px], expected, atol=1e-12)

    def test_sharper_than_bilinear_on_an_edge(self):
        step = np.zeros((2, 12))
        step[:, 6:] = 100.0
        plane = ImagePlane(step)
        bili = upsample(UpsampleMethod.BILI, plane).data
        cubic = upsample(UpsampleMethod.BICUBIC, plane).data
        # cubic overshoots across a step edge, bilinear never does
        assert cubic.min() < 0.0 < bili.min() + 1e-12
        assert cubic.max() > 100.0 > bili.max() - 1e-12
