import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from PIL import Image

from rpreg.errors import (
    AngleOutOfRangeError,
    ChannelUnavailableError,
    EmptyRegionError,
    ImageTooSmallError,
    UnsupportedFormatError,
)
from rpreg.image_io import (
    ImageGrid,
    PixelRect,
    bilinear_sample,
    image_from_uint8,
    load_image,
    rotate,
    save_pgm,
    sobel_magnitude,
    valid_region,
)


def _write(path, data: bytes):
    path.write_bytes(data)
    return path


def test_pgm_white_pixel(tmp_path):
    img = load_image(_write(tmp_path / "w.pgm", b"P5\n1 1\n255\n\xff"), "gray")
    assert (img.width, img.height) == (1, 1)
    assert img.data[0, 0] == 1.0


def test_pgm_black_pixel(tmp_path):
    img = load_image(_write(tmp_path / "b.pgm", b"P5\n1 1\n255\n\x00"), "gray")
    assert img.data[0, 0] == 0.0


def test_ppm_red_channel_hand_decoded(tmp_path):
    # two pixels written byte by byte: pure red then pure green
    path = _write(tmp_path / "rg.ppm", b"P6\n2 1\n255\n\xff\x00\x00\x00\xff\x00")
    assert load_image(path, "red").data.tolist() == [[1.0, 0.0]]
    assert load_image(path, "green").data.tolist() == [[0.0, 1.0]]
    assert load_image(path, "blue").data.tolist() == [[0.0, 0.0]]


def test_png_round_trip(tmp_path):
    raw = np.arange(12, dtype=np.uint8).reshape(3, 4) * 20
    Image.fromarray(raw, mode="L").save(tmp_path / "a.png")
    img = load_image(tmp_path / "a.png")
    np.testing.assert_array_equal(img.data, raw / 255.0)


def test_gray_of_equal_rgb_is_exact():
    raw = np.full((2, 2, 3), 77, dtype=np.uint8)
    assert np.all(image_from_uint8(raw, "gray").data == 77 / 255.0)


def test_channel_on_grayscale_rejected(tmp_path):
    path = _write(tmp_path / "g.pgm", b"P5\n1 1\n255\n\x10")
    with pytest.raises(ChannelUnavailableError):
        load_image(path, "red")


def test_missing_and_garbage_files(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_image(tmp_path / "nope.png")
    with pytest.raises(UnsupportedFormatError):
        load_image(_write(tmp_path / "x.png", b"not an image"))


def test_save_pgm_round_trip(tmp_path):
    img = ImageGrid(np.array([[0.0, 1.0], [0.2, 0.6]]))
    save_pgm(img, tmp_path / "o.pgm")
    back = load_image(tmp_path / "o.pgm")
    np.testing.assert_allclose(back.data, np.rint(img.data * 255) / 255)


def test_image_grid_is_read_only():
    img = ImageGrid(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        img.data[0, 0] = 1.0
    with pytest.raises(ValueError):
        ImageGrid(np.full((2, 2), 1.5))


def test_sobel_constant_is_zero():
    out = sobel_magnitude(ImageGrid(np.full((5, 6), 0.5)))
    assert np.all(out.data == 0.0)


def test_sobel_vertical_step_center():
    img = ImageGrid(np.array([[0, 0, 1]] * 3, dtype=float))
    assert sobel_magnitude(img).data[1, 1] == pytest.approx(4 / (4 * math.sqrt(2)), abs=1e-12)


def test_sobel_ramp_interior_constant():
    w = 9
    img = ImageGrid(np.tile(np.arange(w) / (w - 1), (6, 1)))
    interior = sobel_magnitude(img).data[1:-1, 1:-1]
    np.testing.assert_allclose(interior, 8 / (w - 1) / (4 * math.sqrt(2)), rtol=0, atol=1e-12)


def test_sobel_too_small():
    with pytest.raises(ImageTooSmallError):
        sobel_magnitude(ImageGrid(np.zeros((2, 5))))


def test_rotate_zero_is_copy():
    data = np.random.default_rng(0).uniform(size=(7, 5))
    out = rotate(ImageGrid(data), 0.0)
    assert np.array_equal(out.image.data, data)
    assert out.valid.all()


@pytest.mark.parametrize("k", [1, 2, 3])
def test_rotate_multiples_of_90_match_rot90(k):
    data = np.random.default_rng(k).uniform(size=(6, 6))
    out = rotate(ImageGrid(data), 90.0 * k, max_abs_theta=270)
    assert np.array_equal(out.image.data, np.rot90(data, k))
    assert out.valid.all()


def test_rotate_range_guard():
    img = ImageGrid(np.zeros((4, 4)))
    with pytest.raises(AngleOutOfRangeError):
        rotate(img, 46.0)
    with pytest.raises(AngleOutOfRangeError):
        rotate(img, float("nan"))


def test_rotate_45_hand_computed_pixel():
    # data[y, x] = (3y + x + 1) / 9; output (x=2, y=1) samples (1+r, 1+r), r = sqrt(2)/2
    data = (np.arange(9, dtype=float).reshape(3, 3) + 1) / 9
    out = rotate(ImageGrid(data), 45.0)
    f = math.sqrt(2) / 2
    expected = ((5 + f) * (1 - f) + (8 + f) * f) / 9
    assert out.image.data[1, 2] == pytest.approx(expected, abs=1e-12)
    assert out.image.data[1, 1] == pytest.approx(5 / 9, abs=1e-12)


def test_two_by_two_center_blend():
    data = np.array([[0.0, 1.0], [0.0, 1.0]])
    v, ok = bilinear_sample(data, np.array([0.5]), np.array([0.5]))
    assert ok[0] and v[0] == pytest.approx(0.5)
    out = rotate(ImageGrid(data), 45.0)
    # the corners rotate outside the image
    assert not out.valid.any()
    assert np.all(out.image.data == 0.0)


def test_bilinear_out_of_bounds_is_zero():
    v, ok = bilinear_sample(np.ones((3, 3)), np.array([-0.1, 2.0, 2.01]), np.array([1.0, 2.0, 0.0]))
    assert ok.tolist() == [False, True, False]
    assert v.tolist() == [0.0, 1.0, 0.0]


def test_region_no_rotation_no_patch():
    assert valid_region(20, 10, 0, 0) == PixelRect(0, 19, 0, 9)


def test_region_one_pixel_margin():
    assert valid_region(512, 512, 0, 1) == PixelRect(1, 510, 1, 510)


def _footprint_in_bounds(rect, w, h, patch, thetas):
    """Independent check: every footprint corner stays inside the image for every angle."""
    cx, cy = (w - 1) / 2, (h - 1) / 2
    xs = np.array([rect.x0 - patch, rect.x1 + patch], dtype=float)
    ys = np.array([rect.y0 - patch, rect.y1 + patch], dtype=float)
    px, py = np.meshgrid(xs, ys)
    for t in np.radians(thetas):
        sx = cx + np.cos(t) * (px - cx) - np.sin(t) * (py - cy)
        sy = cy + np.sin(t) * (px - cx) + np.cos(t) * (py - cy)
        if sx.min() < -1e-9 or sx.max() > w - 1 + 1e-9 or sy.min() < -1e-9 or sy.max() > h - 1 + 1e-9:
            return False
    return True


def test_region_512_h30_10deg_geometric_oracle():
    rect = valid_region(512, 512, 10, 30)
    thetas = np.linspace(-10, 10, 2001)
    assert _footprint_in_bounds(rect, 512, 512, 30, thetas)
    grown = PixelRect(rect.x0 - 1, rect.x1 + 1, rect.y0 - 1, rect.y1 + 1)
    assert not _footprint_in_bounds(grown, 512, 512, 30, thetas)
    # centered
    assert rect.x0 + rect.x1 == 511 and rect.y0 + rect.y1 == 511
    # square: half-extent e with e (cos 10 + sin 10) = 255.5
    e = 255.5 / (math.cos(math.radians(10)) + math.sin(math.radians(10)))
    x0 = math.ceil(255.5 - e + 30)
    assert rect == PixelRect(x0, 511 - x0, x0, 511 - x0) == PixelRect(65, 446, 65, 446)


def test_region_empty():
    with pytest.raises(EmptyRegionError):
        valid_region(10, 10, 10, 5)


@settings(max_examples=60, deadline=None)
@given(
    w=st.integers(16, 80),
    h=st.integers(16, 80),
    theta=st.floats(0.0, 20.0),
    patch=st.integers(0, 3),
)
def test_region_always_in_bounds(w, h, theta, patch):
    try:
        rect = valid_region(w, h, theta, patch)
    except EmptyRegionError:
        return
    assert _footprint_in_bounds(rect, w, h, patch, np.linspace(-theta, theta, 41))


@settings(max_examples=30, deadline=None)
@given(theta=st.floats(-10.0, 10.0), seed=st.integers(0, 1000))
def test_region_pixels_valid_after_rotation(theta, seed):
    img = ImageGrid(np.random.default_rng(seed).uniform(size=(32, 40)))
    rect = valid_region(40, 32, 10.0, 2)
    mask = rotate(img, theta).valid
    assert mask[rect.y0 - 2:rect.y1 + 3, rect.x0 - 2:rect.x1 + 3].all()
