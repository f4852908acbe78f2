import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from foveakit.imaging import RasterImage, load_image, save_image


def random_raster(rng, w, h, c):
    return RasterImage.from_array(rng.integers(0, 256, (h, w, c)).astype(np.uint8))


def test_constant_ppm_decodes(tmp_path):
    path = tmp_path / "const.ppm"
    path.write_bytes(b"P6\n2 2\n255\n" + bytes([128] * 12))
    img = load_image(path)
    assert (img.width, img.height, img.channels) == (2, 2, 3)
    assert np.all(img.data == 128)


def test_ppm_comment_header(tmp_path):
    path = tmp_path / "c.ppm"
    path.write_bytes(b"P6\n# a comment\n2 1\n255\n" + bytes(6))
    img = load_image(path)
    assert img.size == (2, 1)


@pytest.mark.parametrize("suffix,channels", [(".ppm", 3), (".pgm", 1), (".png", 3), (".png", 1)])
def test_save_load_round_trip(tmp_path, suffix, channels):
    rng = np.random.default_rng(7)
    img = random_raster(rng, 17, 13, channels)
    path = tmp_path / f"rt{suffix}"
    save_image(img, path)
    assert load_image(path) == img


def test_decode_encode_decode_identity(tmp_path):
    rng = np.random.default_rng(3)
    first = tmp_path / "a.ppm"
    save_image(random_raster(rng, 9, 5, 3), first)
    img = load_image(first)
    second = tmp_path / "b.ppm"
    save_image(img, second)
    assert load_image(second) == img


def test_grayscale_png_loads_one_channel(tmp_path):
    img = RasterImage.from_array(np.arange(30, dtype=np.uint8).reshape(5, 6))
    path = tmp_path / "g.png"
    save_image(img, path)
    loaded = load_image(path)
    assert loaded.channels == 1
    assert loaded == img


def test_png_alpha_dropped_with_warning(tmp_path):
    from PIL import Image

    path = tmp_path / "rgba.png"
    Image.new("RGBA", (4, 3), (10, 20, 30, 128)).save(path)
    with pytest.warns(UserWarning, match="alpha"):
        img = load_image(path)
    assert img.channels == 3
    assert np.all(img.data[0, 0] == [10, 20, 30])


def test_unreadable_file_errors(tmp_path):
    with pytest.raises(OSError):
        load_image(tmp_path / "missing.png")


def test_unsupported_format_errors(tmp_path):
    path = tmp_path / "x.png"
    path.write_bytes(b"GIF89a not really a png")
    with pytest.raises(ValueError, match="unsupported"):
        load_image(path)


def test_corrupt_ppm_errors(tmp_path):
    path = tmp_path / "bad.ppm"
    path.write_bytes(b"P6\n4 4\n255\n\x00\x00")  # truncated payload
    with pytest.raises(ValueError, match="truncated"):
        load_image(path)
    path.write_bytes(b"P6\nnot numbers\n")
    with pytest.raises(ValueError, match="corrupt"):
        load_image(path)


def test_save_to_unwritable_path_errors(tmp_path):
    img = RasterImage.from_array(np.zeros((2, 2, 3), np.uint8))
    with pytest.raises(OSError):
        save_image(img, tmp_path / "missing-parent" / "out.ppm")
    target = tmp_path / "dir.png"
    target.mkdir()
    with pytest.raises(OSError):
        save_image(img, target)  # a directory, not a file


def test_invalid_raster_rejected():
    with pytest.raises(ValueError):
        RasterImage(width=2, height=2, channels=3, data=np.zeros((2, 2, 1), np.uint8))
    with pytest.raises(ValueError):
        RasterImage.from_array(np.zeros((2, 2, 4), np.uint8))
    with pytest.raises(ValueError):
        RasterImage.from_array(np.zeros((0, 2, 3), np.uint8))


@settings(max_examples=25, deadline=None)
@given(
    w=st.integers(1, 24),
    h=st.integers(1, 24),
    c=st.sampled_from([1, 3]),
    seed=st.integers(0, 2**31),
    fmt=st.sampled_from([".png", ".ppm"]),
)
def test_round_trip_lossless_property(tmp_path_factory, w, h, c, seed, fmt):
    rng = np.random.default_rng(seed)
    img = random_raster(rng, w, h, c)
    path = tmp_path_factory.mktemp("rt") / f"img{'.pgm' if c == 1 and fmt == '.ppm' else fmt}"
    save_image(img, path)
    assert load_image(path) == img
