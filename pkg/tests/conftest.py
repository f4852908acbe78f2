import numpy as np
import pytest
from scipy.ndimage import gaussian_filter

from foveakit.imaging import RasterImage


def make_scene(seed: int, size: int = 512) -> RasterImage:
    """Deterministic natural-ish RGB test scene: 1/f-style multi-scale
    structure plus a few soft-edged disks."""
    rng = np.random.default_rng(seed)
    img = np.zeros((size, size, 3))
    for sig, amp in ((size / 8, 1.0), (size / 32, 0.55), (size / 128, 0.3), (1.0, 0.22)):
        layer = rng.normal(0.0, 1.0, (size, size, 3))
        layer = gaussian_filter(layer, sigma=(sig, sig, 0))
        layer /= np.abs(layer).max() + 1e-12
        img += amp * layer
    yy, xx = np.mgrid[0:size, 0:size]
    for _ in range(6):
        cx, cy = rng.uniform(0, size, 2)
        r = rng.uniform(size / 16, size / 4)
        disk = 1.0 / (1.0 + np.exp((np.hypot(xx - cx, yy - cy) - r) / 2.0))
        img += 0.35 * disk[:, :, None] * rng.uniform(-1, 1, 3)
    img -= img.min()
    img /= img.max()
    return RasterImage.from_array(np.round(15 + img * 225).astype(np.uint8))


@pytest.fixture(scope="session")
def fixture_scenes() -> list[RasterImage]:
    """Five 512x512 natural-ish scenes shared across the suite."""
    return [make_scene(seed) for seed in range(5)]


@pytest.fixture(scope="session")
def small_scene() -> RasterImage:
    return make_scene(99, size=160)
