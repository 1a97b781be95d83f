import numpy as np
import pytest

from src.core.config import Settings
from src.geometry.surfaces import ProfileCurve, RevolutionSurface


@pytest.fixture
def rng():
    return np.random.default_rng(0xC0FFEE)


@pytest.fixture
def config():
    # settings independent of the caller's SPHEREX_* environment
    return Settings(_env_file=None, threads=1)


@pytest.fixture
def fig4_profile():
    return ProfileCurve.polar_trig(0.9, 0.5, 0.2, 3.0, 3.1)


@pytest.fixture
def fig4_surface(fig4_profile):
    return RevolutionSurface(fig4_profile, 3)


@pytest.fixture
def sphere():
    """centered sphere of radius 1/2 in R^3."""
    return RevolutionSurface(ProfileCurve.centered_circle(0.5), 3)


class SegmentProfile:
    """a straight segment, zero curvature everywhere."""

    def gamma(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.stack([0.1 * theta, np.full_like(theta, -0.3)], axis=-1)

    def d1(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.stack([np.full_like(theta, 0.1), np.zeros_like(theta)], axis=-1)

    def d2(self, theta):
        theta = np.asarray(theta, dtype=float)
        return np.zeros(theta.shape + (2,))


@pytest.fixture
def segment_profile():
    return SegmentProfile()
