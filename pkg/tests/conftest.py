import numpy as np
import pytest

from capcert.channels import make_rng


def _rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def random_symplectic(rng):
    """Random two-mode symplectic matrix from rotations, squeezers and a beam splitter."""
    def local():
        out = np.zeros((4, 4))
        for m in range(2):
            r = rng.uniform(-1.0, 1.0)
            sq = np.diag([np.exp(-r), np.exp(r)])
            out[2 * m:2 * m + 2, 2 * m:2 * m + 2] = _rotation(rng.uniform(0, 2 * np.pi)) @ sq
        return out

    th = rng.uniform(0, np.pi / 2)
    c, s = np.cos(th), np.sin(th)
    bs = np.block([[c * np.eye(2), s * np.eye(2)], [-s * np.eye(2), c * np.eye(2)]])
    return local() @ bs @ local()


def random_bona_fide(rng):
    nu = 1.0 + rng.exponential(2.0, size=2)
    S = random_symplectic(rng)
    M = S @ np.diag(np.repeat(nu, 2)) @ S.T
    return (M + M.T) / 2, np.sort(nu)[::-1]


@pytest.fixture
def rng():
    return make_rng(20240601, 0)
