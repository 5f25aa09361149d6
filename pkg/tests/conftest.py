import numpy as np
import pytest

from spdcpol import SpectralFilter, WaveguideDispersion


@pytest.fixture
def paper_disp():
    """Dispersion record of the modeled source (telecom type-II guide)."""
    return WaveguideDispersion(
        length_L=1.2e-3,
        v_te=8.98e7,
        v_tm=9.01e7,
        gvd_D=-7.9e-4,
        lambda_deg=1555.9e-9,
    )


@pytest.fixture
def top_hat_filter():
    return SpectralFilter(shape="top_hat", center_lambda=1550e-9, fwhm_lambda=45e-9)


@pytest.fixture
def gaussian_filter():
    return SpectralFilter(shape="gaussian", center_lambda=1550e-9, fwhm_lambda=45e-9)


def random_density_matrix(rng: np.random.Generator, n: int = 4) -> np.ndarray:
    """Ginibre-sampled density matrix: full rank, Haar-ish, always valid."""
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_density_batch(rng: np.random.Generator, count: int, n: int = 4) -> np.ndarray:
    a = rng.normal(size=(count, n, n)) + 1j * rng.normal(size=(count, n, n))
    rho = a @ np.conj(np.swapaxes(a, 1, 2))
    tr = np.einsum("kii->k", rho).real
    return rho / tr[:, None, None]
