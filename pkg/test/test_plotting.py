import matplotlib

matplotlib.use('Agg')

import numpy as np
import pytest

import bergosc.plotting as plotting
from bergosc.oscillation import RadialProfile
from bergosc.spectra import ClusterSet

# In[1]:
radii = np.array([0.9, 0.95, 0.99, 0.995, 0.999])
angles = 2 * np.pi * np.arange(16) / 16


@pytest.fixture
def profile():
    return RadialProfile(radii, (1 - radii) ** 0.5, name='example45', functional='hat')


@pytest.fixture
def cluster():
    values = np.array([(1 - r) * np.exp(1j * angles) for r in radii])
    return ClusterSet(radii, angles, values, which='hat', name='synthetic')


def test_gradient_cmap_endpoints():
    cmap = plotting.gradient_cmap([(1, 0, 0), (0, 0, 1)], nsteps=11)
    np.testing.assert_allclose(cmap(0.0), (1, 0, 0, 1))
    np.testing.assert_allclose(cmap(1.0), (0, 0, 1, 1))


# In[2]:
def test_profile_figure(profile, tmp_path):
    fig = plotting.profile_figure([profile, profile], reference_slopes=(0.5, 1.0))
    ax = fig.axes[0]
    assert len(ax.lines) == 4
    assert ax.get_xscale() == 'log'
    path = plotting.save(fig, str(tmp_path / 'profile.png'))
    assert (tmp_path / 'profile.png').stat().st_size > 0 and path.endswith('.png')


def test_cluster_and_spectrum_figures(cluster, tmp_path):
    fig = plotting.cluster_figure(cluster)
    assert len(fig.axes[0].lines) == radii.size
    plotting.save(fig, str(tmp_path / 'cluster.png'))
    fig = plotting.spectrum_figure(np.array([0.5, -0.25j, 0.1 + 0.1j]), cluster)
    # eigenvalues, outer cluster circle, unit circle
    assert len(fig.axes[0].lines) == 3
    plotting.save(fig, str(tmp_path / 'spectrum.png'))
    assert (tmp_path / 'cluster.png').exists() and (tmp_path / 'spectrum.png').exists()
