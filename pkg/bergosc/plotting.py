import matplotlib
import matplotlib.pyplot as plt
import numpy as np
import seaborn as sns
from matplotlib.colors import LinearSegmentedColormap

color_names = ["windows blue", "leaf green", "red", "orange", "amber", "dusty purple"]
palette = sns.xkcd_palette(color_names)


# In[1]:
def gradient_cmap(colors, nsteps=256, name='bergosc'):
    """Colormap interpolating linearly through ``colors`` (RGB or RGBA tuples)."""
    colors = [tuple(c) + (1.0,) if len(c) == 3 else tuple(c) for c in colors]
    return LinearSegmentedColormap.from_list(name, colors, N=nsteps)


def _axes(ax, figsize=(5, 4)):
    if ax is None:
        fig, ax = plt.subplots(figsize=figsize)
    return ax.figure, ax


# In[2]:
def profile_figure(profiles, ax=None, reference_slopes=()):
    """
    log-log plot of RadialProfile values against 1 - r.
    :param profiles: one profile or a list
    :param reference_slopes: slopes drawn as dashed guides through the first point of the first profile
    """
    if not isinstance(profiles, (list, tuple)):
        profiles = [profiles]
    fig, ax = _axes(ax)
    for i, p in enumerate(profiles):
        x = 1.0 - p.radii
        y = np.maximum(p.values, 1e-300)
        ax.loglog(x, y, 'o-', color=palette[i % len(palette)],
                  label='%s %s (slope %.2f)' % (p.name, p.functional, p.slope))
    if profiles and reference_slopes:
        p = profiles[0]
        x = 1.0 - p.radii
        for s in reference_slopes:
            ax.loglog(x, p.values[0] * (x / x[0]) ** s, '--', color='gray', lw=0.8)
    ax.set_xlabel('1 - r')
    ax.set_ylabel('value')
    ax.invert_xaxis()
    ax.legend(fontsize='small')
    return fig


def cluster_figure(cluster, ax=None):
    """Point cloud of a ClusterSet in the complex plane, coloured by radius."""
    fig, ax = _axes(ax, (4.5, 4.5))
    cmap = gradient_cmap([palette[0], palette[2]])
    for i, r in enumerate(cluster.radii):
        v = cluster.values[i]
        ax.plot(v.real, v.imag, '.', color=cmap(i / max(len(cluster.radii) - 1, 1)), label='r = %g' % r)
    ax.set_aspect('equal')
    ax.set_xlabel('Re')
    ax.set_ylabel('Im')
    ax.legend(fontsize='small')
    return fig


def spectrum_figure(eigs, cluster=None, ax=None):
    """Eigenvalues of a finite section with the outermost cluster circle overlaid."""
    fig, ax = _axes(ax, (4.5, 4.5))
    eigs = np.asarray(eigs)
    ax.plot(eigs.real, eigs.imag, 'o', ms=3, color=palette[0], label='eigenvalues')
    if cluster is not None:
        v = cluster.values[-1]
        ax.plot(v.real, v.imag, '.', color=palette[2], label='cluster r = %g' % cluster.radii[-1])
    t = np.linspace(0, 2 * np.pi, 256)
    ax.plot(np.cos(t), np.sin(t), color='gray', lw=0.5)
    ax.set_aspect('equal')
    ax.legend(fontsize='small')
    return fig


def save(fig, path):
    fig.savefig(path, bbox_inches='tight')
    plt.close(fig)
    return path


def use_agg():
    matplotlib.use('Agg')
