"""Verdict thresholds and default sampling ladders shared by the CLI, the checks and the tests."""

import numpy as np


class Thresholds:
    # log-log slope window around a predicted exponent
    slope_window = 0.2
    # "vanishes at the boundary": last sample below this fraction of the first
    decay_ratio = 0.1
    # "bounded": max/min of a profile below this ratio
    bounded_ratio = 5.0
    # relative change allowed when the prefix grid is doubled
    refinement_gate = 0.05
    # floor for ratios of possibly vanishing quantities
    eps = 1e-12
    det_margin = 1e-3
    winding_eps = 1e-6
    winding_residual = 0.05
    fredholm_margin = 0.05
    berezin_tail = 1e-6
    hankel_tail = 1e-4
    reflection_warn_radius = 0.7
    min_profile_points = 5

    boundary_ladder = (0.9, 0.95, 0.99, 0.995, 0.999)
    profile_inner = 0.9
    profile_outer = 0.999
    profile_points = 12
    profile_angles = 32
    prefix_grid = (16, 16)
    sub_radii = 8

    @classmethod
    def profile_radii(cls, n=None, inner=None, outer=None):
        """Radii geometric in 1 - r between ``inner`` and ``outer``."""
        n = cls.profile_points if n is None else n
        inner = cls.profile_inner if inner is None else inner
        outer = cls.profile_outer if outer is None else outer
        return 1.0 - np.geomspace(1.0 - inner, 1.0 - outer, n)

    @classmethod
    def as_dict(cls):
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in vars(cls).items()
                if not k.startswith('_') and not callable(v) and not isinstance(v, classmethod)}


__version__ = '0.1.0'
SCHEMA = 'bergman-osc/1'
