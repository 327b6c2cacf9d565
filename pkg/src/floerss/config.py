"""Numeric tolerances and solver settings, grouped in one dataclass.

A single default instance ``DEFAULTS`` is shared by the whole package;
operations accept an optional override.
"""

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Settings:
    # frames: rank / isotropy / subspace-equality tolerance on orthonormalized
    # frames (double precision, target sizes n <= 8)
    frame_tol: float = 1e-9

    # fundamental solution: classical RK4, fixed step, symplectic re-projection
    # every `project_every` steps; hard drift limit before StepTooLarge
    ode_step: float = 1e-3
    project_every: int = 100
    symplectic_drift_tol: float = 1e-10
    symplectic_drift_limit: float = 1e-3

    # crossing detection / refinement
    crossing_grid: int = 256
    crossing_refine_tol: float = 1e-11     # bracket width for localization
    crossing_accept_angle: float = 1e-7    # sin(angle) below which a crossing is accepted
    crossing_merge_tol_rel: float = 1e-6   # relative to interval length
    degeneracy_tol: float = 1e-6           # relative eigenvalue cutoff of the crossing form
    degeneracy_abs: float = 1e-8           # absolute floor (finite-difference noise)
    fd_step_rel: float = 1e-5              # finite-difference step, relative to interval

    # eigenvalue search
    spectrum_window: float = 4 * 3.141592653589793
    spectrum_grid: int = 2048
    spectrum_refine_tol: float = 1e-8
    zero_eigen_tol: float = 1e-7

    # gap inequality check
    quad_nodes: int = 256

    def with_(self, **kw):
        return replace(self, **kw)


DEFAULTS = Settings()
