"""Exact-shape symplectic linear algebra on (R^{2n}, omega_std).

Conventions used by the entire package:

* J_std is the block matrix [[0, -I], [I, 0]] acting on coordinates
  (x_1..x_n, y_1..y_n); it is multiplication by i under R^{2n} = C^n,
  (x, y) <-> x + iy.
* omega(u, v) = <J_std u, v>, so that omega(., J.) is the Euclidean metric.
* The fundamental solution of a symmetric path sigma solves
  J_std dPsi/dt + sigma Psi = 0 with Psi(0) = 1, equivalently
  dPsi/dt = J_std sigma Psi.

All values are immutable after construction and all operations are pure.
"""

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS
from .errors import (DimensionMismatch, NotFullRank, NotIsotropic,
                     NotSymmetric, StepTooLarge)


def J_std(n):
    """Standard complex structure on R^{2n}."""
    J = np.zeros((2 * n, 2 * n))
    J[:n, n:] = -np.eye(n)
    J[n:, :n] = np.eye(n)
    return J


def omega(u, v):
    """Standard symplectic form omega(u, v) = <J u, v>."""
    n = u.shape[0] // 2
    return float(J_std(n) @ u @ v) if u.ndim == 1 else (J_std(n) @ u).T @ v


def rotation(n, angle):
    """exp(angle * J_std): counterclockwise rotation in every complex coordinate."""
    c, s = np.cos(angle), np.sin(angle)
    return c * np.eye(2 * n) + s * J_std(n)


def complex_diag(n, values):
    """Real 2n x 2n representation of the complex diagonal matrix diag(values)."""
    a = np.diag([v.real for v in values])
    b = np.diag([v.imag for v in values])
    return np.block([[a, -b], [b, a]])


@dataclass(frozen=True)
class LagrangianFrame:
    """Orthonormal 2n x n frame spanning a Lagrangian subspace."""

    n: int
    frame: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.frame.setflags(write=False)

    @property
    def projector(self):
        return self.frame @ self.frame.T

    def equals(self, other, tol=None):
        """Subspace equality: all principal angles below tol."""
        tol = DEFAULTS.frame_tol if tol is None else tol
        if self.n != other.n:
            return False
        return max_principal_angle_sin(self, other) < tol


def validate_lagrangian(M, tol=None):
    """Orthonormalize the columns of M and check the Lagrangian conditions.

    Raises NotFullRank when the columns are dependent and NotIsotropic with
    the largest |omega(col_i, col_j)| when the span is not isotropic.
    """
    tol = DEFAULTS.frame_tol if tol is None else tol
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != 2 * M.shape[1] or M.shape[1] == 0:
        raise DimensionMismatch(f"expected a 2n x n matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise NotFullRank("frame has non-finite entries")
    n = M.shape[1]
    q, r = np.linalg.qr(M)
    smin = np.min(np.abs(np.diag(r)))
    scale = max(1.0, float(np.max(np.abs(M))))
    if smin <= tol * scale:
        raise NotFullRank(f"smallest column pivot {smin:.3e} below tolerance",
                          smallest_pivot=smin)
    gram = q.T @ J_std(n) @ q
    worst = float(np.max(np.abs(gram)))
    if worst > max(tol, 1e-12):
        raise NotIsotropic(f"max |omega(col_i, col_j)| = {worst:.3e}", max_pairing=worst)
    # fix a deterministic sign: make the largest entry of each column positive
    for j in range(n):
        k = int(np.argmax(np.abs(q[:, j])))
        if q[k, j] < 0:
            q = q.copy()
            q[:, j] = -q[:, j]
    return LagrangianFrame(n=n, frame=q)


def horizontal(n):
    """R^n x {0}."""
    M = np.zeros((2 * n, n))
    M[:n, :] = np.eye(n)
    return LagrangianFrame(n=n, frame=M)


def vertical(n):
    """{0} x R^n = J_std (R^n x {0})."""
    M = np.zeros((2 * n, n))
    M[n:, :] = np.eye(n)
    return LagrangianFrame(n=n, frame=M)


def apply_matrix(A, F):
    """Frame spanned by A . span(F) for invertible A, fully validated."""
    return validate_lagrangian(A @ F.frame)


def transform_frame(A, F):
    """Frame for A . span(F) with A symplectic: QR only, no re-validation.

    For trusted transforms (rotations, integrated flows, elementary
    symplectic products) the image is Lagrangian by construction; skipping
    the isotropy check matters inside crossing scans.
    """
    q, _ = np.linalg.qr(A @ F.frame)
    return LagrangianFrame(n=F.n, frame=q)


def rotate_frame(F, angle):
    """e^{angle J} . span(F)."""
    return apply_matrix(rotation(F.n, angle), F)


def principal_angle_sines(F, G):
    """Sines of the principal angles between span(F) and span(G), ascending.

    Computed from the residual (1 - P_F) Q_G, which is accurate for tiny
    angles where the cosine formula loses all precision.
    """
    if F.n != G.n:
        raise DimensionMismatch(f"half-dimensions differ: {F.n} != {G.n}")
    resid = G.frame - F.frame @ (F.frame.T @ G.frame)
    s = np.linalg.svd(resid, compute_uv=False)
    return np.sort(np.clip(s, 0.0, 1.0))


def max_principal_angle_sin(F, G):
    return float(principal_angle_sines(F, G)[-1])


def min_principal_angle_sin(F, G):
    return float(principal_angle_sines(F, G)[0])


def intersection_dim(F, G, tol=None):
    """Number of principal angles between span(F), span(G) that vanish within tol."""
    tol = DEFAULTS.frame_tol if tol is None else tol
    s = principal_angle_sines(F, G)
    return int(np.sum(s < tol))


def intersection_basis(F, G, tol=1e-6):
    """Orthonormal basis of span(F) /\\ span(G), as columns.

    Pairs principal vectors with angle below tol; intended for use at a
    refined crossing where the split against the nonzero angles is large.
    """
    u, s, _ = np.linalg.svd(F.frame.T @ G.frame)
    sel = np.arccos(np.clip(s, -1.0, 1.0)) < tol
    # fall back to the sine criterion for the near-1 singular values
    sines = principal_angle_sines(F, G)
    k = int(np.sum(sines < tol))
    if k == 0:
        return np.zeros((2 * F.n, 0))
    vecs = F.frame @ u[:, :k]
    q, _ = np.linalg.qr(vecs)
    return q[:, :k]


def graph_lagrangian(B, tol=None):
    """Frame of the graph {(x, Bx)} of a symmetric matrix B."""
    tol = DEFAULTS.frame_tol if tol is None else tol
    B = np.asarray(B, dtype=float)
    if B.ndim != 2 or B.shape[0] != B.shape[1]:
        raise DimensionMismatch(f"B must be square, got {B.shape}")
    asym = float(np.max(np.abs(B - B.T))) if B.size else 0.0
    if asym > max(tol, 1e-12) * max(1.0, float(np.max(np.abs(B)))):
        raise NotSymmetric(f"max |B - B^T| = {asym:.3e}", asymmetry=asym)
    n = B.shape[0]
    M = np.vstack([np.eye(n), B])
    return validate_lagrangian(M, tol=tol)


@dataclass(frozen=True)
class SymmetricPath:
    """Piecewise-smooth path t -> Sym(2n) on [0, 1]."""

    n: int
    eval: callable = field(repr=False)
    breakpoints: tuple = ()

    def __call__(self, t):
        S = np.asarray(self.eval(t), dtype=float)
        return 0.5 * (S + S.T)

    def check(self, samples=7, tol=1e-9):
        for t in np.linspace(0.0, 1.0, samples):
            S = np.asarray(self.eval(t), dtype=float)
            if S.shape != (2 * self.n, 2 * self.n):
                raise DimensionMismatch(f"sigma({t}) has shape {S.shape}")
            if np.max(np.abs(S - S.T)) > tol * max(1.0, np.max(np.abs(S))):
                raise NotSymmetric(f"sigma({t}) is not symmetric")
        return self


def constant_path(S):
    S = np.asarray(S, dtype=float)
    n = S.shape[0] // 2
    return SymmetricPath(n=n, eval=lambda t: S).check()


def zero_path(n):
    return constant_path(np.zeros((2 * n, 2 * n)))


def poly_path(coeffs):
    """sigma(t) = sum_k coeffs[k] t^k with symmetric matrix coefficients."""
    mats = [np.asarray(c, dtype=float) for c in coeffs]
    n = mats[0].shape[0] // 2

    def ev(t):
        S = np.zeros_like(mats[0])
        tk = 1.0
        for c in mats:
            S = S + tk * c
            tk *= t
        return S

    return SymmetricPath(n=n, eval=ev).check()


@dataclass(frozen=True)
class SymplecticMatrix:
    n: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.entries.setflags(write=False)

    def drift(self):
        J = J_std(self.n)
        return float(np.max(np.abs(self.entries.T @ J @ self.entries - J)))


def project_symplectic(M, tol=1e-14, max_iter=8):
    """Polar-type projection onto Sp(2n): Newton steps M <- M (1 + J E / 2)."""
    n = M.shape[0] // 2
    J = J_std(n)
    for _ in range(max_iter):
        E = M.T @ J @ M - J
        err = np.max(np.abs(E))
        if err < tol:
            break
        M = M @ (np.eye(2 * n) + 0.5 * (J @ E))
    return M


def _rk4_step(M, t, h, generator):
    k1 = generator(t) @ M
    k2 = generator(t + 0.5 * h) @ (M + 0.5 * h * k1)
    k3 = generator(t + 0.5 * h) @ (M + 0.5 * h * k2)
    k4 = generator(t + h) @ (M + h * k3)
    return M + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)


def fundamental_solution(sigma, t=1.0, step=None, settings=DEFAULTS,
                         _return_knots=False):
    """Psi(t) with J dPsi + sigma Psi = 0, Psi(0) = 1, by classical RK4.

    Re-symplectifies every ``settings.project_every`` steps when the drift
    exceeds tolerance; raises StepTooLarge when the drift passes the hard
    limit before projection.
    """
    step = settings.ode_step if step is None else float(step)
    if step <= 0:
        raise IntegrationFailureStep(step)
    n = sigma.n
    J = J_std(n)

    def gen(s):
        return J @ sigma(s)

    nsteps = max(1, int(np.ceil(t / step - 1e-12))) if t > 0 else 0
    h = t / nsteps if nsteps else 0.0
    M = np.eye(2 * n)
    knots = [(0.0, M)]
    for k in range(nsteps):
        M = _rk4_step(M, k * h, h, gen)
        if (k + 1) % settings.project_every == 0 or k == nsteps - 1:
            drift = np.max(np.abs(M.T @ J @ M - J))
            if drift > settings.symplectic_drift_limit:
                raise StepTooLarge(
                    f"symplectic drift {drift:.3e} above hard limit; decrease step",
                    drift=float(drift))
            if drift > settings.symplectic_drift_tol:
                M = project_symplectic(M)
        if _return_knots:
            knots.append(((k + 1) * h, M))
    result = SymplecticMatrix(n=n, entries=M)
    return (result, knots) if _return_knots else result


def IntegrationFailureStep(step):
    from .errors import IntegrationFailure
    return IntegrationFailure(f"step must be positive, got {step}")


class FundamentalFlow:
    """Cached evaluator t -> Psi(t) on [0, 1] for one symmetric path.

    Stores knot states on a fixed grid and restarts RK4 from the nearest
    knot below the query, so repeated queries (crossing refinement) stay
    cheap without re-integrating from 0.
    """

    def __init__(self, sigma, step=None, settings=DEFAULTS, knot_every=16):
        self.sigma = sigma
        self.settings = settings
        self.step = settings.ode_step if step is None else float(step)
        n = sigma.n
        J = J_std(n)
        self._gen = lambda s: J @ sigma(s)
        # constant generator: exact one-parameter group, no integration
        probes = [sigma(t) for t in (0.0, 0.37, 0.73, 1.0)]
        if all(np.max(np.abs(S - probes[0])) < 1e-14 for S in probes[1:]):
            G = J @ probes[0]
            self._const_gen = G
            self._knots = None
            return
        self._const_gen = None
        nsteps = max(1, int(np.ceil(1.0 / self.step)))
        self._h = 1.0 / nsteps
        self._nsteps = nsteps
        M = np.eye(2 * n)
        knots = {0: M}
        for k in range(nsteps):
            M = _rk4_step(M, k * self._h, self._h, self._gen)
            if (k + 1) % settings.project_every == 0:
                drift = np.max(np.abs(M.T @ J @ M - J))
                if drift > settings.symplectic_drift_tol:
                    M = project_symplectic(M)
            if (k + 1) % knot_every == 0 or k == nsteps - 1:
                knots[k + 1] = M
        self._knots = knots
        self._knot_every = knot_every

    def __call__(self, t):
        t = min(max(t, 0.0), 1.0)
        if self._const_gen is not None:
            return expm_small(t * self._const_gen)
        kf = t / self._h
        k0 = int(np.floor(kf + 1e-12))
        kk = (k0 // self._knot_every) * self._knot_every
        while kk not in self._knots:
            kk -= 1
            if kk <= 0:
                kk = 0
                break
        M = self._knots[kk]
        s = kk * self._h
        # full steps up to k0, then one partial step
        for k in range(kk, k0):
            M = _rk4_step(M, k * self._h, self._h, self._gen)
        rem = t - k0 * self._h
        if rem > 1e-15:
            M = _rk4_step(M, k0 * self._h, rem, self._gen)
        return M


def expm_small(G):
    """exp(G) by scaling and squaring with a Taylor core."""
    norm = float(np.max(np.sum(np.abs(G), axis=1))) if G.size else 0.0
    s = max(0, int(np.ceil(np.log2(max(norm, 1e-30) / 0.25))))
    T = G / (2 ** s)
    out = np.eye(G.shape[0])
    term = np.eye(G.shape[0])
    for k in range(1, 18):
        term = term @ T / k
        out = out + term
        if np.max(np.abs(term)) < 1e-18:
            break
    for _ in range(s):
        out = out @ out
    return out


def phi_mu(n, mu, t):
    """Real representation of diag(e^{pi i mu t}, 1, ..., 1) on R^{2n}."""
    vals = [np.exp(1j * np.pi * mu * t)] + [1.0 + 0j] * (n - 1)
    return complex_diag(n, vals)


def mu_action(mu, sigma):
    """The Z-action mu.sigma = phi_{-mu} sigma phi_mu + J phi_{-mu} d/dt phi_mu.

    Preserves symmetry and the spectrum of the associated boundary operator
    with boundary pair (R^n x 0, R^n x 0).
    """
    n = sigma.n
    J = J_std(n)
    # phi_{-mu} d/dt phi_mu is the constant generator pi*mu*J_1 restricted to
    # the first complex coordinate; J * (pi mu J_1) = -pi mu P_1.
    P1 = np.zeros((2 * n, 2 * n))
    P1[0, 0] = 1.0
    P1[n, n] = 1.0
    shift = -np.pi * mu * P1

    def ev(t):
        a = phi_mu(n, -mu, t)
        b = phi_mu(n, mu, t)
        return a @ sigma(t) @ b + shift

    return SymmetricPath(n=n, eval=ev, breakpoints=sigma.breakpoints).check()


def direct_sum_frames(F, G):
    """Block direct sum of Lagrangian frames under R^{2n1} + R^{2n2} = R^{2n}.

    Coordinates interleave as (x', x'', y', y'') so that J_{n1} + J_{n2}
    matches J_{n1+n2}.
    """
    n1, n2 = F.n, G.n
    n = n1 + n2
    M = np.zeros((2 * n, n))
    M[:n1, :n1] = F.frame[:n1, :]
    M[n:n + n1, :n1] = F.frame[n1:, :]
    M[n1:n, n1:] = G.frame[:n2, :]
    M[n + n1:, n1:] = G.frame[n2:, :]
    return validate_lagrangian(M)


def embed_block(A, n1, n2, which):
    """Embed a 2n_i x 2n_i matrix as a block of R^{2(n1+n2)} (same interleaving)."""
    n = n1 + n2
    out = np.zeros((2 * n, 2 * n))
    if which == 0:
        ix = list(range(n1)) + list(range(n, n + n1))
    else:
        ix = list(range(n1, n)) + list(range(n + n1, 2 * n))
    for a, i in enumerate(ix):
        for b, j in enumerate(ix):
            out[i, j] = A[a, b]
    return out


def direct_sum_paths(sig1, sig2):
    """Direct sum of symmetric paths under the block embedding above."""
    n1, n2 = sig1.n, sig2.n

    def ev(t):
        return embed_block(sig1(t), n1, n2, 0) + embed_block(sig2(t), n1, n2, 1)

    return SymmetricPath(n=n1 + n2, eval=ev,
                         breakpoints=tuple(sorted(set(sig1.breakpoints)
                                                  | set(sig2.breakpoints)))).check()
