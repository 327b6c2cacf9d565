"""Spectra of boundary operators A = J d/dt + sigma on [0, 1] with
Lagrangian boundary conditions, plus the Fredholm index formulas.

Eigenvalue reporting convention: an eigenvalue rho is reported when the
boundary problem J xi' + (sigma + rho) xi = 0, xi(0) in L0, xi(1) in L1
has a nontrivial solution, i.e. when the fundamental solution of
sigma + rho maps L0 to a subspace meeting L1.  With this sign the flat
model sigma = 0, L1 = e^{alpha J} L0 reports exactly alpha + pi Z (the
angle progression), and the spectral gap and kernel agree with those of
A = J d/dt + sigma, which are reflection invariant.
"""

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .config import DEFAULTS
from .errors import (DeltaNotBelowGap, DimensionMismatch, EndpointMismatch,
                     NonIntegerIndex, WindowTooSmall)
from . import symplin as sl
from . import lagpath as lp


@dataclass(frozen=True)
class AsymptoticOperator:
    n: int
    sigma: sl.SymmetricPath
    boundary: tuple  # (Lambda0, Lambda1) LagrangianFrames

    def __post_init__(self):
        L0, L1 = self.boundary
        if L0.n != self.n or L1.n != self.n or self.sigma.n != self.n:
            raise DimensionMismatch("operator data has mismatched half-dimension")
        self.sigma.check()


def flat_model(alpha, n=1):
    """sigma = 0, L0 = R^n x 0, L1 = e^{alpha J} L0."""
    L0 = sl.horizontal(n)
    return AsymptoticOperator(n=n, sigma=sl.zero_path(n),
                              boundary=(L0, sl.rotate_frame(L0, alpha)))


@dataclass(frozen=True)
class SpectrumReport:
    window: tuple
    eigenvalues: tuple      # sorted (rho, multiplicity)
    gap: float              # None when no nonzero eigenvalue in the window
    kernel_dim: int


def _batched_expm(G):
    """exp(G) for a stack (B, d, d), by scaling and squaring with Taylor."""
    norms = np.max(np.sum(np.abs(G), axis=2), axis=1)
    smax = float(np.max(norms)) if len(norms) else 0.0
    s = max(0, int(np.ceil(np.log2(max(smax, 1e-30) / 0.25))))
    T = G / (2 ** s)
    d = G.shape[1]
    out = np.broadcast_to(np.eye(d), G.shape).copy()
    term = out.copy()
    for k in range(1, 18):
        term = (term @ T) / k
        out = out + term
        if np.max(np.abs(term)) < 1e-18:
            break
    for _ in range(s):
        out = out @ out
    return out


def _is_constant_sigma(sigma, samples=5):
    vals = [sigma(t) for t in np.linspace(0.0, 1.0, samples)]
    return all(np.array_equal(vals[0], v) or np.max(np.abs(v - vals[0])) < 1e-14
               for v in vals[1:])


def _shifted_flows(A, rhos, step, settings):
    """Psi_{sigma + rho}(1) for a batch of shifts, one vectorized sweep.

    Constant sigma uses the exact matrix exponential; otherwise a batched
    classical RK4 run.
    """
    n = A.n
    J = sl.J_std(n)
    rhos = np.asarray(rhos, dtype=float)
    B = rhos.shape[0]
    if _is_constant_sigma(A.sigma):
        base = (J @ A.sigma(0.0))[None, :, :]
        G = base + rhos[:, None, None] * J[None, :, :]
        return _batched_expm(G)
    nsteps = max(1, int(np.ceil(1.0 / step)))
    h = 1.0 / nsteps
    M = np.broadcast_to(np.eye(2 * n), (B, 2 * n, 2 * n)).copy()

    def gen(t):
        base = J @ A.sigma(t)
        return base[None, :, :] + rhos[:, None, None] * J[None, :, :]

    def project(M):
        # batched Newton step(s) for M^T J M = J
        for _ in range(2):
            E = np.swapaxes(M, 1, 2) @ J[None, :, :] @ M - J[None, :, :]
            if np.max(np.abs(E)) < 1e-13:
                break
            M = M @ (np.eye(2 * n)[None, :, :] + 0.5 * (J[None, :, :] @ E))
        return M

    for k in range(nsteps):
        t = k * h
        g1 = gen(t)
        g2 = gen(t + 0.5 * h)
        g4 = gen(t + h)
        k1 = g1 @ M
        k2 = g2 @ (M + 0.5 * h * k1)
        k3 = g2 @ (M + 0.5 * h * k2)
        k4 = g4 @ (M + h * k3)
        M = M + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if (k + 1) % settings.project_every == 0:
            M = project(M)
    return project(M)


def _gap_function(A, step, settings):
    """rho -> smallest principal angle sine between Psi_{sigma+rho}(1) L0 and L1."""
    L0, L1 = A.boundary

    def g_batch(rhos):
        mats = _shifted_flows(A, rhos, step, settings)
        out = np.empty(len(rhos))
        for i, M in enumerate(mats):
            F = sl.apply_matrix(M, L0)
            out[i] = sl.min_principal_angle_sin(F, L1)
        return out

    return g_batch


def eigenvalues(A, window=None, grid=None, tol=None, step=None,
                settings=DEFAULTS):
    """Scan [-window, window] for eigenvalues; refine by golden section.

    Detection: rho is reported iff the fundamental solution of sigma + rho
    maps L0 to a subspace meeting L1 nontrivially; the multiplicity is the
    intersection dimension at the refined rho.
    """
    window = settings.spectrum_window if window is None else float(window)
    grid = settings.spectrum_grid if grid is None else int(grid)
    tol = settings.spectrum_refine_tol if tol is None else float(tol)
    if window <= 0:
        raise WindowTooSmall("window must be positive")
    if step is None:
        # keep ||generator|| * h small; the final polish below rechecks each
        # eigenvalue at the fine default step
        smax = max(float(np.max(np.abs(A.sigma(t)))) for t in np.linspace(0, 1, 5))
        step = float(np.clip(0.05 / max(window + smax, 1.0), 1e-3, 1e-2))
    else:
        step = float(step)

    g_batch = _gap_function(A, step, settings)
    rhos = np.linspace(-window, window, grid + 1)
    g = g_batch(rhos)

    # bracket local minima
    brackets = []
    for i in range(1, grid):
        if g[i] <= g[i - 1] and g[i] <= g[i + 1] and g[i] < 0.9:
            brackets.append((rhos[i - 1], rhos[i + 1]))
    for edge in (0, grid):
        if g[edge] < 1e-6:
            lo = rhos[max(edge - 1, 0)]
            hi = rhos[min(edge + 1, grid)]
            brackets.append((lo, hi))

    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    los = np.array([b[0] for b in brackets])
    his = np.array([b[1] for b in brackets])
    while len(brackets) and np.max(his - los) > tol:
        x1 = his - invphi * (his - los)
        x2 = los + invphi * (his - los)
        f1 = g_batch(x1)
        f2 = g_batch(x2)
        left = f1 <= f2
        his = np.where(left, x2, his)
        los = np.where(left, los, x1)

    found = []
    if len(brackets):
        centers = 0.5 * (los + his)
        vals = g_batch(centers)
        L0, L1 = A.boundary
        accept = 10.0 * max(tol, 1e-9)
        keep = vals < accept
        centers = centers[keep]
        fine = settings.ode_step
        if len(centers) and fine < step and not _is_constant_sigma(A.sigma):
            # batched polish at the fine step: each coarse minimum is within
            # O(step^4) of the true eigenvalue
            g_fine = _gap_function(A, fine, settings)
            pad = max(1e3 * tol, 1e4 * step ** 4)
            plo = centers - pad
            phi = centers + pad
            while np.max(phi - plo) > tol:
                x1 = phi - invphi * (phi - plo)
                x2 = plo + invphi * (phi - plo)
                f1 = g_fine(x1)
                f2 = g_fine(x2)
                left = f1 <= f2
                phi = np.where(left, x2, phi)
                plo = np.where(left, plo, x1)
            centers = 0.5 * (plo + phi)
        if len(centers):
            mats = _shifted_flows(A, centers, fine, settings)
            for rho, M in zip(centers, mats):
                F = sl.apply_matrix(M, L0)
                mult = sl.intersection_dim(F, L1, tol=1e-6)
                found.append((float(rho), max(mult, 1)))
    # merge duplicates
    found.sort()
    merged = []
    for rho, m in found:
        if merged and abs(rho - merged[-1][0]) < 50 * tol:
            continue
        merged.append((rho, m))
    merged = [(r, m) for r, m in merged if abs(r) <= window + 10 * tol]

    kd = sum(m for r, m in merged if abs(r) < settings.zero_eigen_tol)
    nonzero = [abs(r) for r, m in merged if abs(r) >= settings.zero_eigen_tol]
    gap = min(nonzero) if nonzero else None
    return SpectrumReport(window=(-window, window), eigenvalues=tuple(merged),
                          gap=gap, kernel_dim=kd)


def spectral_gap(A, window=None, grid=None, tol=None, settings=DEFAULTS,
                 _retries=2):
    """Smallest |rho| over nonzero eigenvalues; doubles the window on a miss."""
    window = settings.spectrum_window if window is None else float(window)
    rep = eigenvalues(A, window=window, grid=grid, tol=tol, settings=settings)
    if rep.gap is not None:
        return rep.gap
    if _retries > 0:
        return spectral_gap(A, window=2 * window, grid=grid, tol=tol,
                            settings=settings, _retries=_retries - 1)
    raise WindowTooSmall(
        f"no nonzero eigenvalue found in [-{window}, {window}]; retry with a "
        "larger window", window=window)


def kernel_dim(A, tol=None, settings=DEFAULTS):
    """dim(Psi_sigma(1) L0 /\\ L1): kernel of J d/dt + sigma on the boundary pair."""
    tol = 1e-6 if tol is None else tol
    psi = sl.fundamental_solution(A.sigma, 1.0, settings=settings)
    L0, L1 = A.boundary
    return sl.intersection_dim(sl.apply_matrix(psi.entries, L0), L1, tol=tol)


def _shifted_path(sigma, rho):
    """sigma - rho * identity, as a SymmetricPath."""
    n = sigma.n
    eye = np.eye(2 * n)
    return sl.SymmetricPath(n=n, eval=lambda t: sigma(t) - rho * eye,
                            breakpoints=sigma.breakpoints)


def adelta_shift_check(A, delta, grid=None, settings=DEFAULTS, gap=None,
                       spectrum_kw=None):
    """Check mu(Psi_delta L0, L1) = mu(Psi_0 L0, L1) -/+ (1/2) dim ker A.

    Both signs of the shift are evaluated in one call; returns a dict with
    the four half-integers and the equality flags.
    """
    if gap is None:
        gap = spectral_gap(A, settings=settings, **(spectrum_kw or {}))
    if not (0 < delta < gap):
        raise DeltaNotBelowGap(f"delta = {delta} not in (0, gap = {gap:.6g})",
                               delta=delta, gap=gap)
    L0, L1 = A.boundary
    kd = kernel_dim(A, settings=settings)
    c1 = lp.constant_lagrangian_path(L1, 0.0, 1.0)

    def mu_for(rho):
        path = lp.fundamental_image_path(_shifted_path(A.sigma, rho), L0,
                                         settings=settings)
        return lp.rs_index(path, c1, grid=grid, settings=settings)

    mu0 = mu_for(0.0)
    mu_plus = mu_for(delta)
    mu_minus = mu_for(-delta)
    half_k = Fraction(kd, 2)
    return {
        "mu_zero": mu0,
        "mu_plus_delta": mu_plus,
        "mu_minus_delta": mu_minus,
        "kernel_dim": kd,
        "plus_ok": mu_plus == mu0 - half_k,
        "minus_ok": mu_minus == mu0 + half_k,
        "equal": (mu_plus == mu0 - half_k) and (mu_minus == mu0 + half_k),
    }


def fredholm_index(plus_data, minus_data, F, kernel_dims=None, grid=None,
                   settings=DEFAULTS):
    """Index of the strip operator with matching-kernel extension:

    mu(Psi+ L0+, L1+) + mu(F0, F1) - mu(Psi- L0-, L1-)
    + (1/2) dim ker A- + (1/2) dim ker A+.

    plus_data / minus_data are (sigma, Lambda0, Lambda1) triples; F is the
    pair (F0, F1) of LagrangianPaths whose endpoints must match the
    asymptotic boundary data.
    """
    sig_p, L0p, L1p = plus_data
    sig_m, L0m, L1m = minus_data
    F0, F1 = F
    if not (F0.start.equals(L0m, tol=1e-7) and F1.start.equals(L1m, tol=1e-7)):
        raise EndpointMismatch("F(a) must span the negative asymptotic pair")
    if not (F0.end.equals(L0p, tol=1e-7) and F1.end.equals(L1p, tol=1e-7)):
        raise EndpointMismatch("F(b) must span the positive asymptotic pair")

    Ap = AsymptoticOperator(n=sig_p.n, sigma=sig_p, boundary=(L0p, L1p))
    Am = AsymptoticOperator(n=sig_m.n, sigma=sig_m, boundary=(L0m, L1m))
    kp = kernel_dim(Ap, settings=settings)
    km = kernel_dim(Am, settings=settings)
    if kernel_dims is not None and tuple(kernel_dims) != (km, kp):
        raise DimensionMismatch(
            f"kernel_dims {tuple(kernel_dims)} disagree with computed ({km}, {kp})")

    c1p = lp.constant_lagrangian_path(L1p, 0.0, 1.0)
    c1m = lp.constant_lagrangian_path(L1m, 0.0, 1.0)
    mu_p = lp.rs_index(lp.fundamental_image_path(sig_p, L0p, settings=settings),
                       c1p, grid=grid, settings=settings)
    mu_m = lp.rs_index(lp.fundamental_image_path(sig_m, L0m, settings=settings),
                       c1m, grid=grid, settings=settings)
    mu_F = lp.rs_index(F0, F1, grid=grid, settings=settings)
    total = mu_p + mu_F - mu_m + Fraction(km, 2) + Fraction(kp, 2)
    if total.denominator != 1:
        raise NonIntegerIndex(f"index {total} is not an integer; inconsistent data",
                              value=str(total))
    return int(total)


def strip_index(mu_vit, dim_cm, dim_cp):
    """mu_Vit(u) + (1/2)(dim C- + dim C+), checked to be an integer."""
    total = Fraction(mu_vit) + Fraction(dim_cm + dim_cp, 2)
    if total.denominator != 1:
        raise NonIntegerIndex(
            f"mu_Vit + (dims)/2 = {total} is not an integer", value=str(total))
    return int(total)


# -- gap inequality check ------------------------------------------------------


def _kernel_functions(A, settings):
    """Kernel eigenfunctions t -> Psi(t) v for v in L0 /\\ Psi(1)^{-1} L1."""
    flow = sl.FundamentalFlow(A.sigma, settings=settings)
    L0, L1 = A.boundary
    psi1 = flow(1.0)
    F = sl.apply_matrix(psi1, L0)
    basis = sl.intersection_basis(F, L1, tol=1e-6)
    if basis.shape[1] == 0:
        return []
    # pull back to initial conditions in L0
    v0 = np.linalg.solve(psi1, basis)
    out = []
    for j in range(v0.shape[1]):
        v = v0[:, j]
        out.append(lambda t, v=v: flow(t) @ v)
    return out


def gap_inequality_check(A, tol=1e-4, num_tests=50, rng=None, modes=6,
                         settings=DEFAULTS, project_kernel=True):
    """Sample smooth test functions in the domain and check

    ||A xi|| >= iota(A) ||xi||   (xi orthogonal to ker A)   and
    ||A xi||^2 >= iota(A) <A xi, xi>,

    with quadrature on ``settings.quad_nodes`` nodes.  Returns (ok, report).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    n = A.n
    L0, L1 = A.boundary
    iota = spectral_gap(A, settings=settings)
    kf = _kernel_functions(A, settings)

    m = settings.quad_nodes
    ts = np.linspace(0.0, 1.0, m + 1)
    w = np.full(m + 1, 1.0 / m)
    w[0] = w[-1] = 0.5 / m

    P0c = np.eye(2 * n) - L0.projector      # projection killing the L0 part
    P1c = np.eye(2 * n) - L1.projector
    J = sl.J_std(n)
    sig_vals = np.stack([A.sigma(t) for t in ts])
    kern_vals = [np.stack([f(t) for t in ts]) for f in kf]

    def rand_test_function():
        # trig sum with boundary correction, then L^2 kernel projection
        a = rng.standard_normal((modes, 2 * n))
        b = rng.standard_normal((modes, 2 * n))
        xi = np.zeros((m + 1, 2 * n))
        dxi = np.zeros((m + 1, 2 * n))
        for k in range(modes):
            ck = np.cos(np.pi * k * ts)[:, None]
            sk = np.sin(np.pi * k * ts)[:, None]
            xi += ck * a[k][None, :] + sk * b[k][None, :]
            dxi += np.pi * k * (-sk * a[k][None, :] + ck * b[k][None, :])
        # boundary correction: xi(0) in L0, xi(1) in L1
        c0 = P0c @ xi[0]
        c1 = P1c @ xi[-1]
        xi = xi - (1.0 - ts)[:, None] * c0[None, :] - ts[:, None] * c1[None, :]
        dxi = dxi + c0[None, :] - c1[None, :]
        if project_kernel:
            for kv in kern_vals:
                coeff = np.sum(w[:, None] * xi * kv)
                norm2 = np.sum(w[:, None] * kv * kv)
                xi = xi - (coeff / norm2) * kv
                # kernel elements satisfy J k' + sigma k = 0, so A xi unchanged
        Axi = (J @ dxi.T).T + np.einsum("tij,tj->ti", sig_vals, xi)
        return xi, Axi

    def l2(f):
        return float(np.sqrt(np.sum(w[:, None] * f * f)))

    def inner(f, g):
        return float(np.sum(w[:, None] * f * g))

    failures = []
    samples = [rand_test_function() for _ in range(num_tests)]
    if not project_kernel:
        # include the kernel directions themselves: the restricted
        # inequality must fail on them (negative control)
        for kv in kern_vals:
            Akv = (J @ np.gradient(kv, ts, axis=0).T).T + \
                np.einsum("tij,tj->ti", sig_vals, kv)
            samples.append((kv, Akv))
    for i, (xi, Axi) in enumerate(samples):
        nx, nax = l2(xi), l2(Axi)
        if nx < 1e-12:
            continue
        ineq1 = nax + tol * max(1.0, nax) >= iota * nx
        lhs2 = nax ** 2
        rhs2 = iota * inner(Axi, xi)
        ineq2 = lhs2 + tol * max(1.0, lhs2) >= rhs2
        if not (ineq1 and ineq2):
            failures.append({"test": i, "norm_Axi": nax, "norm_xi": nx,
                             "iota": iota, "ineq1": bool(ineq1),
                             "ineq2": bool(ineq2)})
    return len(failures) == 0, {"iota": iota, "num_tests": num_tests,
                                "failures": failures}
