import numpy as np
import pytest
from hypothesis import given, strategies as st

from floerss import symplin as sl
from floerss.errors import NotFullRank, NotIsotropic, NotSymmetric, StepTooLarge

from conftest import make_rng, random_lagrangian, random_sigma_poly


def test_validate_standard_frames():
    F = sl.validate_lagrangian(np.vstack([np.eye(2), np.zeros((2, 2))]))
    assert F.equals(sl.horizontal(2))
    G = sl.validate_lagrangian(np.vstack([np.zeros((2, 2)), np.eye(2)]))
    assert G.equals(sl.vertical(2))


def test_validate_diagonal_line():
    F = sl.validate_lagrangian(np.array([[1.0], [1.0]]))
    assert abs(np.linalg.norm(F.frame) - 1.0) < 1e-12


def test_validate_rejects_rank_deficient():
    M = np.ones((4, 2))
    with pytest.raises(NotFullRank):
        sl.validate_lagrangian(M)


def test_validate_rejects_non_isotropic():
    # span(e1, e3) in R^4 coordinates (x1,x2,y1,y2): omega(e1, e3) = 1
    M = np.zeros((4, 2))
    M[0, 0] = 1.0
    M[2, 1] = 1.0
    with pytest.raises(NotIsotropic) as err:
        sl.validate_lagrangian(M)
    assert err.value.payload["max_pairing"] > 0.5


def test_intersection_dims():
    assert sl.intersection_dim(sl.horizontal(3), sl.vertical(3)) == 0
    assert sl.intersection_dim(sl.horizontal(3), sl.horizontal(3)) == 3
    h = sl.horizontal(1)
    assert sl.intersection_dim(h, sl.rotate_frame(h, np.pi / 3)) == 0
    assert sl.intersection_dim(h, sl.rotate_frame(h, np.pi)) == 1


def test_intersection_dim_symmetric_and_frame_invariant():
    rng = make_rng(1)
    for _ in range(20):
        n = int(rng.integers(1, 4))
        F = random_lagrangian(rng, n)
        G = random_lagrangian(rng, n)
        assert sl.intersection_dim(F, G) == sl.intersection_dim(G, F)
        # change spanning frame: multiply by an invertible n x n matrix
        A = rng.standard_normal((n, n)) + 2 * np.eye(n)
        F2 = sl.validate_lagrangian(F.frame @ A)
        assert sl.intersection_dim(F2, G) == sl.intersection_dim(F, G)


def test_graph_lagrangian_examples():
    assert sl.graph_lagrangian(np.zeros((2, 2))).equals(sl.horizontal(2))
    F = sl.graph_lagrangian(np.array([[1.0]]))
    assert sl.intersection_dim(F, sl.validate_lagrangian(
        np.array([[1.0], [1.0]]))) == 1
    G = sl.graph_lagrangian(np.diag([1.0, -1.0]))
    target = np.array([[1, 0], [0, 1], [1, 0], [0, -1]], dtype=float)
    assert G.equals(sl.validate_lagrangian(target))


def test_graph_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        sl.graph_lagrangian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_frames_isotropic_property():
    rng = make_rng(2)
    for _ in range(30):
        n = int(rng.integers(1, 5))
        F = random_lagrangian(rng, n)
        pairing = F.frame.T @ sl.J_std(n) @ F.frame
        assert np.max(np.abs(pairing)) < 1e-9


def test_fundamental_solution_zero_generator():
    psi = sl.fundamental_solution(sl.zero_path(2), 1.0)
    assert np.max(np.abs(psi.entries - np.eye(4))) < 1e-12


def test_fundamental_solution_constant_multiple():
    # J dPsi + cI Psi = 0 integrates to the rotation e^{ctJ}; the defining
    # ODE residual is the oracle for the sign
    c = 0.7
    sig = sl.constant_path(c * np.eye(2))
    psi = sl.fundamental_solution(sig, 1.0)
    assert np.max(np.abs(psi.entries - sl.rotation(1, c))) < 1e-10
    flow = sl.FundamentalFlow(random_sigma_poly(make_rng(3), 1))
    h = 1e-6
    for t in (0.25, 0.5, 0.75):
        dPsi = (flow(t + h) - flow(t - h)) / (2 * h)
        res = sl.J_std(1) @ dPsi + flow.sigma(t) @ flow(t)
        assert np.max(np.abs(res)) < 1e-8


def test_fundamental_solution_delta_shift_path():
    # the shifted-by-(-delta) zero path integrates to clockwise rotation
    delta = 0.3
    sig = sl.constant_path(-delta * np.eye(2))
    psi = sl.fundamental_solution(sig, 1.0)
    assert np.max(np.abs(psi.entries - sl.rotation(1, -delta))) < 1e-10


def test_fundamental_solution_symplectic_drift():
    rng = make_rng(4)
    sig = random_sigma_poly(rng, 2, degree=2)
    psi = sl.fundamental_solution(sig, 1.0)
    assert psi.drift() < 1e-9


def test_fundamental_solution_order_four():
    rng = make_rng(5)
    sig = random_sigma_poly(rng, 1, degree=2)
    ref = sl.fundamental_solution(sig, 1.0, step=1e-4).entries
    errs = []
    for step in (4e-2, 2e-2, 1e-2):
        got = sl.fundamental_solution(sig, 1.0, step=step).entries
        errs.append(np.max(np.abs(got - ref)))
    rate1 = np.log2(errs[0] / errs[1])
    rate2 = np.log2(errs[1] / errs[2])
    assert rate1 > 3.5 and rate2 > 3.5


def test_step_too_large():
    sig = sl.constant_path(80.0 * np.eye(2))
    with pytest.raises(StepTooLarge):
        sl.fundamental_solution(sig, 1.0, step=0.25,
                                settings=sl.DEFAULTS.with_(project_every=4))


def test_phi_mu_examples():
    assert np.max(np.abs(sl.phi_mu(2, 0, 0.7) - np.eye(4))) < 1e-12
    P = sl.phi_mu(1, 1, 1.0)
    assert np.max(np.abs(P + np.eye(2))) < 1e-12
    Q = sl.phi_mu(2, 2, 0.5)
    v = np.array([1.0, 0, 0, 0])
    assert np.max(np.abs(Q @ v + v)) < 1e-12          # first coordinate flipped
    w = np.array([0, 1.0, 0, 0])
    assert np.max(np.abs(Q @ w - w)) < 1e-12          # others fixed


def test_mu_action_identity_and_inverse():
    rng = make_rng(6)
    sig = random_sigma_poly(rng, 2)
    same = sl.mu_action(0, sig)
    back = sl.mu_action(-3, sl.mu_action(3, sig))
    for t in np.linspace(0, 1, 7):
        assert np.max(np.abs(same(t) - sig(t))) < 1e-12
        assert np.max(np.abs(back(t) - sig(t))) < 1e-9


def test_mu_action_explicit_n1():
    sig = sl.mu_action(1, sl.zero_path(1))
    for t in (0.0, 0.5, 1.0):
        assert np.max(np.abs(sig(t) + np.pi * np.eye(2))) < 1e-12


@given(st.integers(-3, 3), st.integers(-3, 3))
def test_mu_action_group_property(mu1, mu2):
    rng = make_rng(abs(mu1) * 10 + abs(mu2))
    sig = random_sigma_poly(rng, 1)
    lhs = sl.mu_action(mu1, sl.mu_action(mu2, sig))
    rhs = sl.mu_action(mu1 + mu2, sig)
    for t in (0.0, 0.33, 1.0):
        assert np.max(np.abs(lhs(t) - rhs(t))) < 1e-9


def test_direct_sum_frames_matches_block_J():
    rng = make_rng(7)
    F = random_lagrangian(rng, 1)
    G = random_lagrangian(rng, 2)
    S = sl.direct_sum_frames(F, G)
    assert S.n == 3
    pairing = S.frame.T @ sl.J_std(3) @ S.frame
    assert np.max(np.abs(pairing)) < 1e-9
