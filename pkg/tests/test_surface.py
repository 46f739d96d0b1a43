import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from moduli_lab import (CentralRep, NotCentral, SurfacePresentation, TwistedComplex, build_complex,
                        find_central_rep, lie_context, relator_eval, stabilizer_group)
from moduli_lab.lie import PAULI

E1, E2, E3 = np.eye(3)
PAULI_PAIR = (1j * PAULI[0], 1j * PAULI[1])


def rep_of(gid, genus, strategy, seed=0, **kw):
    return find_central_rep(lie_context(gid), genus, strategy, rng=np.random.default_rng(seed), **kw)


def relator_log(rep, u):
    """Oracle: log(r(rho exp(u)) c^{-1}) evaluated directly on matrices."""
    ctx, n = rep.context, rep.context.dim
    imgs = [a @ ctx.exp(u[s * n:(s + 1) * n]) for s, a in enumerate(rep.images)]
    return ctx.log(relator_eval(imgs) @ np.linalg.inv(rep.central_target))


@pytest.mark.parametrize("genus", [1, 2, 3])
def test_presentation(genus):
    P = SurfacePresentation(genus)
    assert len(P.relator) == 4 * genus
    assert P.generators[:2] == ["a1", "b1"]
    # abelianization of the relator vanishes
    for s in range(2 * genus):
        assert sum(e for g, e in P.relator if g == s) == 0
    with pytest.raises(ValueError):
        SurfacePresentation(0)


def test_relator_eval_examples():
    L = lie_context("su2")
    assert np.allclose(relator_eval([L.identity] * 4), np.eye(2))
    assert np.allclose(relator_eval(PAULI_PAIR), -np.eye(2))
    direct = PAULI_PAIR[0] @ PAULI_PAIR[1] @ np.linalg.inv(PAULI_PAIR[0]) @ np.linalg.inv(PAULI_PAIR[1])
    assert np.allclose(relator_eval(PAULI_PAIR), direct)
    assert np.allclose(relator_eval([L.exp(0.3 * E3), L.exp(1.2 * E3)]), np.eye(2))


def test_central_rep_invariants():
    for gid, g, strat, kw in [("su2", 1, "pauli-genus1", {}), ("u2", 2, "random-polish", {"central_target": [np.pi]}),
                              ("su2", 2, "random-polish", {"twist": 1}), ("u1", 2, "diagonal", {})]:
        rep = rep_of(gid, g, strat, **kw)
        ctx = rep.context
        assert rep.defect <= 1e-10
        assert ctx.is_central(rep.central_target)
        # X_xi lies in the center
        for e in np.eye(ctx.dim):
            assert np.linalg.norm(ctx.bracket(rep.X_xi_algebra, e)) <= 1e-12


def test_trivial_rep_complex():
    for gid, genus in [("su2", 1), ("su2", 3), ("u2", 2), ("u1", 2)]:
        K = build_complex(rep_of(gid, genus, "trivial"))
        n = K.n
        assert np.all(K.D0 == 0) and np.all(K.D1 == 0)
        assert K.betti() == (n, 2 * genus * n, n)


def test_diagonal_genus1_betti():
    L = lie_context("su2")
    rep = CentralRep(L, (L.exp(0.4 * E3), L.exp(1.3 * E3)), [])
    assert build_complex(rep).betti() == (1, 2, 1)


def test_not_central():
    L = lie_context("su2")
    rep = CentralRep(L, (L.exp(0.4 * E1), L.exp(0.3 * E2)), [])
    assert rep.defect > 0.1
    with pytest.raises(NotCentral):
        build_complex(rep)
    # forcing the construction shows the complex breaks down
    K = TwistedComplex(rep, defect_tol=1.0)
    assert np.linalg.norm(K.D1 @ K.D0) > 1e-3


@pytest.mark.parametrize("gid", ["u1", "su2", "u2", "o2"])
def test_D1_is_linearized_relator(gid):
    rng = np.random.default_rng(4)
    for genus in (1, 2):
        rep = rep_of(gid, genus, "random-polish", seed=genus)
        K = build_complex(rep)
        u = rng.standard_normal(K.dim1)
        t = 1e-5
        fd = (relator_log(rep, t * u) - relator_log(rep, -t * u)) / (2 * t)
        assert np.linalg.norm(fd - K.D1 @ u) <= 1e-6 * max(1.0, np.linalg.norm(K.D1 @ u))
        # D0 is the derivative of conjugating all images by exp(t phi)
        phi = rng.standard_normal(K.n)
        ctx = rep.context
        g = ctx.exp(t * phi)
        moved = [g @ a @ np.linalg.inv(g) for a in rep.images]
        fd0 = np.concatenate([ctx.log(np.linalg.inv(a) @ b) for a, b in zip(rep.images, moved)]) / t
        assert np.linalg.norm(fd0 - K.D0 @ phi) <= 1e-4 * max(1.0, np.linalg.norm(K.D0 @ phi))


@pytest.mark.parametrize("gid", ["su2", "u2"])
def test_cup_bracket_is_second_order_relator_term(gid):
    rng = np.random.default_rng(5)
    rep = rep_of(gid, 2, "random-polish", seed=3)
    K = build_complex(rep)
    u = rng.standard_normal(K.dim1)
    t = 1e-3
    second = (relator_log(rep, t * u) + relator_log(rep, -t * u)) / (t * t)
    assert np.linalg.norm(second - K.cup_bracket(u, u)) <= 1e-4 * np.linalg.norm(K.cup_bracket(u, u))


def test_trivial_rep_cup_formulas():
    rng = np.random.default_rng(6)
    L = lie_context("su2")
    K = build_complex(rep_of("su2", 2, "trivial"))
    u, v = rng.standard_normal((2, 12))
    x, y = u.reshape(2, 2, 3)[:, 0], u.reshape(2, 2, 3)[:, 1]
    xp, yp = v.reshape(2, 2, 3)[:, 0], v.reshape(2, 2, 3)[:, 1]
    expected = sum(L.inner(x[i], yp[i]) - L.inner(y[i], xp[i]) for i in range(2))
    assert abs(K.cup_sigma(u, v) - expected) <= 1e-12
    expected_b = 2 * sum(L.bracket(x[i], y[i]) for i in range(2))
    assert np.linalg.norm(K.cup_bracket(u, u) - expected_b) <= 1e-12


def test_u1_bracket_vanishes():
    K = build_complex(rep_of("u1", 3, "diagonal"))
    assert np.all(K.bracket_tensor == 0)


def _complexes():
    return [build_complex(rep_of(g, genus, s, seed=genus, **kw)) for g, genus, s, kw in [
        ("su2", 2, "random-polish", {}), ("su2", 2, "diagonal", {}), ("u2", 2, "random-polish", {}),
        ("u2", 1, "random-polish", {"central_target": [np.pi]}), ("su2", 3, "random-polish", {"twist": 1}),
        ("o2", 2, "random-polish", {}), ("u1", 2, "diagonal", {})]]


COMPLEXES = _complexes()


@pytest.mark.parametrize("K", COMPLEXES, ids=lambda K: f"{K.context.group_id}-g{K.genus}")
@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_pairing_axioms(K, seed):
    rng = np.random.default_rng(seed)
    u, v, w = rng.standard_normal((3, K.dim1))
    phi, psi, beta = rng.standard_normal((3, K.n))
    assert abs(K.cup_sigma(u, u)) <= 1e-12 * np.dot(u, u)
    assert abs(K.cup_sigma(u, v) + K.cup_sigma(v, u)) <= 1e-12
    assert np.linalg.norm(K.cup_bracket(u, v) - K.cup_bracket(v, u)) <= 1e-12
    # bilinearity
    assert abs(K.cup_sigma(2 * u + w, v) - 2 * K.cup_sigma(u, v) - K.cup_sigma(w, v)) <= 1e-10
    # Stokes with the package sign convention
    assert abs(K.pair02(phi, K.D1 @ u) - K.cup_sigma(K.D0 @ phi, u)) <= 1e-10
    # ad-invariance, pointwise placements
    assert abs(K.pair02(K.bracket0(phi, psi), beta) - K.pair02(phi, K.bracket0(psi, beta))) <= 1e-10
    # placements involving 1-cochains, for phi in z_A
    for z in K.kernel0():
        assert abs(K.pair02(z, K.cup_bracket(u, v)) + K.cup_sigma(u, K.bracket01(z, v))) <= 1e-10
        assert abs(K.cup_sigma(K.bracket01(z, u), v) + K.cup_sigma(u, K.bracket01(z, v))) <= 1e-10


def test_pair02_examples():
    K = build_complex(rep_of("su2", 2, "trivial"))
    for j, k in np.ndindex(3, 3):
        assert K.pair02(np.eye(3)[j], np.eye(3)[k]) == float(j == k)
    assert K.pair02(np.zeros(3), np.ones(3)) == 0.0


@pytest.mark.parametrize("K", COMPLEXES, ids=lambda K: f"{K.context.group_id}-g{K.genus}")
def test_equivariance_and_kernel(K):
    rng = np.random.default_rng(7)
    zA, samples = stabilizer_group(K.rep, rng)
    assert len(samples) == 32
    u, v = rng.standard_normal((2, K.dim1))
    phi, beta = rng.standard_normal((2, K.n))
    for z in samples:
        for a in K.rep.images:
            assert np.linalg.norm(z @ a - a @ z) <= 1e-10
        A0, A1 = K.action(z, 0), K.action(z, 1)
        assert np.linalg.norm(K.D0 @ A0 - A1 @ K.D0) <= 1e-10
        assert np.linalg.norm(K.D1 @ A1 - A0 @ K.D1) <= 1e-10
        assert abs(K.cup_sigma(A1 @ u, A1 @ v) - K.cup_sigma(u, v)) <= 1e-10
        assert abs(K.pair02(A0 @ phi, A0 @ beta) - K.pair02(phi, beta)) <= 1e-10
        assert np.linalg.norm(K.cup_bracket(A1 @ u, A1 @ v) - A0 @ K.cup_bracket(u, v)) <= 1e-10
    # z_A equals ker D0 and the joint centralizer
    ker = K.kernel0()
    cen = K.context.centralizer_algebra(K.rep.images)
    assert ker.shape == cen.shape == zA.shape
    if ker.shape[0]:
        proj = lambda b: b.T @ np.linalg.pinv(b.T)
        assert np.linalg.norm(proj(ker) - proj(cen)) <= 1e-10
    assert K.betti()[0] == zA.shape[0] == K.betti()[2]


def test_stabilizer_examples():
    L = lie_context("su2")
    zA, samples = stabilizer_group(rep_of("su2", 2, "trivial"))
    assert zA.shape[0] == 3
    assert any(np.linalg.norm(s - np.eye(2)) > 1e-3 and np.linalg.norm(s + np.eye(2)) > 1e-3 for s in samples)
    zA, samples = stabilizer_group(rep_of("su2", 1, "pauli-genus1"))
    assert zA.shape[0] == 0
    distinct = {tuple(np.round(s, 12).ravel()) for s in samples}
    assert distinct == {tuple(np.eye(2, dtype=complex).ravel()), tuple(-np.eye(2, dtype=complex).ravel())}
    rep = CentralRep(L, (L.exp(0.4 * E3), L.exp(1.3 * E3)), [])
    assert stabilizer_group(rep)[0].shape[0] == 1
