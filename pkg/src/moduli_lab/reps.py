"""Construction and Newton polishing of central representations."""

from __future__ import annotations

import numpy as np

from .errors import BranchAmbiguity, Infeasible, NoConvergence
from .lie import LieContext, PAULI, numerical_rank
from .surface import CentralRep, relator_eval

# polish well below the admission tolerance so downstream residuals stay small
POLISH_TARGET = 1e-13

STRATEGIES = ("trivial", "diagonal", "pauli-genus1", "random-polish", "from-file")


def relator_residual(ctx: LieContext, images, c_inv: np.ndarray) -> np.ndarray:
    """``log(relator(images) c^{-1})`` as algebra coordinates."""
    return ctx.log(relator_eval(images) @ c_inv)


def _perturbed(ctx, images, delta):
    n = ctx.dim
    return [a @ ctx.exp(delta[k * n:(k + 1) * n]) for k, a in enumerate(images)]


def fd_jacobian(ctx: LieContext, images, c_inv, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the relator residual in right-trivialized coordinates."""
    dim1 = len(images) * ctx.dim
    cols = []
    for k in range(dim1):
        e = np.zeros(dim1)
        e[k] = step
        fp = relator_residual(ctx, _perturbed(ctx, images, e), c_inv)
        fm = relator_residual(ctx, _perturbed(ctx, images, -e), c_inv)
        cols.append((fp - fm) / (2 * step))
    return np.column_stack(cols)


def defect(images, c: np.ndarray) -> float:
    return float(np.linalg.norm(relator_eval(images) @ np.linalg.inv(c) - np.eye(c.shape[0])))


def newton_polish(ctx: LieContext, images, c: np.ndarray, *, target: float = 1e-10,
                  max_iter: int = 50, accept: float | None = None) -> tuple[list, float, int]:
    """Drive ``relator(images)`` to ``c`` by damped Gauss-Newton.

    Steps are ``-pinv(J) F`` with ``J`` the finite-difference Jacobian,
    applied as ``images[s] <- images[s] exp(delta_s)`` and halved until the
    residual decreases.  Returns ``(images, defect, iterations)``.  When
    the iteration stalls above ``target`` the current point is still
    returned if its defect is below ``accept``; otherwise NoConvergence.
    """
    accept = target if accept is None else max(accept, target)
    c_inv = np.linalg.inv(c)
    images = [np.asarray(a, dtype=complex) for a in images]
    try:
        f = relator_residual(ctx, images, c_inv)
    except BranchAmbiguity as exc:
        raise NoConvergence("starting point outside the principal branch") from exc
    d = defect(images, c)
    for it in range(max_iter + 1):
        if d <= target:
            return images, d, it
        if it == max_iter:
            break
        jac = fd_jacobian(ctx, images, c_inv)
        s = np.linalg.svd(jac, compute_uv=False)
        r = numerical_rank(s)
        rcond = s[r - 1] / s[0] * 0.999 if r else 1.0
        step = -np.linalg.pinv(jac, rcond=rcond) @ f
        t = 1.0
        for _ in range(30):
            trial = _perturbed(ctx, images, t * step)
            try:
                ft = relator_residual(ctx, trial, c_inv)
            except BranchAmbiguity:
                t *= 0.5
                continue
            if np.linalg.norm(ft) < np.linalg.norm(f) or np.linalg.norm(ft) <= target:
                break
            t *= 0.5
        else:
            break
        images, f = trial, ft
        d = defect(images, c)
    if d <= accept:
        return images, d, it
    raise NoConvergence(f"relator polish stalled at defect {d:.3e}")


def _feasible_target(ctx: LieContext, c: np.ndarray) -> bool:
    # the relator is a product of commutators, so it lies in the commutator subgroup
    if ctx.is_abelian and ctx.is_real is False:
        return np.linalg.norm(c - ctx.identity) <= 1e-12
    return abs(np.linalg.det(c) - 1) <= 1e-10


def find_central_rep(ctx: LieContext, genus: int, strategy: str, *, central_target=None,
                     twist: int | None = None, rng: np.random.Generator | None = None,
                     max_restarts: int = 20) -> CentralRep:
    """Produce a central representation by the named strategy.

    ``central_target`` gives the center coordinates of ``X_xi`` and ``twist``
    indexes the context's listed central elements; leaving both unset lets
    the strategy pick its natural target (the identity, or ``-I`` for
    ``pauli-genus1``).
    """
    if strategy not in STRATEGIES or strategy == "from-file":
        raise ValueError(f"strategy {strategy!r} cannot be run here; choose from {STRATEGIES[:-1]}")
    if genus < 1:
        raise ValueError("genus must be at least 1")
    rng = np.random.default_rng(0) if rng is None else rng
    nz = ctx.center_basis.shape[0]

    if strategy == "pauli-genus1" and central_target is None and twist is None:
        if genus != 1 or ctx.size != 2 or ctx.is_real:
            raise Infeasible("pauli-genus1 needs genus 1 and a 2x2 complex backend")
        central_target, twist = ctx.split_central(-ctx.identity)
    X = np.zeros(nz) if central_target is None else np.asarray(central_target, dtype=float)
    twist = 0 if twist is None else int(twist)
    if X.shape != (nz,):
        raise Infeasible(f"{ctx.group_id} has a {nz}-dimensional center; got {X.size} target coordinates")
    if not 0 <= twist < len(ctx.center_elements):
        raise Infeasible(f"twist {twist} out of range for {ctx.group_id}")
    c = ctx.central_element(X, twist)
    if not _feasible_target(ctx, c):
        raise Infeasible(f"{ctx.group_id}: no product of commutators equals the requested central element")
    is_identity = np.linalg.norm(c - ctx.identity) <= 1e-12

    if strategy == "trivial":
        if not is_identity:
            raise Infeasible("the trivial representation has relator value I")
        images = [ctx.identity] * (2 * genus)
    elif strategy == "diagonal":
        if not is_identity:
            raise Infeasible("commuting (diagonal) tuples have relator value I")
        images = [_torus_element(ctx, rng) for _ in range(2 * genus)]
    elif strategy == "pauli-genus1":
        if genus != 1 or ctx.size != 2 or ctx.is_real:
            raise Infeasible("pauli-genus1 needs genus 1 and a 2x2 complex backend")
        images = [1j * PAULI[0], 1j * PAULI[1]]
        if np.linalg.norm(relator_eval(images) - c) > 1e-12:
            raise Infeasible("the Pauli pair has relator value -I")
    else:
        images = None
        last = None
        for _ in range(max_restarts):
            start = [ctx.random_element(rng, scale=1.0) for _ in range(2 * genus)]
            try:
                images, _, _ = newton_polish(ctx, start, c, target=POLISH_TARGET, accept=1e-10)
                break
            except NoConvergence as exc:
                last = exc
        if images is None:
            raise NoConvergence(f"random-polish failed after {max_restarts} restarts: {last}")
    rep = CentralRep(ctx, tuple(images), X, twist)
    if rep.defect > 1e-10:
        raise NoConvergence(f"representation defect {rep.defect:.3e}")
    return rep


def _torus_element(ctx: LieContext, rng) -> np.ndarray:
    """Random element of the diagonal maximal torus."""
    if ctx.is_real:
        # rotations only: a reflection does not commute with the other images
        return ctx.exp(rng.uniform(-np.pi, np.pi, ctx.dim))
    diag_dirs = [e for e in ctx.basis if np.allclose(e, np.diag(np.diag(e)))]
    m = sum(rng.uniform(-np.pi, np.pi) * e for e in diag_dirs)
    return np.diag(np.exp(np.diag(m)))
