"""Facial reduction for standard-form programs that lack a strictly feasible slack.

Each round solves the auxiliary program

    minimize t   s.t.   h - G x + t e in cone,   A x = b,   t >= -1

where ``e`` is the cone identity. An optimal ``t < 0`` means the slack cone
has an interior feasible point. A zero optimum comes with a dual multiplier
``z`` that exposes a proper face of the cone containing every feasible slack.
Those directions are moved into equality rows and the round repeats. The
decision variables are never transformed, so solutions of the reduced program
are solutions of the original.

Interior-point solvers lose accuracy on programs without a Slater point. This
module lets the package compute optimal values of such programs (for example
both sides of a pair with a positive duality gap) to solver accuracy.
"""

from dataclasses import dataclass, field

import numpy as np

from .cones import ORTHANT, ConeProduct, Orthant, Psd, smat, svec
from .operators import LinOp
from .solver import (OPTIMAL, PRIMAL_INFEASIBLE, UNKNOWN, SolverOptions, StandardProgram, _identity,
                     congruence_matrix, solve)

FR_TOL = 1e-7
FR_EQ_TOL = 1e-6


@dataclass
class FRResult:
    status: str
    value: float
    x: np.ndarray
    steps: int
    result: object
    program: StandardProgram
    margins: list = field(default_factory=list)


def _aux_program(prog):
    m, n = prog.G.shape
    e = _identity(prog.cone)
    G = np.zeros((m + 1, n + 1))
    G[:m, :n] = prog.G.matrix
    G[:m, n] = -e
    G[m, n] = -1.0
    h = np.concatenate([prog.h, [1.0]])
    A = np.hstack([prog.A_eq.matrix, np.zeros((prog.A_eq.rows, 1))])
    q = np.zeros(n + 1)
    q[n] = 1.0
    cone = ConeProduct(list(prog.cone.blocks) + [Orthant(1)])
    return StandardProgram(q, LinOp(G), h, cone, LinOp(A), prog.b_eq)


def slater_margin(prog, opts=None):
    """Solve the auxiliary program; returns ``(t_star, aux_result)``.

    ``t_star`` is +inf when the equality rows are inconsistent.
    """
    opts = opts or SolverOptions()
    res = solve(_aux_program(prog), SolverOptions(opts.feas_tol, min(opts.gap_tol, 1e-10), opts.max_iter, FR_EQ_TOL))
    if res.status == PRIMAL_INFEASIBLE:
        return np.inf, res
    return float(res.primal_obj), res


SNAP_TOL = 1e-4


def _exposed_split(prog, s, z):
    """Per block, the kept basis and the exposed part, or None if nothing is exposed.

    Exposed directions are those where the multiplier dominates the slack.
    """
    plan, any_exposed = [], False
    for blk, sl in zip(prog.cone, prog.cone.slices()):
        if blk.kind == ORTHANT:
            exposed = z[sl] > np.maximum(s[sl], 1e-12)
            plan.append(("o", exposed, np.where(exposed, z[sl], 0.0)))
            any_exposed |= bool(np.any(exposed))
        else:
            zeta, Q = np.linalg.eigh(smat(z[sl]))
            S = smat(s[sl])
            sig = np.einsum("ij,ik,kj->j", Q, S, Q)
            exposed = zeta > np.maximum(sig, 1e-12)
            plan.append(("p", Q[:, exposed], zeta[exposed]))
            any_exposed |= bool(np.any(exposed))
    return plan if any_exposed else None


def _thin(plan, frac):
    """Keep only candidates whose multiplier is at least ``frac`` of the largest."""
    top = max((float(np.max(w)) for _, _, w in plan if w.size), default=0.0)
    out = []
    for kind, data, w in plan:
        keep = w >= frac * top
        if kind == "o":
            out.append((kind, data & keep, np.where(keep, w, 0.0)))
        else:
            out.append((kind, data[:, keep], w[keep]))
    return out


def _choose_face(prog, plan):
    """Prefer a snapped, exactly certified exposed set; fall back to the raw one."""
    for frac in (0.0, 1e-6, 1e-3, 1e-1):
        cand = _thin(plan, frac)
        snapped = [(k, _snap(d) if k == "p" else d, w) for k, d, w in cand]
        if _certify(prog, snapped):
            return snapped, True
    return plan, False


def _snap(V):
    """Zero tiny entries of an orthonormal basis and re-orthonormalize."""
    if V.shape[1] == 0:
        return V
    W = np.where(np.abs(V) < SNAP_TOL, 0.0, V)
    Qr, Rr = np.linalg.qr(W)
    if np.min(np.abs(np.diag(Rr))) < 0.5:
        return V
    return np.where(np.abs(Qr) < 1e-15, 0.0, Qr)


def _certify(prog, plan):
    """Look for an exact exposing vector supported on the planned exposed parts.

    Solves the linear conditions ``G'z + A'y = 0``, ``h'z + b'y = 0`` and
    ``<e, z> = 1`` with ``z`` restricted to the exposed directions, then checks
    that the restricted multiplier is positive definite.
    """
    G, h = prog.G.matrix, prog.h
    cols, norm_row, pieces = [], [], []
    for (kind, data, _), blk, sl in zip(plan, prog.cone, prog.cone.slices()):
        if kind == "o":
            idx = np.flatnonzero(data) + sl.start
            for i in idx:
                cols.append(np.concatenate([G[i], [h[i]]]))
                norm_row.append(1.0)
            pieces.append(("o", len(idx)))
        else:
            V = data
            k = V.shape[1]
            iu, ju = np.triu_indices(k)
            for a, b in zip(iu, ju):
                E = np.outer(V[:, a], V[:, b])
                E = E + E.T if a != b else E
                if a != b:
                    E = E / np.sqrt(2.0)
                ev = svec(E)
                cols.append(np.concatenate([G[sl].T @ ev, [h[sl] @ ev]]))
                norm_row.append(np.trace(E))
            pieces.append(("p", k))
    if not cols:
        return False
    Mz = np.column_stack(cols)
    My = np.vstack([prog.A_eq.matrix.T, prog.b_eq[None, :]])
    M = np.hstack([Mz, My])
    M = np.vstack([M, np.concatenate([norm_row, np.zeros(My.shape[1])])])
    rhs = np.zeros(M.shape[0])
    rhs[-1] = 1.0
    sol, *_ = np.linalg.lstsq(M, rhs, rcond=None)
    if np.linalg.norm(M @ sol - rhs) > 1e-10 * (1.0 + np.linalg.norm(sol)):
        return False
    w = sol[: Mz.shape[1]]
    pos = 0
    floor = 1e-9 * max(1.0, float(np.max(np.abs(w))))
    for kind, k in pieces:
        if kind == "o":
            if k and np.min(w[pos:pos + k]) <= floor:
                return False
            pos += k
        else:
            d = k * (k + 1) // 2
            if k and np.linalg.eigvalsh(smat(w[pos:pos + d]))[0] <= floor:
                return False
            pos += d
    return True


def _restrict(prog, plan):
    G, h = prog.G.matrix, prog.h
    rows_G, rows_h, blocks = [], [], []
    eq_G, eq_h = [prog.A_eq.matrix], [prog.b_eq]
    for (kind, data, _), blk, sl in zip(plan, prog.cone, prog.cone.slices()):
        Gb, hb = G[sl], h[sl]
        if kind == "o":
            keep = ~data
            if np.any(keep):
                rows_G.append(Gb[keep])
                rows_h.append(hb[keep])
                blocks.append(Orthant(int(np.sum(keep))))
            eq_G.append(Gb[~keep])
            eq_h.append(hb[~keep])
        else:
            V = data
            r = blk.size - V.shape[1]
            Q = np.hstack([_complement(V, blk.size), V])
            T = congruence_matrix(Q.T)
            iu, ju = np.triu_indices(blk.size)
            inner = (iu < r) & (ju < r)
            if r > 0:
                rows_G.append(T[inner] @ Gb)
                rows_h.append(T[inner] @ hb)
                blocks.append(Psd(r))
            eq_G.append(T[~inner] @ Gb)
            eq_h.append(T[~inner] @ hb)
    n = G.shape[1]
    if not blocks:
        # keep the slack cone non-empty with a trivially satisfied row
        rows_G.append(np.zeros((1, n)))
        rows_h.append(np.ones(1))
        blocks.append(Orthant(1))
    return StandardProgram(prog.objective, LinOp(np.vstack(rows_G)), np.concatenate(rows_h), ConeProduct(blocks),
                           LinOp(np.vstack(eq_G)), np.concatenate(eq_h))


def _complement(V, m):
    if V.shape[1] == 0:
        return np.eye(m)
    if V.shape[1] == m:
        return np.zeros((m, 0))
    U, _, _ = np.linalg.svd(V, full_matrices=True)
    C = U[:, V.shape[1]:]
    # prefer coordinate vectors when the exposed part is coordinate aligned
    P = np.eye(m) - V @ V.T
    cand = [i for i in range(m) if abs(P[i, i] - 1.0) < 1e-14]
    if len(cand) == m - V.shape[1]:
        return np.eye(m)[:, cand]
    return C


def reduce_program(prog, opts=None, fr_tol=FR_TOL):
    """Run facial reduction until the slack cone has a Slater point.

    Returns ``(program, status, margins)`` where status is ``"Slater"``,
    ``"Infeasible"`` or ``"Stalled"``.
    """
    margins = []
    limit = sum(b.dim for b in prog.cone) + 1
    for _ in range(limit):
        t, aux = slater_margin(prog, opts)
        margins.append(t)
        scale = 1.0 + float(np.max(np.abs(prog.h), initial=0.0))
        if t < -fr_tol * scale:
            return prog, "Slater", margins
        if t > fr_tol * scale:
            return prog, "Infeasible", margins
        m = prog.G.rows
        plan = _exposed_split(prog, aux.s[:m], aux.z[:m])
        if plan is None:
            return prog, "Stalled", margins
        plan, _ = _choose_face(prog, plan)
        prog = _restrict(prog, plan)
    return prog, "Stalled", margins


def solve_with_reduction(prog, opts=None, fr_tol=FR_TOL):
    """Minimize over the original feasible set after facial reduction."""
    opts = opts or SolverOptions()
    reduced, how, margins = reduce_program(prog, opts, fr_tol)
    n = prog.objective.size
    if how == "Infeasible":
        return FRResult(PRIMAL_INFEASIBLE, np.inf, np.full(n, np.nan), len(margins) - 1, None, reduced, margins)
    res = solve(reduced, SolverOptions(opts.feas_tol, opts.gap_tol, opts.max_iter, FR_EQ_TOL, opts.verbose))
    status = res.status
    value = res.primal_obj if status in (OPTIMAL, UNKNOWN) else (np.inf if status == PRIMAL_INFEASIBLE else -np.inf)
    return FRResult(status, float(value), res.x, len(margins) - 1, res, reduced, margins)
