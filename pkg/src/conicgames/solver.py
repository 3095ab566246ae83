"""Primal-dual interior-point solver for orthant/PSD conic programs.

Standard form::

    minimize    q'x
    subject to  G x + s = h,   s in cone
                A x = b

with dual ``maximize -h'z - b'y  s.t.  G'z + A'y + q = 0,  z in cone``.

The method is the homogeneous self-dual embedding with Nesterov-Todd scaling
and a Mehrotra predictor-corrector, in the style of CVXOPT's ``conelp``.
The Newton systems are solved with a dense LDL' factorization of the
regularized KKT matrix followed by iterative refinement.
"""

import sys
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .cones import MOMENT, ORTHANT, ConeProduct, Psd, as_product, moment_svec_maps, smat, svec
from .exceptions import DimensionError
from .operators import LinOp

OPTIMAL = "Optimal"
PRIMAL_INFEASIBLE = "PrimalInfeasible"
DUAL_INFEASIBLE = "DualInfeasible"
UNKNOWN = "Unknown"

STEP_FRACTION = 0.99
_SQRT2 = np.sqrt(2.0)


@dataclass
class SolverOptions:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iter: int = 200
    eq_tol: float = 1e-9
    verbose: bool = False


@dataclass(eq=False)
class StandardProgram:
    objective: np.ndarray
    G: LinOp
    h: np.ndarray
    cone: ConeProduct
    A_eq: LinOp = None
    b_eq: np.ndarray = None

    def __post_init__(self):
        self.cone = as_product(self.cone)
        if any(b.kind == MOMENT for b in self.cone):
            raise ValueError("the solver handles orthant and psd blocks only; compile moment blocks first")
        self.objective = np.asarray(self.objective, dtype=float)
        if not isinstance(self.G, LinOp):
            self.G = LinOp(self.G)
        n = self.objective.size
        if self.G.shape != (self.cone.total_dim, n):
            raise DimensionError(f"G is {self.G.shape}, expected ({self.cone.total_dim}, {n})")
        self.h = self.cone.check(self.h, "h")
        if self.A_eq is None:
            self.A_eq = LinOp(np.zeros((0, n)))
            self.b_eq = np.zeros(0)
        elif not isinstance(self.A_eq, LinOp):
            self.A_eq = LinOp(self.A_eq)
        self.b_eq = np.asarray(self.b_eq, dtype=float)
        if self.A_eq.cols != n or self.b_eq.shape != (self.A_eq.rows,):
            raise DimensionError("equality data does not match the decision dimension")

    @property
    def n_free(self):
        return self.objective.size


@dataclass
class SolveResult:
    status: str
    x: np.ndarray
    s: np.ndarray
    z: np.ndarray
    y_eq: np.ndarray
    primal_obj: float
    dual_obj: float
    gap: float
    iterations: int
    pres: float = np.inf
    dres: float = np.inf
    info: dict = field(default_factory=dict)


# -- cone algebra in scaled coordinates ----------------------------------------

def _degree(cone):
    return sum(b.size for b in cone)


def _identity(cone):
    parts = []
    for b in cone:
        parts.append(np.ones(b.size) if b.kind == ORTHANT else svec(np.eye(b.size)))
    return np.concatenate(parts)


def _jordan(cone, u, v):
    out = np.empty_like(u)
    for b, sl in zip(cone, cone.slices()):
        if b.kind == ORTHANT:
            out[sl] = u[sl] * v[sl]
        else:
            U, V = smat(u[sl]), smat(v[sl])
            P = U @ V
            out[sl] = svec(0.5 * (P + P.T))
    return out


def congruence_matrix(P):
    """Matrix of ``X -> P X P'`` acting on svec coordinates."""
    m = P.shape[0]
    iu, ju = np.triu_indices(m)
    out_scale = np.where(iu != ju, _SQRT2, 1.0)
    in_scale = np.where(iu != ju, 1.0 / _SQRT2, 0.5)
    M = P[np.ix_(iu, iu)] * P[np.ix_(ju, ju)] + P[np.ix_(iu, ju)] * P[np.ix_(ju, iu)]
    return out_scale[:, None] * M * in_scale[None, :]


def _sym_factor(S):
    """Some L with S = L L' (Cholesky, falling back to a clipped eigen-root)."""
    try:
        return np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        w, Q = np.linalg.eigh(0.5 * (S + S.T))
        return Q * np.sqrt(np.maximum(w, 1e-300))


class _Scaling:
    """Nesterov-Todd scaling ``W`` with ``W^{-T} s = W z = lam``."""

    def __init__(self, cone, s, z):
        self.cone = cone
        self.blocks = []
        lam = np.empty_like(s)
        for b, sl in zip(cone, cone.slices()):
            if b.kind == ORTHANT:
                w = np.sqrt(s[sl] / z[sl])
                lam[sl] = np.sqrt(s[sl] * z[sl])
                self.blocks.append(("o", w))
            else:
                Ls = _sym_factor(smat(s[sl]))
                Lz = _sym_factor(smat(z[sl]))
                U, sv, Vt = np.linalg.svd(Lz.T @ Ls)
                sv = np.maximum(sv, 1e-300)
                R = Ls @ Vt.T / np.sqrt(sv)
                Rinv = (U.T @ Lz.T) / np.sqrt(sv)[:, None]
                lam[sl] = svec(np.diag(sv))
                self.blocks.append(("p", (R, Rinv, sv)))
        self.lam = lam

    def _map(self, v, which):
        out = np.empty_like(v)
        for (kind, data), sl in zip(self.blocks, self.cone.slices()):
            if kind == "o":
                w = data
                out[sl] = v[sl] / w if which in ("WinvT", "Winv") else v[sl] * w
            else:
                R, Rinv, _ = data
                X = smat(v[sl])
                if which == "WinvT":
                    Y = Rinv @ X @ Rinv.T
                elif which == "Winv":
                    Y = Rinv.T @ X @ Rinv
                else:  # "WT"
                    Y = R @ X @ R.T
                out[sl] = svec(0.5 * (Y + Y.T))
        return out

    def WinvT(self, v):
        return self._map(v, "WinvT")

    def Winv(self, v):
        return self._map(v, "Winv")

    def WT(self, v):
        return self._map(v, "WT")

    def WinvT_matrix(self, G):
        out = np.empty_like(G)
        for (kind, data), sl in zip(self.blocks, self.cone.slices()):
            if kind == "o":
                out[sl] = G[sl] / data[:, None]
            else:
                out[sl] = congruence_matrix(data[1]) @ G[sl]
        return out

    def lam_divide(self, r):
        """Solve ``lam o u = r`` for u."""
        out = np.empty_like(r)
        for (kind, data), sl in zip(self.blocks, self.cone.slices()):
            if kind == "o":
                out[sl] = r[sl] / self.lam[sl]
            else:
                sv = data[2]
                out[sl] = svec(2.0 * smat(r[sl]) / np.add.outer(sv, sv))
        return out

    def max_step(self, d):
        """Largest alpha with ``lam + alpha d`` in the cone (inf if unbounded)."""
        alpha = np.inf
        for (kind, data), sl in zip(self.blocks, self.cone.slices()):
            if kind == "o":
                dd = d[sl]
                neg = dd < 0
                if np.any(neg):
                    alpha = min(alpha, float(np.min(-self.lam[sl][neg] / dd[neg])))
            else:
                isq = 1.0 / np.sqrt(data[2])
                M = smat(d[sl]) * np.outer(isq, isq)
                e = np.linalg.eigvalsh(M)[0]
                if e < 0:
                    alpha = min(alpha, -1.0 / e)
        return alpha


# -- KKT -----------------------------------------------------------------------

class _KKT:
    def __init__(self, A, Gh):
        n, p, m = A.shape[1], A.shape[0], Gh.shape[0]
        K = np.zeros((n + p + m, n + p + m))
        K[n:n + p, :n] = A
        K[n + p:, :n] = Gh
        K[:n, n:n + p] = A.T
        K[:n, n + p:] = Gh.T
        K[n + p:, n + p:] = -np.eye(m)
        self.K0 = K
        scale = max(1.0, float(np.max(np.abs(K))))
        delta = 1e-11 * scale
        Kr = K.copy()
        Kr[np.arange(n), np.arange(n)] += delta
        Kr[n + np.arange(p), n + np.arange(p)] -= delta
        lu, piv, info = lapack.dsytrf(Kr, lower=1)
        if info < 0:
            raise np.linalg.LinAlgError("dsytrf failed")
        self.lu, self.piv = lu, piv
        self.sizes = (n, p, m)

    def _raw(self, rhs):
        sol, info = lapack.dsytrs(self.lu, self.piv, rhs, lower=1)
        if info != 0:
            raise np.linalg.LinAlgError("dsytrs failed")
        return sol

    def solve(self, rhs):
        u = self._raw(rhs)
        best, best_res = u, np.linalg.norm(rhs - self.K0 @ u)
        for _ in range(3):
            r = rhs - self.K0 @ u
            u = u + self._raw(r)
            res = np.linalg.norm(rhs - self.K0 @ u)
            if res < best_res:
                best, best_res = u, res
            else:
                break
        if not np.all(np.isfinite(best)):
            raise np.linalg.LinAlgError("non-finite KKT solution")
        n, p, _ = self.sizes
        return best[:n], best[n:n + p], best[n + p:]


# -- equality preprocessing ----------------------------------------------------

def _reduce_equalities(A, b, eq_tol=1e-9):
    """Replace ``A x = b`` with an equivalent full-row-rank system.

    Inconsistent components smaller than ``eq_tol * (1 + |b|)`` are projected
    away; larger ones are reported.

    Returns ``(A', b', U, inconsistency)`` where original multipliers are
    ``U @ y'`` and ``inconsistency`` is a residual direction (or None).
    """
    p, n = A.shape
    if p == 0:
        return A, b, np.zeros((0, 0)), None
    U, sv, Vt = np.linalg.svd(A, full_matrices=False)
    tol = max(p, n) * np.finfo(float).eps * (sv[0] if sv.size else 0.0) * 10
    r = int(np.sum(sv > max(tol, 1e-13)))
    Ur = U[:, :r]
    resid = b - Ur @ (Ur.T @ b)
    bad = None
    if np.linalg.norm(resid) > eq_tol * (1.0 + np.linalg.norm(b)):
        bad = resid
    return sv[:r, None] * Vt[:r], Ur.T @ b, Ur, bad


# -- main loop -----------------------------------------------------------------

def solve(prog, opts=None, **kwargs):
    """Solve a :class:`StandardProgram`; see module docstring for the method."""
    opts = opts or SolverOptions()
    if kwargs:
        opts = SolverOptions(**{**opts.__dict__, **kwargs})
    cone = prog.cone
    q, G, h = prog.objective, prog.G.matrix, prog.h
    n = q.size
    A, b, Ueq, bad = _reduce_equalities(prog.A_eq.matrix, prog.b_eq, opts.eq_tol)
    p_orig = prog.A_eq.rows

    if bad is not None:
        y = -bad / (bad @ bad)
        return SolveResult(PRIMAL_INFEASIBLE, np.full(n, np.nan), np.full(cone.total_dim, np.nan),
                           np.zeros(cone.total_dim), y, np.nan, np.nan, np.nan, 0,
                           info={"reason": "inconsistent equalities"})

    e = _identity(cone)
    nu = _degree(cone)
    x = np.zeros(n)
    y = np.zeros(A.shape[0])
    s = e.copy()
    z = e.copy()
    tau = kappa = 1.0

    resx0 = max(1.0, np.linalg.norm(q))
    resy0 = max(1.0, np.linalg.norm(b))
    resz0 = max(1.0, np.linalg.norm(h))

    def lift_y(yr):
        return Ueq @ yr if p_orig else np.zeros(0)

    best = None
    stall = 0
    last_gain = 0
    log = sys.stderr if opts.verbose else None
    if log:
        print(f"{'it':>3} {'pcost':>13} {'dcost':>13} {'gap':>9} {'pres':>9} {'dres':>9} {'k/t':>9}", file=log)

    for it in range(opts.max_iter + 1):
        rx = A.T @ y + G.T @ z + q * tau
        ry = A @ x - b * tau
        rz = s + G @ x - h * tau
        rt = kappa + q @ x + b @ y + h @ z

        pcost = q @ x / tau
        dcost = -(h @ z + b @ y) / tau
        pres = max(np.linalg.norm(ry) / resy0, np.linalg.norm(rz) / resz0) / tau
        dres = np.linalg.norm(rx) / resx0 / tau
        gap = max(abs(pcost - dcost), (s @ z) / tau ** 2)
        relgap = gap / (1.0 + abs(pcost) + abs(dcost))
        if log:
            print(f"{it:3d} {pcost: .6e} {dcost: .6e} {gap:9.2e} {pres:9.2e} {dres:9.2e} {kappa / tau:9.2e}", file=log)

        merit = max(pres, dres, relgap)
        if best is None or merit < 0.5 * best[0]:
            last_gain = it
        elif it - last_gain > 30:
            break
        if best is None or merit < best[0]:
            best = (merit, x / tau, s / tau, z / tau, lift_y(y / tau), pcost, dcost, gap, it, pres, dres)

        if pres <= opts.feas_tol and dres <= opts.feas_tol and gap <= opts.gap_tol * (1.0 + abs(pcost) + abs(dcost)):
            return SolveResult(OPTIMAL, x / tau, s / tau, z / tau, lift_y(y / tau), pcost, dcost, gap, it, pres, dres)

        hz_by = h @ z + b @ y
        if hz_by < 0:
            pinf = np.linalg.norm(A.T @ y + G.T @ z) / resx0 / (-hz_by)
            if pinf <= opts.feas_tol:
                return SolveResult(PRIMAL_INFEASIBLE, np.full(n, np.nan), np.full(cone.total_dim, np.nan),
                                   z / -hz_by, lift_y(y / -hz_by), np.nan, np.nan, np.nan, it,
                                   info={"residual": pinf})
        qx = q @ x
        if qx < 0:
            dinf = max(np.linalg.norm(A @ x) / resy0, np.linalg.norm(G @ x + s) / resz0) / (-qx)
            if dinf <= opts.feas_tol:
                return SolveResult(DUAL_INFEASIBLE, x / -qx, s / -qx, np.full(cone.total_dim, np.nan),
                                   np.full(p_orig, np.nan), np.nan, np.nan, np.nan, it,
                                   info={"residual": dinf})
        if it == opts.max_iter:
            break

        mu = (s @ z + tau * kappa) / (nu + 1)
        try:
            W = _Scaling(cone, s, z)
            lam = W.lam
            Gh = W.WinvT_matrix(G)
            hh = W.WinvT(h)
            kkt = _KKT(A, Gh)
            x2, y2, z2 = kkt.solve(np.concatenate([-q, b, hh]))
        except (np.linalg.LinAlgError, ValueError, FloatingPointError):
            break
        lamsq = _jordan(cone, lam, lam)
        WinvT_rz = W.WinvT(rz)

        def direction(eta, rc, rtk):
            bx = -eta * rx
            by = -eta * ry
            bz = -eta * WinvT_rz - W.lam_divide(rc)
            x1, y1, z1 = kkt.solve(np.concatenate([bx, by, bz]))
            dtau = (eta * rt + rtk / tau + q @ x1 + b @ y1 + hh @ z1) / (kappa / tau + z2 @ z2)
            dx = x1 + dtau * x2
            dy = y1 + dtau * y2
            dzs = z1 + dtau * z2
            dss = W.lam_divide(rc) - dzs
            dkappa = (rtk - kappa * dtau) / tau
            return dx, dy, dss, dzs, dtau, dkappa

        def step_len(dss, dzs, dtau, dkappa):
            a = min(W.max_step(dss), W.max_step(dzs))
            if dtau < 0:
                a = min(a, -tau / dtau)
            if dkappa < 0:
                a = min(a, -kappa / dkappa)
            return a

        try:
            # predictor
            dx, dy, dss, dzs, dtau, dkappa = direction(1.0, -lamsq, -tau * kappa)
            a_aff = min(1.0, step_len(dss, dzs, dtau, dkappa))
            sigma = (1.0 - a_aff) ** 3
            # corrector
            rc = -lamsq + sigma * mu * e - _jordan(cone, dss, dzs)
            rtk = -tau * kappa + sigma * mu - dtau * dkappa
            dx, dy, dss, dzs, dtau, dkappa = direction(1.0 - sigma, rc, rtk)
        except (np.linalg.LinAlgError, ValueError, FloatingPointError):
            break
        a = min(1.0, STEP_FRACTION * step_len(dss, dzs, dtau, dkappa))
        if not np.isfinite(a) or a < 1e-10:
            stall += 1
            if stall >= 2:
                break
            continue

        ds = W.WT(dss)
        dz = W.Winv(dzs)
        x = x + a * dx
        y = y + a * dy
        s = s + a * ds
        z = z + a * dz
        tau = tau + a * dtau
        kappa = kappa + a * dkappa
        if not (np.all(np.isfinite(x)) and tau > 0 and kappa > 0):
            break

    _, bx, bs, bz, by, bp, bd, bg, bit, bpres, bdres = best
    return SolveResult(UNKNOWN, bx, bs, bz, by, bp, bd, bg, it, bpres, bdres,
                       info={"best_iteration": bit})


# -- pair <-> standard form ----------------------------------------------------

class Recovery:
    """Maps a standard-form result back to points ``(x, y)`` of a conic pair."""

    def __init__(self, n_x, y_parts):
        self.n_x = n_x
        self.y_parts = y_parts  # list of ("z", slice) or ("eq", slice)

    def x(self, result):
        return np.asarray(result.x[: self.n_x], dtype=float)

    def y(self, result):
        parts = []
        for src, sl in self.y_parts:
            parts.append(result.z[sl] if src == "z" else -result.y_eq[sl])
        return np.concatenate(parts) if parts else np.zeros(0)

    def __call__(self, result):
        return self.x(result), self.y(result)


def to_standard(pair):
    """Compile a :class:`ConicPair` into a :class:`StandardProgram`.

    Slack rows cover ``x in C`` first and ``A x - b in K*`` second. Moment
    blocks are expressed through their Hankel and localizing matrices; a
    moment block on the K side needs sum-of-squares multipliers, which are
    appended as extra decision variables tied in by equality rows.
    """
    C, K = pair.C, pair.K
    n = C.total_dim
    Amat = pair.A.matrix
    rows_G, rows_h, blocks = [], [], []
    extra = []  # (eq-row index in K block, size) per moment K block
    n_extra = 0
    for blk, sl in zip(C, C.slices()):
        if blk.kind == MOMENT:
            Hm, Lm = moment_svec_maps(blk.size)
            for M, side in ((Hm, (blk.size + 1) // 2), (Lm, (blk.size - 1) // 2)):
                if side == 0:
                    continue
                g = np.zeros((M.shape[0], n))
                g[:, sl] = -M
                rows_G.append(g)
                rows_h.append(np.zeros(M.shape[0]))
                blocks.append(Psd(side))
        else:
            g = np.zeros((blk.dim, n))
            g[:, sl] = -np.eye(blk.dim)
            rows_G.append(g)
            rows_h.append(np.zeros(blk.dim))
            blocks.append(blk)

    y_parts = []
    eq_rows, eq_rhs = [], []
    sos_cols = []
    row = sum(r.shape[0] for r in rows_G)
    eq_count = 0
    for blk, sl in zip(K, K.slices()):
        if blk.kind == MOMENT:
            Hm, Lm = moment_svec_maps(blk.size)
            sos_cols.append((Hm, Lm, sl, eq_count))
            y_parts.append(("eq", slice(eq_count, eq_count + blk.size)))
            eq_count += blk.size
            n_extra += Hm.shape[0] + Lm.shape[0]
        else:
            rows_G.append(-Amat[sl])
            rows_h.append(-pair.b[sl])
            blocks.append(blk)
            y_parts.append(("z", slice(row, row + blk.dim)))
            row += blk.dim

    N = n + n_extra
    G = np.zeros((sum(r.shape[0] for r in rows_G), N))
    G[:, :n] = np.vstack(rows_G)
    h = np.concatenate(rows_h)
    A_eq = np.zeros((eq_count, N))
    b_eq = np.zeros(eq_count)
    col = n
    sos_G, sos_h = [], []
    for Hm, Lm, sl, r0 in sos_cols:
        rs = slice(r0, r0 + Hm.shape[1])
        A_eq[rs, :n] = Amat[sl]
        b_eq[rs] = pair.b[sl]
        for M in (Hm, Lm):
            d = M.shape[0]
            if d == 0:
                continue
            A_eq[rs, col:col + d] = -M.T
            g = np.zeros((d, N))
            g[:, col:col + d] = -np.eye(d)
            sos_G.append(g)
            sos_h.append(np.zeros(d))
            blocks.append(Psd(int(round((np.sqrt(8 * d + 1) - 1) / 2))))
            col += d
    if sos_G:
        G = np.vstack([G] + sos_G)
        h = np.concatenate([h] + sos_h)
    q = np.concatenate([pair.c, np.zeros(n_extra)])
    prog = StandardProgram(q, LinOp(G), h, ConeProduct(blocks), LinOp(A_eq), b_eq)
    return prog, Recovery(n, y_parts)


@dataclass
class PairResult:
    status: str
    x: np.ndarray
    y: np.ndarray
    primal_obj: float
    dual_obj: float
    raw: SolveResult


def solve_pair(pair, opts=None, **kwargs):
    """Solve (P) and (D) together through :func:`to_standard`."""
    prog, rec = to_standard(pair)
    res = solve(prog, opts, **kwargs)
    x, y = rec(res)
    return PairResult(res.status, x, y, res.primal_obj, res.dual_obj, res)
