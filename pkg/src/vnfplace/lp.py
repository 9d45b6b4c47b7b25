"""Self-contained dense linear-program solver (two-phase simplex).

Maximizes ``c @ x`` subject to ``A_leq x <= b_leq``, ``A_eq x == b_eq`` and
per-variable bounds (lower defaults to 0, upper optional).  The pivot rules
are fully deterministic: Dantzig's rule with lowest-index tie-breaks, falling
back to Bland's rule after a fixed iteration budget so cycling cannot occur.
Re-solving the same program yields bit-identical results.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import NumericalFailure

__all__ = ["LinearProgram", "LpSolution", "LpStatus", "solve", "EPS_FEAS", "EPS_OPT"]

EPS_FEAS = 1e-7   # post-solve feasibility check
EPS_OPT = 1e-6    # optimality tolerance promised to callers
PIVOT_TOL = 1e-9  # entries below this never pivot
BLAND_AFTER = 3000
RECOMPUTE_EVERY = 250
HARRIS_SLACK = 1e-9  # per-pivot feasibility slack in the relaxed ratio test


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """A finite LP in inequality/equality form.

    ``leq``/``eq`` are lists of ``(coefficients, rhs)`` pairs; ``bounds`` is a
    per-variable ``(lower, upper)`` list where ``upper`` may be ``None``.
    """

    num_vars: int
    objective: Sequence[float]
    leq: list[tuple[Sequence[float], float]] = field(default_factory=list)
    eq: list[tuple[Sequence[float], float]] = field(default_factory=list)
    bounds: Optional[list[tuple[float, Optional[float]]]] = None

    def arrays(self):
        n = self.num_vars
        c = np.asarray(self.objective, dtype=float)
        if c.shape != (n,):
            raise ValueError("objective length mismatch")
        a_leq = np.array([row for row, _ in self.leq], dtype=float).reshape(len(self.leq), n)
        b_leq = np.array([rhs for _, rhs in self.leq], dtype=float)
        a_eq = np.array([row for row, _ in self.eq], dtype=float).reshape(len(self.eq), n)
        b_eq = np.array([rhs for _, rhs in self.eq], dtype=float)
        if self.bounds is None:
            lower = np.zeros(n)
            upper = np.full(n, np.inf)
        else:
            if len(self.bounds) != n:
                raise ValueError("bounds length mismatch")
            lower = np.array([lo for lo, _ in self.bounds], dtype=float)
            upper = np.array(
                [np.inf if hi is None else hi for _, hi in self.bounds], dtype=float
            )
        if not np.all(np.isfinite(b_leq)) or not np.all(np.isfinite(b_eq)):
            raise ValueError("constraint rhs must be finite")
        if not np.all(np.isfinite(lower)):
            raise ValueError("lower bounds must be finite")
        if np.any(lower > upper):
            raise ValueError("lower bound exceeds upper bound")
        return c, a_leq, b_leq, a_eq, b_eq, lower, upper


@dataclass
class LpSolution:
    status: LpStatus
    values: np.ndarray
    objective_value: float
    dual_leq: Optional[np.ndarray] = None
    dual_eq: Optional[np.ndarray] = None


def _pivot(M, rhs, obj_row, basis, r, j):
    piv = M[r, j]
    M[r] /= piv
    rhs[r] /= piv
    col = M[:, j].copy()
    col[r] = 0.0
    M -= np.outer(col, M[r])
    rhs -= col * rhs[r]
    f = obj_row[j]
    obj_row -= f * M[r]
    basis[r] = j


def _refactorize(M, rhs, basis, A0, rhs0, strict=False):
    """Rebuild the tableau exactly from the current basis to purge the
    rounding drift that in-place pivots accumulate.

    When the exact basic values turn out negative beyond rounding noise the
    pivoting has silently left the feasible region; raising here (instead of
    clipping and carrying on) lets the caller retry with a stricter pivot
    regime.  ``strict`` suppresses that escape hatch for the most careful
    retry tier, which has nothing stronger to fall back to.
    """
    B = A0[:, basis]
    try:
        M[:] = np.linalg.solve(B, A0)
        rhs[:] = np.linalg.solve(B, rhs0)
    except np.linalg.LinAlgError:
        if strict:
            return  # keep the drifted tableau; the post-solve check guards
        raise NumericalFailure("singular basis during refactorization")
    if not strict:
        # Small negatives are expected measurement noise on ill-conditioned
        # bases (solve error ~ cond(B)·eps); only an egregious loss means the
        # pivoting actually left the feasible region and a stricter pivot
        # regime is worth the restart.
        scale = 1.0 + float(np.abs(rhs0).max(initial=0.0))
        if rhs.min(initial=0.0) < -1e-4 * scale:
            raise NumericalFailure("basis lost primal feasibility")
    np.clip(rhs, 0.0, None, out=rhs)


def _run_simplex(M, rhs, c, basis, allow_unbounded, max_iter, A0, rhs0,
                 bland_after=BLAND_AFTER, recompute_every=RECOMPUTE_EVERY):
    """Maximize c over the tableau in place; returns final objective value.

    Dantzig pricing with a Harris-style two-pass ratio test (prefers large
    pivot elements, bounding error growth) for the first ``bland_after``
    iterations, then Bland's rule (textbook ratio test, smallest-index ties)
    which cannot cycle.  The tableau is rebuilt exactly from the basis every
    RECOMPUTE_EVERY iterations and again before accepting optimality.

    Raises NumericalFailure on iteration blow-up; returns None on
    unboundedness (only when allow_unbounded).
    """
    m, ncols = M.shape
    if m == 0:
        return 0.0
    strict = recompute_every <= 1
    obj_row = c[basis] @ M - c
    verifies = 0
    it = 0
    while it < max_iter:
        if it % recompute_every == recompute_every - 1:
            _refactorize(M, rhs, basis, A0, rhs0, strict=strict)
            obj_row = c[basis] @ M - c
        if it < bland_after:
            j = int(np.argmin(obj_row))
            entering_ok = obj_row[j] < -PIVOT_TOL
        else:
            neg = np.nonzero(obj_row < -PIVOT_TOL)[0]
            entering_ok = neg.size > 0
            j = int(neg[0]) if entering_ok else -1
        if not entering_ok:
            # Looks optimal: rebuild exactly and re-check (drift can both
            # hide and fabricate negative reduced costs).
            if verifies >= 3:
                break
            verifies += 1
            _refactorize(M, rhs, basis, A0, rhs0, strict=strict)
            obj_row = c[basis] @ M - c
            if obj_row.min() >= -PIVOT_TOL:
                break
            continue
        col = M[:, j]
        if not np.any(col > PIVOT_TOL):
            if allow_unbounded:
                return None
            raise NumericalFailure("no valid pivot row")
        # The step bound must cover every strictly positive entry — even
        # sub-pivot-tolerance ones — or those rows get driven far negative.
        eligible = np.nonzero(col > 1e-13)[0]
        ratios = rhs[eligible] / col[eligible]
        if it < bland_after:
            # Harris two-pass: bound the step by the tolerance-relaxed
            # minimum, then take the numerically largest pivot within it.
            relaxed = ((rhs[eligible] + HARRIS_SLACK) / col[eligible]).min()
            ok = eligible[(ratios <= relaxed) & (col[eligible] > PIVOT_TOL)]
            if ok.size == 0:
                ok = eligible[ratios <= relaxed]
            pivs = col[ok]
            ok = ok[pivs >= 0.5 * pivs.max()]
            r = int(ok[np.argmin(basis[ok])])
        else:
            rmin = ratios.min()
            tied = eligible[ratios <= rmin + 1e-12 * max(1.0, abs(rmin))]
            r = int(tied[np.argmin(basis[tied])])
        _pivot(M, rhs, obj_row, basis, r, j)
        np.clip(rhs, 0.0, None, out=rhs)
        it += 1
    else:
        raise NumericalFailure("simplex iteration limit exceeded")
    return float(c[basis] @ rhs)


def _dual_cleanup(M, rhs, c, basis, A0, rhs0, max_steps=200):
    """Remove slightly negative basic values left behind by tolerance-relaxed
    pivoting.  At phase-2 optimality the reduced costs are (near) nonnegative,
    so textbook dual-simplex steps restore primal feasibility while keeping
    optimality.  Returns the exact basic values of the final basis."""
    for _ in range(max_steps):
        B = A0[:, basis]
        try:
            xb = np.linalg.solve(B, rhs0)
        except np.linalg.LinAlgError:
            return None
        scale = 1.0 + float(np.abs(rhs0).max(initial=0.0))
        i = int(np.argmin(xb))
        if xb[i] >= -1e-12 * scale:
            return xb
        try:
            M[:] = np.linalg.solve(B, A0)
        except np.linalg.LinAlgError:
            return None
        rhs[:] = xb
        row = M[i]
        cand = np.nonzero(row < -PIVOT_TOL)[0]
        cand = cand[~np.isin(cand, basis)]
        if cand.size == 0:
            return None
        obj_row = c[basis] @ M - c
        ratios = obj_row[cand] / (-row[cand])
        rmin = ratios.min()
        tied = cand[ratios <= rmin + 1e-9 * (1.0 + abs(rmin))]
        j = int(tied[np.argmax(-row[tied])])
        dummy = np.zeros(M.shape[1])
        _pivot(M, rhs, dummy, basis, i, j)
    return None


def solve(lp: LinearProgram, want_dual: bool = False) -> LpSolution:
    """Solve ``lp``; see module docstring for guarantees.

    With ``want_dual`` the solution carries dual multipliers for the original
    leq/eq rows (a weak-duality certificate); rows eliminated as redundant
    get a zero multiplier.

    Occasionally rounding drift between tableau rebuilds silently pushes the
    pivoting outside the feasible region; that is detected at the next exact
    rebuild and the program is deterministically re-solved with the rebuild
    interval shortened (down to rebuilding after every single pivot), which
    bounds how much drift any pivot decision can see.
    """
    try:
        return _solve_once(lp, want_dual, BLAND_AFTER, RECOMPUTE_EVERY)
    except NumericalFailure:
        pass
    try:
        return _solve_once(lp, want_dual, BLAND_AFTER, 10)
    except NumericalFailure:
        return _solve_once(lp, want_dual, BLAND_AFTER, 1)


def _solve_once(
    lp: LinearProgram,
    want_dual: bool,
    bland_after: int,
    recompute_every: int = RECOMPUTE_EVERY,
) -> LpSolution:
    c0, a_leq0, b_leq0, a_eq0, b_eq0, lower, upper = lp.arrays()
    n = lp.num_vars

    # Presolve: variables pinned by equal bounds are substituted out.
    fixed = lower == upper
    free = ~fixed
    xf = np.where(fixed, lower, 0.0)
    const = float(c0 @ xf)
    b_leq = b_leq0 - a_leq0 @ xf if a_leq0.size else b_leq0.copy()
    b_eq = b_eq0 - a_eq0 @ xf if a_eq0.size else b_eq0.copy()
    c = c0[free]
    a_leq = a_leq0[:, free]
    a_eq = a_eq0[:, free]
    lo = lower[free]
    hi = upper[free]
    nf = int(free.sum())

    # Row equilibration: dividing each constraint row by its largest
    # coefficient leaves the feasible region unchanged but markedly improves
    # the conditioning of every basis the simplex visits.
    if a_leq.size:
        r_leq = np.maximum(np.abs(a_leq).max(axis=1), 1e-300)
        a_leq = a_leq / r_leq[:, None]
        b_leq = b_leq / r_leq
    else:
        r_leq = np.ones(0)
    if a_eq.size:
        r_eq = np.maximum(np.abs(a_eq).max(axis=1), 1e-300)
        a_eq = a_eq / r_eq[:, None]
        b_eq = b_eq / r_eq
    else:
        r_eq = np.ones(0)

    def finish(xfull, dual_leq=None, dual_eq=None, tol_factor=1.0):
        _check_feasible(
            xfull, a_leq0, b_leq0, a_eq0, b_eq0, lower, upper, tol_factor
        )
        return LpSolution(
            LpStatus.OPTIMAL, xfull, float(c0 @ xfull), dual_leq, dual_eq
        )

    if nf == 0:
        ok = (
            (b_leq >= -EPS_FEAS).all() if b_leq.size else True
        ) and ((np.abs(b_eq) <= EPS_FEAS).all() if b_eq.size else True)
        if not ok:
            return LpSolution(LpStatus.INFEASIBLE, np.zeros(n), math.nan)
        duals = (np.zeros(len(b_leq0)), np.zeros(len(b_eq0))) if want_dual else (None, None)
        return finish(xf.copy(), *duals)

    # Shift to x' = x - lower >= 0; finite upper bounds become extra leq rows.
    b_leq = b_leq - a_leq @ lo
    b_eq = b_eq - a_eq @ lo
    const += float(c @ lo)
    ub_idx = np.nonzero(np.isfinite(hi))[0]
    ub_rows = np.zeros((len(ub_idx), nf))
    ub_rows[np.arange(len(ub_idx)), ub_idx] = 1.0
    A = np.vstack([a_leq, ub_rows, a_eq]) if (a_leq.size or ub_rows.size or a_eq.size) else np.zeros((0, nf))
    b = np.concatenate([b_leq, hi[ub_idx] - lo[ub_idx], b_eq])
    m1 = len(b_leq) + len(ub_idx)  # leq rows (original + upper bounds)
    m = len(b)

    # Standard form with slacks for leq rows; negate rows with negative rhs.
    M = np.hstack([A, np.zeros((m, m1))])
    if m1:
        M[np.arange(m1), nf + np.arange(m1)] = 1.0
    rhs = b.copy()
    negated = rhs < 0
    M[negated] *= -1.0
    rhs[negated] *= -1.0
    basis = np.full(m, -1, dtype=int)
    slack_ok = (~negated[:m1]) if m1 else np.zeros(0, dtype=bool)
    for i in range(m1):
        if slack_ok[i]:
            basis[i] = nf + i
    need_art = np.nonzero(basis < 0)[0]
    n_art = len(need_art)
    if n_art:
        art = np.zeros((m, n_art))
        art[need_art, np.arange(n_art)] = 1.0
        M = np.hstack([M, art])
        basis[need_art] = nf + m1 + np.arange(n_art)
    ncols = M.shape[1]
    row_kind = ["leq"] * len(b_leq) + ["ub"] * len(ub_idx) + ["eq"] * len(b_eq)
    row_orig = list(range(len(b_leq))) + [-1] * len(ub_idx) + list(range(len(b_eq)))
    A0 = M.copy()
    rhs0 = rhs.copy()

    max_iter = 20000 + 50 * (m + ncols)

    # Phase 1: drive out artificials.
    if n_art:
        c1 = np.zeros(ncols)
        c1[nf + m1:] = -1.0
        val = _run_simplex(
            M, rhs, c1, basis, allow_unbounded=False, max_iter=max_iter,
            A0=A0, rhs0=rhs0, bland_after=bland_after,
            recompute_every=recompute_every,
        )
        if val < -EPS_FEAS * max(1.0, float(np.abs(rhs0).max(initial=0.0))):
            return LpSolution(LpStatus.INFEASIBLE, np.zeros(n), math.nan)
        # The program may be feasible only up to tolerance (e.g. equality
        # rhs values carrying rounding error), leaving artificials basic at
        # tiny nonzero values.  Shift the rhs by that residual so they sit
        # at exactly zero: the shift is bounded by the accepted phase-1
        # residual, and it makes every drive-out pivot exactly degenerate —
        # otherwise a small pivot element can amplify a 1e-9 residual into
        # large infeasibility.
        art_rows = [i for i in range(m) if basis[i] >= nf + m1]
        if art_rows:
            try:
                xb1 = np.linalg.solve(A0[:, basis], rhs0)
            except np.linalg.LinAlgError:
                xb1 = None
            if xb1 is not None:
                for i in art_rows:
                    rhs0 -= xb1[i] * A0[:, basis[i]]
                _refactorize(M, rhs, basis, A0, rhs0, strict=True)
        # Pivot remaining basic artificials out, or drop their (redundant) rows.
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= nf + m1:
                row = M[i, : nf + m1]
                in_basis = set(basis.tolist())
                cand = [
                    j for j in np.nonzero(np.abs(row) > PIVOT_TOL)[0]
                    if j not in in_basis
                ]
                if cand:
                    # Largest magnitude keeps the new basis well-conditioned.
                    j = int(max(cand, key=lambda jj: abs(row[jj])))
                    rhs[i] = 0.0  # degenerate by construction (rhs shifted)
                    dummy = np.zeros(ncols)
                    _pivot(M, rhs, dummy, basis, i, j)
                else:
                    keep[i] = False
        M = M[keep][:, : nf + m1]
        rhs = rhs[keep]
        basis = basis[keep]
        A0 = A0[keep][:, : nf + m1]
        rhs0 = rhs0[keep]
        negated = negated[keep]
        row_kind = [k for k, kp in zip(row_kind, keep) if kp]
        row_orig = [o for o, kp in zip(row_orig, keep) if kp]
        ncols = nf + m1

    # Phase 2: original objective.
    c2 = np.concatenate([c, np.zeros(ncols - nf)])
    val = _run_simplex(
        M, rhs, c2, basis, allow_unbounded=True, max_iter=max_iter,
        A0=A0, rhs0=rhs0, bland_after=bland_after,
        recompute_every=recompute_every,
    )
    if val is None:
        return LpSolution(LpStatus.UNBOUNDED, np.zeros(n), math.inf)

    # Recompute basic values against the original (un-pivoted) rows (the
    # tableau rhs accumulates rounding drift) and drive out any slightly
    # negative basic values with dual-simplex steps.
    x_std = np.zeros(ncols)
    xb = rhs
    tol_factor = 1.0
    if len(rhs):
        cleaned = _dual_cleanup(M, rhs, c2, basis, A0, rhs0)
        if cleaned is None:
            # Cleanup could not repair the basis; still prefer exact basic
            # values over the drift-accumulating tableau rhs.
            try:
                cleaned = np.linalg.solve(A0[:, basis], rhs0)
            except np.linalg.LinAlgError:
                cleaned = None
        if cleaned is not None:
            xb = np.clip(cleaned, 0.0, None)
        # An ill-conditioned final basis caps the attainable accuracy; widen
        # the acceptance band in proportion (capped) instead of rejecting a
        # solution that is as exact as floating point allows.
        # The attainable accuracy is bounded by cond(B)·eps ~ 1e-8·cond as a
        # relative error; accept up to that (with headroom, capped) rather
        # than rejecting a solution as exact as floating point allows.
        cond = np.linalg.cond(A0[:, basis])
        if np.isfinite(cond):
            tol_factor = float(min(max(1.0, 1e-8 * cond), 1e4))
    x_std[basis] = xb
    x_free = np.clip(x_std[:nf], 0.0, None) + lo
    xfull = xf.copy()
    xfull[free] = x_free

    dual_leq = dual_eq = None
    if want_dual:
        mrows = len(rhs)
        dual_leq = np.zeros(len(b_leq0))
        dual_eq = np.zeros(len(b_eq0))
        if mrows:
            B = A0[:, basis]
            try:
                y = np.linalg.solve(B.T, c2[basis])
            except np.linalg.LinAlgError as exc:  # pragma: no cover
                raise NumericalFailure("singular final basis") from exc
            for i in range(mrows):
                sign = -1.0 if negated[i] else 1.0
                # Undo the row equilibration so duals match the caller's rows.
                if row_kind[i] == "leq":
                    dual_leq[row_orig[i]] = sign * y[i] / r_leq[row_orig[i]]
                elif row_kind[i] == "eq":
                    dual_eq[row_orig[i]] = sign * y[i] / r_eq[row_orig[i]]
    return finish(xfull, dual_leq, dual_eq, tol_factor)


def _check_feasible(x, a_leq, b_leq, a_eq, b_eq, lower, upper, tol_factor=1.0):
    # Tolerances scale with each row so large-magnitude programs are judged
    # by relative, not absolute, error; ``tol_factor`` widens the band when
    # the final basis was measurably ill-conditioned.
    tol = EPS_FEAS * tol_factor
    if a_leq.size:
        scale = 1.0 + np.abs(a_leq) @ np.abs(x) + np.abs(b_leq)
        if np.any(a_leq @ x - b_leq > tol * scale):
            raise NumericalFailure("leq constraint violated beyond tolerance")
    if a_eq.size:
        scale = 1.0 + np.abs(a_eq) @ np.abs(x) + np.abs(b_eq)
        if np.any(np.abs(a_eq @ x - b_eq) > tol * scale):
            raise NumericalFailure("eq constraint violated beyond tolerance")
    bscale = 1.0 + np.abs(x)
    if np.any(x < lower - tol * bscale) or np.any(
        np.where(np.isfinite(upper), x - upper, -np.inf) > tol * bscale
    ):
        raise NumericalFailure("bound violated beyond tolerance")
