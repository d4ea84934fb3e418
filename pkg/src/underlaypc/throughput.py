"""Secondary-tier throughput maximization under primary protection.

Maximizes sum log(1 + sinr) over SU powers subject to power caps, per-SU
minimum SINRs and a protection constraint on the interference the SUs create
at the primary stations (either the exact polyhedron or fixed per-station
limits).  The PU-to-SU interference is held fixed during each inner solve at
the level implied by the primaries' capped response to the current SU powers.

Each outer iteration replaces every 1 + g term by the best monomial bound
c * prod g_i^lam_i tangent at the current SINRs (lam_i = g_i/(1+g_i)), which
makes the inner problem a geometric program: convex in log variables with
every constraint a log-sum-exp and the objective linear.  The inner solver is
a damped-Newton log-barrier method on that convex form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import NetworkInstance, is_sinr_feasible, powers_from_sinr, \
    spectral_radius
from .regions import FcirPolyhedron, baseline_itl, box_inside_fcir
from .tpc import run_tpc

INNER_NEWTON_BUDGET = 500
BARRIER_GAP_TOL = 1e-9
KKT_RTOL = 1e-7
START_DELTAS = (0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 5e-4, 2e-4, 1e-4, 0.0)
# Scale grid for the inscribed fixed-limit box used to warm-start polyhedron
# runs; the largest scale whose box still fits inside the polyhedron wins.
BOX_ANCHOR_ALPHAS = (0.5, 0.2, 0.1, 0.05, 0.02, 0.01)
QOS_PUBLISH_RTOL = 1e-6


class FeasibilityRequired(Exception):
    """The full system cannot support all targets; run admission control
    first."""


class InfeasibleProblem(Exception):
    """No strictly positive SU power vector satisfies the constraints."""


class DegenerateGamma(Exception):
    """Condensation evaluated at a nonpositive or nonfinite SINR."""


@dataclass(frozen=True)
class GpProblem:
    """Inner-problem data with PU interference frozen.

    Constraints on SU powers p: protection @ p <= 1 rowwise, p <= p_max,
    sinr(p) >= target, where sinr_i = own_gain_i p_i /
    (sum_j cross_gain[i, j] p_j + denom_const_i).
    """

    own_gain: np.ndarray       # (S,)
    cross_gain: np.ndarray     # (S, S), zero diagonal
    denom_const: np.ndarray    # (S,) fixed PU interference + noise
    protection: np.ndarray     # (R, S)
    p_max: np.ndarray          # (S,)
    target: np.ndarray         # (S,)

    @property
    def num_su(self) -> int:
        return self.own_gain.shape[0]

    def sinr(self, p: np.ndarray) -> np.ndarray:
        return self.own_gain * p / (self.cross_gain @ p + self.denom_const)


@dataclass(frozen=True)
class GpIterate:
    """One accepted outer iterate: powers, SINRs, the tangent monomial
    (lam, c) at those SINRs and the true objective sum log(1+sinr)."""

    p: np.ndarray
    gamma: np.ndarray
    lam: np.ndarray
    c: float
    objective: float
    stalled: bool = False


@dataclass(frozen=True)
class GpResult:
    iterates: tuple[GpIterate, ...]
    converged: bool
    i_ps: np.ndarray
    problem: GpProblem

    @property
    def objective(self) -> float:
        return self.iterates[-1].objective

    @property
    def p_su(self) -> np.ndarray:
        return self.iterates[-1].p

    @property
    def stalled(self) -> bool:
        return any(it.stalled for it in self.iterates)


def pu_to_su_interference(net: NetworkInstance, pu_powers) -> np.ndarray:
    """Interference each SU's serving station receives from the primaries."""
    pu_powers = np.asarray(pu_powers, dtype=float)
    if pu_powers.shape != (net.num_pu,):
        raise ValueError(f"pu_powers must have shape ({net.num_pu},)")
    if np.any(pu_powers < 0) or not np.all(np.isfinite(pu_powers)):
        raise ValueError("pu powers must be finite and nonnegative")
    su = net.su_indices
    serv = net.serving[su]
    return net.gain[np.ix_(serv, np.arange(net.num_pu))] @ pu_powers


def condense(gamma) -> tuple[np.ndarray, float]:
    """Tangent monomial of prod(1+g) at gamma: exponents lam and constant c
    with c * prod g^lam = prod (1+g) at the expansion point and <= elsewhere."""
    if isinstance(gamma, GpIterate):
        gamma = gamma.gamma
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma <= 0) or not np.all(np.isfinite(gamma)):
        raise DegenerateGamma("condensation needs strictly positive finite SINRs")
    lam = gamma / (1.0 + gamma)
    log_c = float(np.sum(np.log1p(gamma)) - np.sum(lam * np.log(gamma)))
    return lam, float(np.exp(log_c))


def build_gp_problem(net: NetworkInstance, protection, i_ps) -> GpProblem:
    """Assemble the inner-problem data for the given protection constraint
    (an FcirPolyhedron or a per-station interference-limit vector)."""
    if net.num_su == 0:
        raise ValueError("no secondary users to optimize")
    i_ps = np.asarray(i_ps, dtype=float)
    if i_ps.shape != (net.num_su,):
        raise ValueError(f"i_ps must have shape ({net.num_su},)")
    su = net.su_indices
    serv = net.serving[su]
    own = net.gain[serv, su]
    cross = net.gain[np.ix_(serv, su)].copy()
    np.fill_diagonal(cross, 0.0)
    denom = i_ps + net.noise[serv]
    gain_at_pbs = net.gain[:net.num_pbs, net.num_pu:]
    if isinstance(protection, FcirPolyhedron):
        finite = np.isfinite(protection.c)
        rows = (protection.a[finite] @ gain_at_pbs) / protection.c[finite, None]
    else:
        itl = np.asarray(protection, dtype=float)
        if itl.shape != (net.num_pbs,):
            raise ValueError(f"itl must have shape ({net.num_pbs},)")
        if np.any(itl <= 0):
            # Positive SU powers always violate a zero limit.
            raise InfeasibleProblem("a station has a zero interference limit")
        finite = np.isfinite(itl)
        rows = gain_at_pbs[finite] / itl[finite, None]
    return GpProblem(own_gain=own, cross_gain=cross, denom_const=denom,
                     protection=rows, p_max=net.p_max[su].copy(),
                     target=net.target_sinr[su].copy())


def _lse_constraints(problem: GpProblem, lam: np.ndarray):
    """Constraint set as log-sum-exp atoms over z = (log p, log gamma)."""
    s = problem.num_su
    n = 2 * s
    cons = []

    def unit(k):
        e = np.zeros(n)
        e[k] = 1.0
        return e

    for r in range(problem.protection.shape[0]):
        w = problem.protection[r]
        idx = np.flatnonzero(w > 0)
        if idx.size == 0:
            continue
        a = np.zeros((idx.size, n))
        a[np.arange(idx.size), idx] = 1.0
        cons.append((a, np.log(w[idx])))
    for i in range(s):
        cons.append((unit(i)[None, :], np.array([-np.log(problem.p_max[i])])))
        cons.append((-unit(s + i)[None, :], np.array([np.log(problem.target[i])])))
    for i in range(s):
        # gamma_i * (cross interference + const) / (own_i p_i) <= 1
        others = [j for j in range(s) if j != i]
        a = np.zeros((len(others) + 1, n))
        b = np.zeros(len(others) + 1)
        for t, j in enumerate(others):
            a[t, s + i] = 1.0
            a[t, j] = 1.0
            a[t, i] = -1.0
            b[t] = np.log(problem.cross_gain[i, j] / problem.own_gain[i])
        a[-1, s + i] = 1.0
        a[-1, i] = -1.0
        b[-1] = np.log(problem.denom_const[i] / problem.own_gain[i])
        cons.append((a, b))
    return cons


def _stack_constraints(cons, n: int):
    """Pad the per-constraint (a, b) pairs to a common term count.

    Returns a: (k, t, n) and b: (k, t) with unused slots at b = -inf, so a
    single exp over the stack keeps padded terms at zero weight.
    """
    k = len(cons)
    t = max(b.shape[0] for _, b in cons)
    a_all = np.zeros((k, t, n))
    b_all = np.full((k, t), -np.inf)
    for row, (a, b) in enumerate(cons):
        a_all[row, : b.shape[0], :] = a
        b_all[row, : b.shape[0]] = b
    return a_all, b_all


def _lse_all(a_all: np.ndarray, b_all: np.ndarray, z: np.ndarray):
    """Values g: (k,) and softmax weights w: (k, t) of every constraint."""
    u = a_all @ z + b_all
    m = np.max(u, axis=1)
    e = np.exp(u - m[:, None])
    se = np.sum(e, axis=1)
    return m + np.log(se), e / se[:, None]


def _barrier_value(a_all, b_all, c_lin, t, z) -> float:
    """Centering objective c @ z - (1/t) sum log(-g).

    Scaling the barrier term by 1/t instead of the linear term by t keeps
    the value at the size of the true objective for every t, so float64 can
    resolve the Armijo decreases and the Newton decrement threshold.
    """
    g, _ = _lse_all(a_all, b_all, z)
    if np.any(g >= 0.0):
        return np.inf
    return float(c_lin @ z) - float(np.sum(np.log(-g))) / t


def _barrier_grad_hess(a_all, b_all, c_lin, t, z):
    g, w = _lse_all(a_all, b_all, z)
    aw = a_all * w[:, :, None]
    gg = np.sum(aw, axis=1)
    grad = c_lin + gg.T @ (1.0 / (t * -g))
    curve = np.einsum("kti,ktj->kij", aw, a_all)
    outer = gg[:, :, None] * gg[:, None, :]
    coeff = 1.0 / (g * g) + 1.0 / g
    hess = (np.tensordot(1.0 / -g, curve, axes=1)
            + np.tensordot(coeff, outer, axes=1)) / t
    return grad, hess


def solve_inner(problem: GpProblem, lam, c, p0, gamma0,
                budget: int = INNER_NEWTON_BUDGET) -> GpIterate:
    """Maximize the condensed objective over the GP feasible set.

    (p0, gamma0) must be strictly feasible.  Log-barrier with a decade
    t-schedule; damped Newton centering with Armijo backtracking.  Returns
    the final iterate; `stalled` is set when the Newton budget runs out or
    the KKT residual stays above tolerance.
    """
    lam = np.asarray(lam, dtype=float)
    s = problem.num_su
    a_all, b_all = _stack_constraints(_lse_constraints(problem, lam), 2 * s)
    k = a_all.shape[0]
    c_lin = np.concatenate([np.zeros(s), -lam])
    z = np.concatenate([np.log(np.asarray(p0, dtype=float)),
                        np.log(np.asarray(gamma0, dtype=float))])
    g0, _ = _lse_all(a_all, b_all, z)
    if np.any(g0 >= 0.0):
        raise InfeasibleProblem("inner start is not strictly feasible")
    t = 1.0
    used = 0
    stalled = False
    while True:
        z, used, ok = _center(a_all, b_all, c_lin, t, z, budget, used)
        if not ok:
            stalled = True
            break
        if k / t <= BARRIER_GAP_TOL:
            break
        t *= 10.0
    if not stalled:
        stalled = not _kkt_ok(a_all, b_all, c_lin, t, z)
    p = np.exp(z[:s])
    gamma = np.exp(z[s:])
    lam_new, c_new = condense(gamma)
    return GpIterate(p=p, gamma=gamma, lam=lam_new, c=c_new,
                     objective=float(np.sum(np.log1p(gamma))), stalled=stalled)


def _center(a_all, b_all, c_lin, t, z, budget, used):
    """Newton iterations at fixed t until the decrement is negligible."""
    n = z.shape[0]
    while used < budget:
        grad, hess = _barrier_grad_hess(a_all, b_all, c_lin, t, z)
        try:
            d = np.linalg.solve(hess + 1e-12 * np.trace(hess) / n * np.eye(n),
                                -grad)
        except np.linalg.LinAlgError:
            d = np.linalg.lstsq(hess, -grad, rcond=None)[0]
        used += 1
        decrement = float(-grad @ d)
        if not np.isfinite(decrement) or decrement <= 0:
            return z, used, True
        if decrement / 2.0 <= 1e-13:
            return z, used, True
        f0 = _barrier_value(a_all, b_all, c_lin, t, z)
        step = 1.0
        while step > 1e-20:
            cand = z + step * d
            if _barrier_value(a_all, b_all, c_lin, t, cand) \
                    <= f0 - 0.25 * step * decrement:
                z = cand
                break
            step *= 0.5
        else:
            return z, used, True
    return z, used, False


def _nnls(a: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Nonnegative least squares argmin_{x >= 0} |a x - y| (Lawson-Hanson)."""
    m, k = a.shape
    x = np.zeros(k)
    passive = np.zeros(k, dtype=bool)
    tol = 1e-12 * max(1.0, float(np.linalg.norm(y)))
    for _ in range(3 * k + 10):
        w = a.T @ (y - a @ x)
        w[passive] = -np.inf
        j = int(np.argmax(w))
        if w[j] <= tol:
            break
        passive[j] = True
        while True:
            idx = np.flatnonzero(passive)
            s = np.zeros(k)
            s[idx] = np.linalg.lstsq(a[:, idx], y, rcond=None)[0]
            if np.all(s[idx] > 0.0):
                x = s
                break
            neg = idx[s[idx] <= 0.0]
            alpha = float(np.min(x[neg] / (x[neg] - s[neg])))
            x = x + alpha * (s - x)
            passive = passive & (x > 1e-15)
            x = np.where(passive, x, 0.0)
    return x


def _kkt_ok(a_all, b_all, c_lin, t, z) -> bool:
    """Stationarity certificate with refined dual estimates.

    The barrier duals 1/(t(-g)) hit a float64 floor on stiff active
    constraints, and degenerate active sets (a rate wedged at its floor
    activates opposing rows) need a sign-constrained fit, so the
    multipliers of the near-active rows are re-estimated by nonnegative
    least squares; loose rows keep their barrier duals.
    """
    g, w = _lse_all(a_all, b_all, z)
    jac = np.sum(a_all * w[:, :, None], axis=1)
    active = -g <= 1e-5
    loose = ~active
    resid = c_lin + jac[loose].T @ (1.0 / (t * -g[loose]))
    if np.any(active):
        mu = _nnls(jac[active].T, -resid)
        resid = resid + jac[active].T @ mu
    scale = max(1.0, float(np.max(np.abs(c_lin))))
    return bool(np.max(np.abs(resid)) <= KKT_RTOL * scale)


def _iterate_at(p: np.ndarray, gamma: np.ndarray, stalled: bool = False) -> GpIterate:
    lam, c = condense(gamma)
    return GpIterate(p=p, gamma=gamma, lam=lam, c=c,
                     objective=float(np.sum(np.log1p(gamma))), stalled=stalled)


def _su_min_powers(problem: GpProblem, target: np.ndarray) -> np.ndarray | None:
    """Minimal SU powers meeting `target` exactly under the frozen PU
    interference, or None when the SU coupling alone is overloaded."""
    s = problem.num_su
    f = target[:, None] * problem.cross_gain / problem.own_gain[:, None]
    if spectral_radius(f) >= 1.0 - 1e-9:
        return None
    u = target * problem.denom_const / problem.own_gain
    p = np.linalg.solve(np.eye(s) - f, u)
    return np.maximum(p, 0.0)


def _strict_start(problem: GpProblem):
    """(kind, p, gamma0): kind 'strict' with a strictly interior start,
    'boundary' when only the exact-target point fits, 'none' otherwise."""
    margin = 1e-9
    boundary = None
    for delta in START_DELTAS:
        target = problem.target * (1.0 + delta)
        p = _su_min_powers(problem, target)
        if p is None:
            continue
        caps_ok = np.all(p <= problem.p_max * (1.0 - margin)) if delta > 0 \
            else np.all(p <= problem.p_max * (1.0 + 1e-12))
        rows = problem.protection @ p if problem.protection.size else np.zeros(0)
        prot_ok = np.all(rows <= 1.0 - margin) if delta > 0 \
            else np.all(rows <= 1.0 + 1e-12)
        if not (caps_ok and prot_ok):
            continue
        if delta == 0.0:
            boundary = p
            break
        gamma0 = problem.target * np.sqrt(1.0 + delta)
        return "strict", p, gamma0
    if boundary is not None:
        return "boundary", boundary, problem.target.copy()
    return "none", None, None


def _restart_candidate(problem: GpProblem, best: GpIterate):
    """Strictly feasible start near the incumbent under the current problem,
    or None when no interior point can be found any more."""
    gamma_eval = problem.sinr(best.p)
    if np.all(gamma_eval > problem.target):
        gamma0 = np.sqrt(problem.target * gamma_eval)
        return best.p, gamma0
    kind, p, gamma0 = _strict_start(problem)
    if kind == "strict":
        return p, gamma0
    return None


def _pu_response(net: NetworkInstance, p_su: np.ndarray) -> np.ndarray:
    """Capped stationary PU powers with the SU powers frozen."""
    p0 = np.zeros(net.num_users)
    p0[net.num_pu:] = p_su
    res = run_tpc(net, p0=p0, active=net.pu_indices, tol=0.0, rtol=1e-12)
    return res.p_stationary[:net.num_pu]


def _realized(net: NetworkInstance, protection, p_su: np.ndarray):
    """Self-consistent view of SU powers p_su: the primaries' capped response
    fixes the PU-to-SU interference, which fixes the SU SINRs and the next
    inner problem."""
    pu_p = _pu_response(net, p_su)
    i_ps = pu_to_su_interference(net, pu_p)
    problem = build_gp_problem(net, protection, i_ps)
    gamma = problem.sinr(p_su)
    return problem, i_ps, gamma


def _box_anchor_powers(net: NetworkInstance, fcir: FcirPolyhedron,
                       tol: float, max_outer: int, inner_budget: int):
    """Final SU powers of the same loop run against the largest inscribed
    fixed-limit box, or None when no box from the scale grid fits inside the
    polyhedron or the box run cannot start."""
    for alpha in BOX_ANCHOR_ALPHAS:
        itl = baseline_itl(fcir, alpha)
        if not box_inside_fcir(fcir, itl):
            continue
        try:
            res = run_algorithm2(net, itl, tol=tol, max_outer=max_outer,
                                 inner_budget=inner_budget)
        except InfeasibleProblem:
            return None
        return res.p_su
    return None


def run_algorithm2(net: NetworkInstance, protection,
                   tol: float = 1e-6, max_outer: int = 50,
                   inner_budget: int = INNER_NEWTON_BUDGET) -> GpResult:
    """Successive condense-and-solve loop.

    Requires the full system (all PUs and SUs at their targets) to be
    feasible; raises FeasibilityRequired otherwise.

    Every iterate is recorded at its realized operating point: the PU-to-SU
    interference implied by the primaries' capped response to the iterate's
    own powers, which is also the interference frozen into the next inner
    solve.  The search trajectory always follows the latest solve, even when
    the primaries' pushback makes its realized objective dip below the
    incumbent; only improvements whose realized SINRs still meet the SU
    targets are published into the trace, so the trace is nondecreasing and
    every published point past the baseline is an operable one.

    When the protection set is the polyhedron, the run first solves the same
    problem under the largest inscribed fixed-limit box.  Any box-feasible
    power vector is polyhedron-feasible and its realized operating point does
    not depend on the protection set, so the box answer carries over verbatim
    as a second baseline; the search continues from the better baseline and
    the polyhedron answer can only improve on the box answer.

    Once the trajectory settles to within tol, each SU in turn gets the
    whole monomial weight for one probe solve; that lands on the corners
    where the others idle at their floors, which plain condensation from a
    symmetric start can miss.  A probe that improves the incumbent restarts
    condensation from its point, a rejected probe is rolled back.  The run
    converges when a settled trajectory survives a full probe round; it
    stops unconverged when the solve budget (max_outer) runs out or no
    interior restart exists.
    """
    if net.num_su == 0:
        raise ValueError("no secondary users to optimize")
    if not is_sinr_feasible(net, net.target_sinr):
        raise FeasibilityRequired("targets are not jointly supportable; "
                                  "run admission control instead")
    p_full = powers_from_sinr(net, net.target_sinr)
    i_ps = pu_to_su_interference(net, p_full[:net.num_pu])
    problem = build_gp_problem(net, protection, i_ps)
    kind, p0, _ = _strict_start(problem)
    if kind == "none":
        raise InfeasibleProblem("no SU power vector satisfies the protection "
                                "constraint at the targets")
    problem, i_ps, gamma = _realized(net, protection, p0)
    current = _iterate_at(p0, gamma)
    best, best_problem, best_i_ps = current, problem, i_ps
    iterates = [best]
    if kind == "boundary":
        return GpResult(iterates=tuple(iterates), converged=True, i_ps=i_ps,
                        problem=problem)
    if isinstance(protection, FcirPolyhedron):
        anchor = _box_anchor_powers(net, protection, tol, max_outer,
                                    inner_budget)
        if anchor is not None:
            a_problem, a_i_ps, a_gamma = _realized(net, protection, anchor)
            cand = _iterate_at(anchor, a_gamma)
            if cand.objective > best.objective:
                problem, i_ps, current = a_problem, a_i_ps, cand
                best, best_problem, best_i_ps = cand, a_problem, a_i_ps
                iterates.append(best)
    solves = 0
    su_target = net.target_sinr[net.num_pu:]

    def qos_ok(it):
        return bool(np.all(it.gamma >= su_target * (1.0 - QOS_PUBLISH_RTOL)))

    def advance(lam, c, start_from):
        """One inner solve from a restart near start_from, realized."""
        nonlocal problem, i_ps, solves
        restart = _restart_candidate(problem, start_from)
        if restart is None:
            return None
        cand = solve_inner(problem, lam, c, restart[0], restart[1],
                           budget=inner_budget)
        solves += 1
        problem, i_ps, new_gamma = _realized(net, protection, cand.p)
        return _iterate_at(cand.p, new_gamma, stalled=cand.stalled)

    def publish(moved):
        nonlocal best, best_problem, best_i_ps
        best, best_problem, best_i_ps = moved, problem, i_ps
        iterates.append(best)

    converged = False
    while not converged:
        settled = blocked = False
        while solves < max_outer:
            moved = advance(current.lam, current.c, current)
            if moved is None:
                settled = blocked = True
                break
            delta = moved.objective - current.objective
            current = moved
            if moved.objective > best.objective and qos_ok(moved):
                publish(moved)
            if abs(delta) <= tol:
                settled = True
                break
        if not settled:
            break
        escaped = False
        probed_all = True
        for i in range(net.num_su):
            if solves >= max_outer:
                probed_all = False
                break
            lam_probe = np.zeros(net.num_su)
            lam_probe[i] = 1.0
            # repeat an improving probe: the first landing is solved under
            # the incumbent's frozen interference, so the corner only
            # becomes self-consistent after a few realized re-solves
            while solves < max_outer:
                saved = (current, problem, i_ps)
                moved = advance(lam_probe, 1.0, current)
                if moved is None or moved.objective <= best.objective + tol:
                    current, problem, i_ps = saved
                    break
                delta = moved.objective - current.objective
                current = moved
                if qos_ok(moved):
                    publish(moved)
                    escaped = True
                elif abs(delta) <= tol:
                    # the probe chain settled without ever recovering the
                    # SU targets; abandon it
                    current, problem, i_ps = saved
                    break
            if escaped:
                break
        if not escaped:
            converged = probed_all and not blocked
            break
    return GpResult(iterates=tuple(iterates), converged=converged,
                    i_ps=best_i_ps, problem=best_problem)
