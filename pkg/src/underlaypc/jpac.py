"""Joint power and admission control for overloaded two-tier networks.

All SUs start admitted.  Each round runs capped power control to its
stationary point and inspects the cognitive interference at the primary
stations:

* interference acceptable but some active SU below target -> drop the SU
  pushing the most power toward the busiest secondary station (case 1);
* interference outside the protection region -> drop the SU whose removal
  moves the interference deepest below the violated faces (case 2);
* otherwise every remaining user is at target and the primaries are safe.

The polyhedron variant tests the exact region; the box variant only checks
per-station totals against fixed limits, so it can terminate with primaries
in outage (that is the point of comparing them).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import NetworkInstance, cognitive_interference, sinr_of
from .regions import (FcirPolyhedron, build_fcir, fcir_contains,
                      infeasibility_report)
from .tpc import SUPPORT_RTOL, TpcResult, run_tpc

CASE_QOS = 1
CASE_REGION = 2


class NoCandidate(Exception):
    """A removal was requested but no active SU is left to remove."""


@dataclass(frozen=True)
class JpacOutcome:
    """Terminal state of one admission-control run."""

    admitted: tuple[int, ...]          # SU indices still active at exit
    removal_trace: tuple[tuple[int, int], ...]   # (su index, case) in order
    p_final: np.ndarray
    supported: np.ndarray              # per-user support at the final point
    pu_outage_ratio: float
    su_outage_ratio: float


def select_removal_case1(net: NetworkInstance, p_stationary,
                         active_sus, support_rtol: float = SUPPORT_RTOL) -> int:
    """SU removal for the in-region, QoS-violated case.

    Picks the secondary station with the most unsupported active SUs (lowest
    station index on ties), then the active SU with the largest received
    power there (lowest user index on ties).
    """
    active = _active_list(net, active_sus)
    p = np.asarray(p_stationary, dtype=float)
    gamma = sinr_of(net, p)
    targets = net.target_sinr
    unsupported = [i for i in active
                   if gamma[i] < targets[i] * (1.0 - support_rtol)]
    if not unsupported:
        raise NoCandidate("no unsupported active SU")
    counts = np.zeros(net.num_sbs, dtype=int)
    for i in unsupported:
        counts[net.serving[i] - net.num_pbs] += 1
    m_star = net.num_pbs + int(np.argmax(counts))
    received = p[active] * net.gain[m_star, active]
    return active[int(np.argmax(received))]


def select_removal_case2(net: NetworkInstance, fcir: FcirPolyhedron,
                         p_stationary, active_sus) -> int:
    """SU removal for the region-violated case.

    For every active SU, evaluates the interference vector with that SU
    taken out (identity: i - p_i * h[:, i]) and sums the signed distances to
    the currently violated faces; removes the SU minimizing the sum (lowest
    index on ties).
    """
    active = _active_list(net, active_sus)
    if not active:
        raise NoCandidate("no active SU to remove")
    p = np.asarray(p_stationary, dtype=float)
    i_sp = cognitive_interference(net, p)
    # Strict slack here: the caller treats any positive overshoot as outside.
    report = infeasibility_report(fcir, i_sp, tol=0.0)
    violated = report.violated
    if violated.size == 0:
        raise NoCandidate("interference already inside the region")
    best_i = -1
    best_score = np.inf
    for i in active:    # ascending, so strict improvement keeps lowest index
        reduced = np.maximum(i_sp - p[i] * net.gain[:net.num_pbs, i], 0.0)
        score = float(np.sum(infeasibility_report(fcir, reduced).distance[violated]))
        if score < best_score:
            best_score = score
            best_i = i
    return best_i


def run_jpac(net: NetworkInstance, fcir: FcirPolyhedron | None = None,
             tpc_rtol: float = 1e-12, tpc_max_iter: int = 100_000,
             support_rtol: float = SUPPORT_RTOL) -> JpacOutcome:
    """Admission control against the exact protection polyhedron.

    Terminates with every primary supported (asserted); admitted SUs all meet
    their targets.
    """
    if fcir is None:
        fcir = build_fcir(net)
    # Strict membership inside the loop: exiting on a face overshoot of even
    # 1e-12 could push a primary past its cap by more than the support margin
    # at realistic interference scales.
    return _admission_loop(net, fcir=fcir, itl=None, tpc_rtol=tpc_rtol,
                           tpc_max_iter=tpc_max_iter, support_rtol=support_rtol)


def run_jpac_box(net: NetworkInstance, itl,
                 fcir: FcirPolyhedron | None = None,
                 tpc_rtol: float = 1e-12, tpc_max_iter: int = 100_000,
                 support_rtol: float = SUPPORT_RTOL) -> JpacOutcome:
    """Admission control against fixed per-station interference limits.

    Primary outage at exit is possible (the box says nothing about the joint
    region) and is recorded in the outcome rather than asserted away.
    """
    itl = np.asarray(itl, dtype=float)
    if itl.shape != (net.num_pbs,):
        raise ValueError(f"itl must have shape ({net.num_pbs},)")
    if np.any(itl < 0):
        raise ValueError("interference limits must be nonnegative")
    if fcir is None:
        fcir = build_fcir(net)
    return _admission_loop(net, fcir=fcir, itl=itl, tpc_rtol=tpc_rtol,
                           tpc_max_iter=tpc_max_iter, support_rtol=support_rtol)


def _admission_loop(net: NetworkInstance, fcir: FcirPolyhedron,
                    itl: np.ndarray | None, tpc_rtol: float,
                    tpc_max_iter: int, support_rtol: float) -> JpacOutcome:
    active = [int(i) for i in net.su_indices]
    trace: list[tuple[int, int]] = []
    p_warm = np.zeros(net.num_users)
    res: TpcResult
    while True:
        mask = np.ones(net.num_users, dtype=bool)
        removed = [i for i, _ in trace]
        mask[removed] = False
        res = run_tpc(net, p0=p_warm, active=mask, tol=0.0, rtol=tpc_rtol,
                      max_iter=tpc_max_iter, support_rtol=support_rtol)
        p = res.p_stationary
        i_sp = cognitive_interference(net, p)
        if itl is None:
            inside = fcir_contains(fcir, i_sp, tol=0.0)
        else:
            inside = bool(np.all(i_sp <= itl))
        unsupported_active = [i for i in active if not res.supported[i]]
        if inside and unsupported_active:
            i_star = select_removal_case1(net, p, active, support_rtol)
            case = CASE_QOS
        elif not inside:
            if itl is None:
                i_star = select_removal_case2(net, fcir, p, active)
            else:
                over = i_sp - itl
                m_hat = int(np.argmax(over))
                received = p[active] * net.gain[m_hat, active]
                i_star = active[int(np.argmax(received))]
            case = CASE_REGION
        else:
            break
        active.remove(i_star)
        trace.append((i_star, case))
        p_warm = p.copy()
        p_warm[i_star] = 0.0
    # Exit certificate: interference acceptable and every active user is at
    # target.  For the polyhedron variant that implies primary support.
    assert all(res.supported[i] for i in active)
    if itl is None:
        assert bool(np.all(res.supported[:net.num_pu])), \
            "primary user unsupported despite in-region interference"
    pu_out = 0.0
    if net.num_pu:
        pu_out = float(np.sum(~res.supported[:net.num_pu])) / net.num_pu
    su_out = 0.0
    if net.num_su:
        su_out = float(net.num_su - len(active)) / net.num_su
    return JpacOutcome(admitted=tuple(sorted(active)),
                       removal_trace=tuple(trace),
                       p_final=p,
                       supported=res.supported,
                       pu_outage_ratio=pu_out,
                       su_outage_ratio=su_out)


def _active_list(net: NetworkInstance, active_sus) -> list[int]:
    active = sorted(int(i) for i in np.asarray(active_sus, dtype=int).ravel())
    for i in active:
        if i < net.num_pu or i >= net.num_users:
            raise ValueError(f"user {i} is not a secondary user")
    return active
