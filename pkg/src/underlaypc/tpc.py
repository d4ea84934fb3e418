"""Distributed target-tracking power control with per-user caps.

The update p_i <- min(p_max_i, gamma_hat_i * (interference_i + noise) / h_ii)
is a standard interference function, so synchronous iteration converges to
the unique constrained fixed point from any start; from zero it increases
monotonically.  Users outside the active set keep their current power, which
lets callers freeze one tier and relax the other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import NetworkInstance, _as_power, sinr_of

SUPPORT_RTOL = 1e-6


@dataclass(frozen=True)
class TpcResult:
    """Stationary point of the capped update.

    supported[i] is True when user i's SINR reaches its target within the
    relative margin (inactive users are judged too: with power zero they are
    unsupported unless their target is met by accident).
    """

    p_stationary: np.ndarray
    iterations: int
    converged: bool
    supported: np.ndarray


def tpc_step(net: NetworkInstance, p, active=None) -> np.ndarray:
    """One synchronous update of the active users; others keep their power."""
    p = _as_power(net, p)
    active = _active_mask(net, active)
    received = net.gain @ p
    idx = np.arange(net.num_users)
    own_gain = net.gain[net.serving, idx]
    interference = received[net.serving] - own_gain * p + net.noise[net.serving]
    wanted = net.target_sinr * interference / own_gain
    new_p = p.copy()
    new_p[active] = np.minimum(net.p_max[active], wanted[active])
    return new_p


def run_tpc(net: NetworkInstance, p0=None, active=None,
            tol: float = 1e-9, rtol: float = 0.0,
            max_iter: int = 100_000,
            support_rtol: float = SUPPORT_RTOL) -> TpcResult:
    """Iterate tpc_step until the largest power change is below
    tol + rtol * p componentwise, or max_iter is hit (converged=False)."""
    if p0 is None:
        p = np.zeros(net.num_users)
    else:
        p = _as_power(net, p0).copy()
    active = _active_mask(net, active)
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        new_p = tpc_step(net, p, active)
        if np.all(np.abs(new_p - p) <= tol + rtol * new_p):
            p = new_p
            converged = True
            break
        p = new_p
    gamma = sinr_of(net, p)
    supported = gamma >= net.target_sinr * (1.0 - support_rtol)
    return TpcResult(p_stationary=p, iterations=iterations,
                     converged=converged, supported=supported)


def _active_mask(net: NetworkInstance, active) -> np.ndarray:
    if active is None:
        return np.ones(net.num_users, dtype=bool)
    active = np.asarray(active)
    if active.dtype == bool:
        if active.shape != (net.num_users,):
            raise ValueError("active mask has wrong shape")
        return active
    mask = np.zeros(net.num_users, dtype=bool)
    mask[active] = True
    return mask
