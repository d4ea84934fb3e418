"""Feasible interference regions at the primary receiving points.

Two characterizations of how much external (secondary) interference the
primary tier can absorb while every PU still meets its target under the caps:

* a per-station box (total interference limits), conservative but decoupled;
* the exact convex polyhedron {i >= 0, A i <= C} obtained by eliminating the
  PU powers from the feasibility conditions.

`A` and `C` come from the station-level aggregate received powers: with
H[m, m'] the normalized in/cross-cell load of cell m' on station m, the
aggregate at station m is Phi = (I - H)^{-1} (noise + i) and each PU's power
is an affine function of Phi at its own station.  Caps on PU powers become
caps on Phi, hence halfspaces in i.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import (FEASIBLE_RHO_MARGIN, NetworkInstance, spectral_radius)

# Absolute slack when testing halfspace membership.
MEMBERSHIP_TOL = 1e-12


class PrimaryInfeasible(Exception):
    """The primary tier cannot meet its targets even with zero external
    interference (load spectral radius >= 1 or a cap already violated)."""


@dataclass(frozen=True)
class FcirPolyhedron:
    """Feasible cognitive interference region {i >= 0, a @ i <= c}.

    `a` is (num_pbs, num_pbs) and elementwise positive; rows whose cell is
    empty have c = +inf (no constraint).  `phi_max` are the per-station
    aggregate-power caps, `noise` the primary noise vector; both are kept so
    PU powers can be recovered from an interference vector.
    """

    a: np.ndarray
    c: np.ndarray
    phi_max: np.ndarray
    noise: np.ndarray

    @property
    def num_pbs(self) -> int:
        return self.a.shape[0]

    def as_dict(self) -> dict:
        """JSON-ready representation (inf encoded as None)."""
        def clean(v):
            return [None if not np.isfinite(x) else float(x) for x in v]
        return {
            "a": [[float(x) for x in row] for row in self.a],
            "c": clean(self.c),
            "phi_max": clean(self.phi_max),
            "noise": [float(x) for x in self.noise],
        }


@dataclass(frozen=True)
class InfeasibilityReport:
    """Signed slack and normalized distance of an interference vector to each
    polyhedron face; positive entries mark violated protection constraints."""

    slack: np.ndarray          # a @ i - c
    distance: np.ndarray       # slack / ||a_row||
    violated: np.ndarray       # indices with slack > tolerance

    @property
    def feasible(self) -> bool:
        return self.violated.size == 0


def build_h_matrix(net: NetworkInstance, gamma_p=None) -> np.ndarray:
    """Normalized load matrix over primary stations.

    H[m, m] sums gamma/(gamma+1) over PUs of cell m; H[m, n] weighs cell n's
    PUs by their gain ratio toward station m.
    """
    gamma_p = _pu_targets(net, gamma_p)
    bp = net.num_pbs
    h = np.zeros((bp, bp))
    frac = gamma_p / (gamma_p + 1.0)
    for i in range(net.num_pu):
        n = net.serving[i]
        ratio = net.gain[:bp, i] / net.gain[n, i]
        h[:, n] += frac[i] * ratio
    return h


def _pu_targets(net: NetworkInstance, gamma_p) -> np.ndarray:
    if gamma_p is None:
        return np.asarray(net.target_sinr[:net.num_pu], dtype=float)
    gamma_p = np.asarray(gamma_p, dtype=float)
    if gamma_p.shape != (net.num_pu,):
        raise ValueError(f"gamma_p must have shape ({net.num_pu},)")
    if np.any(gamma_p <= 0) or not np.all(np.isfinite(gamma_p)):
        raise ValueError("PU targets must be finite and positive")
    return gamma_p


def _phi_max(net: NetworkInstance, gamma_p: np.ndarray) -> np.ndarray:
    """Per-station aggregate cap min_i p_max_i h_mi (gamma_i+1)/gamma_i.

    Empty cells carry +inf (their aggregate is never the binding constraint).
    """
    bp = net.num_pbs
    phi = np.full(bp, np.inf)
    for m in range(bp):
        members = [i for i in net.cell_members(m) if i < net.num_pu]
        for i in members:
            cap = net.p_max[i] * net.gain[m, i] * (gamma_p[i] + 1.0) / gamma_p[i]
            phi[m] = min(phi[m], cap)
    return phi


def build_fcir(net: NetworkInstance, gamma_p=None) -> FcirPolyhedron:
    """Exact feasible cognitive interference region for the primary tier.

    Raises PrimaryInfeasible when the primary tier is overloaded on its own
    (spectral radius of H >= 1) or some cap constraint fails already at zero
    interference (a negative c component).
    """
    gamma_p = _pu_targets(net, gamma_p)
    h = build_h_matrix(net, gamma_p)
    rho = spectral_radius(h)
    if rho >= 1.0 - FEASIBLE_RHO_MARGIN:
        raise PrimaryInfeasible(f"primary load spectral radius {rho:.6g} >= 1")
    bp = net.num_pbs
    # The inverse of I - H is entrywise nonnegative whenever rho(H) < 1
    # (Neumann series of a nonnegative matrix); any negative entry from the
    # solve is roundoff and would poison the c_n / a_nm ratios downstream.
    a = np.maximum(np.linalg.solve(np.eye(bp) - h, np.eye(bp)), 0.0)
    # An empty cell carries no load, so its column of the inverse is a unit
    # vector exactly; pin it so its off-diagonal zeros survive roundoff
    # (downstream code keys on exact zeros to leave such axes unconstrained).
    empty = ~np.any(h > 0.0, axis=0)
    if np.any(empty):
        a[:, empty] = np.eye(bp)[:, empty]
    phi_max = _phi_max(net, gamma_p)
    noise = np.asarray(net.noise[:bp], dtype=float)
    with np.errstate(invalid="ignore"):
        c = phi_max - a @ noise
    c[np.isinf(phi_max)] = np.inf
    if np.any(c < 0):
        raise PrimaryInfeasible("a power cap is violated at zero cognitive "
                                "interference")
    for arr in (a, c, phi_max, noise):
        arr.setflags(write=False)
    return FcirPolyhedron(a=a, c=c, phi_max=phi_max, noise=noise)


def build_ftir(net: NetworkInstance, gamma_p=None) -> np.ndarray:
    """Per-station total interference limits (box characterization).

    Station m tolerates total interference (from everything it does not
    serve) up to min_i(p_max_i h_mi (g_i+1)/g_i) * (1 - sum_i g_i/(g_i+1))
    minus its own noise.  A negative value means the cell cannot meet its
    targets even in isolation.  Empty cells get +inf.
    """
    gamma_p = _pu_targets(net, gamma_p)
    phi_max = _phi_max(net, gamma_p)
    frac = gamma_p / (gamma_p + 1.0)
    limits = np.full(net.num_pbs, np.inf)
    for m in range(net.num_pbs):
        members = [i for i in net.cell_members(m) if i < net.num_pu]
        if not members:
            continue
        load = float(np.sum(frac[members]))
        limits[m] = phi_max[m] * (1.0 - load) - net.noise[m]
    return limits


def pu_powers_from_interference(net: NetworkInstance, i_sp,
                                gamma_p=None,
                                fcir: FcirPolyhedron | None = None) -> np.ndarray:
    """PU powers that meet the targets exactly under cognitive interference
    i_sp at the primary stations.  Ignores caps; membership checks are the
    caller's business."""
    gamma_p = _pu_targets(net, gamma_p)
    if fcir is None:
        fcir = build_fcir(net, gamma_p)
    i_sp = _as_interference(fcir, i_sp)
    phi = fcir.a @ (fcir.noise + i_sp)
    frac = gamma_p / (gamma_p + 1.0)
    serv = net.serving[:net.num_pu]
    own = net.gain[serv, np.arange(net.num_pu)]
    return frac * phi[serv] / own


def _as_interference(fcir: FcirPolyhedron, i_sp) -> np.ndarray:
    i_sp = np.asarray(i_sp, dtype=float)
    if i_sp.shape != (fcir.num_pbs,):
        raise ValueError(f"interference vector must have shape ({fcir.num_pbs},)")
    if np.any(i_sp < 0) or not np.all(np.isfinite(i_sp)):
        raise ValueError("interference must be finite and nonnegative")
    return i_sp


def fcir_contains(fcir: FcirPolyhedron, i_sp, tol: float = MEMBERSHIP_TOL) -> bool:
    """Halfspace membership test with absolute slack tol."""
    i_sp = _as_interference(fcir, i_sp)
    lhs = fcir.a @ i_sp
    finite = np.isfinite(fcir.c)
    return bool(np.all(lhs[finite] <= fcir.c[finite] + tol))


def infeasibility_report(fcir: FcirPolyhedron, i_sp,
                         tol: float = MEMBERSHIP_TOL) -> InfeasibilityReport:
    """Signed slack a@i - c per face and its row-normalized distance."""
    i_sp = _as_interference(fcir, i_sp)
    slack = fcir.a @ i_sp - fcir.c
    slack[np.isinf(fcir.c)] = -np.inf
    norms = np.sqrt(np.sum(fcir.a ** 2, axis=1))
    distance = slack / norms
    violated = np.flatnonzero(slack > tol)
    return InfeasibilityReport(slack=slack, distance=distance, violated=violated)


def baseline_itl(fcir: FcirPolyhedron, alpha: float = 1.0) -> np.ndarray:
    """Fixed per-station interference limits alpha * itl0, where itl0 is the
    largest box inscribed axis-proportionally in the polyhedron
    (itl0_m = min_n c_n / a_nm)."""
    if alpha < 0 or not np.isfinite(alpha):
        raise ValueError("alpha must be nonnegative and finite")
    if alpha == 0.0:
        # Explicit, rather than 0 * itl0, which is nan on unconstrained axes.
        return np.zeros(fcir.num_pbs)
    finite = np.isfinite(fcir.c)
    if not np.any(finite):
        return np.full(fcir.num_pbs, np.inf)
    # Columns of empty cells are zero off the diagonal; those axes stay free.
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = fcir.c[finite, None] / fcir.a[finite, :]
    ratios = np.where(np.isnan(ratios), np.inf, ratios)
    return alpha * np.min(ratios, axis=0)


def box_inside_fcir(fcir: FcirPolyhedron, itl,
                    tol: float = MEMBERSHIP_TOL) -> bool:
    """True when the whole box [0, itl] lies inside the polyhedron, i.e. the
    far corner does (a is positive so the corner dominates)."""
    itl = np.asarray(itl, dtype=float)
    if itl.shape != (fcir.num_pbs,):
        raise ValueError(f"itl must have shape ({fcir.num_pbs},)")
    if np.any(itl < 0):
        raise ValueError("interference limits must be nonnegative")
    if np.any(np.isinf(itl)):
        # An unbounded box fits only in directions the polyhedron ignores.
        finite_rows = np.isfinite(fcir.c)
        if np.any(fcir.a[np.ix_(finite_rows, np.isinf(itl))] > 0):
            return False
    corner = np.where(np.isinf(itl), 0.0, itl)
    lhs = fcir.a @ corner
    finite = np.isfinite(fcir.c)
    return bool(np.all(lhs[finite] <= fcir.c[finite] + tol))
