"""Two-tier interference network model and the SINR/power duality.

A network instance holds B receiving points (primary base stations first,
secondary ones after) and M transmitting users (primary users first), a
B x M channel gain matrix, per-receiver noise, per-user power caps, serving
assignment and target SINRs.  Powers, SINRs and interference values are plain
float64 numpy arrays throughout; all quantities are linear (no dB).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

GAIN_FLOOR = 1e-30
FEASIBLE_RHO_MARGIN = 1e-9


class InfeasibleSinr(Exception):
    """Raised when a target SINR vector admits no finite power solution."""


@dataclass(frozen=True)
class NetworkInstance:
    """Immutable snapshot of a two-tier network.

    Parameters
    ----------
    num_pbs, num_sbs : int
        Counts of primary/secondary receiving points.  Stations are indexed
        0..num_pbs-1 (primary) then num_pbs..B-1 (secondary).
    num_pu, num_su : int
        User counts; users are indexed 0..num_pu-1 (primary) then SUs.
    gain : (B, M) array
        gain[m, i] is the channel gain from user i to receiving point m.
        Values below GAIN_FLOOR are clamped.
    noise : (B,) array
        Noise power at each receiving point.
    p_max : (M,) array
        Per-user transmit power caps.
    serving : (M,) int array
        serving[i] is the receiving point of user i.  PUs must be served by
        primary stations, SUs by secondary ones.
    target_sinr : (M,) array
        Per-user target SINRs (linear).
    """

    num_pbs: int
    num_sbs: int
    num_pu: int
    num_su: int
    gain: np.ndarray
    noise: np.ndarray
    p_max: np.ndarray
    serving: np.ndarray
    target_sinr: np.ndarray

    def __post_init__(self):
        b, m = self.num_pbs + self.num_sbs, self.num_pu + self.num_su
        gain = np.maximum(np.asarray(self.gain, dtype=float), GAIN_FLOOR)
        noise = np.asarray(self.noise, dtype=float)
        p_max = np.asarray(self.p_max, dtype=float)
        serving = np.asarray(self.serving, dtype=int)
        target = np.asarray(self.target_sinr, dtype=float)
        if gain.shape != (b, m):
            raise ValueError(f"gain must have shape {(b, m)}, got {gain.shape}")
        if noise.shape != (b,) or p_max.shape != (m,) or serving.shape != (m,) \
                or target.shape != (m,):
            raise ValueError("noise/p_max/serving/target_sinr shapes inconsistent "
                             "with station and user counts")
        if not (np.all(np.isfinite(gain)) and np.all(np.isfinite(noise))
                and np.all(np.isfinite(p_max)) and np.all(np.isfinite(target))):
            raise ValueError("gains, noise, caps and targets must be finite")
        if np.any(noise < 0) or np.any(p_max <= 0) or np.any(target <= 0):
            raise ValueError("noise must be >= 0, p_max and target_sinr > 0")
        # PUs attach to primary stations, SUs to secondary ones.
        if np.any(serving < 0) or np.any(serving >= b):
            raise ValueError("serving indices out of range")
        if np.any(serving[:self.num_pu] >= self.num_pbs):
            raise ValueError("primary users must be served by primary stations")
        if np.any(serving[self.num_pu:] < self.num_pbs):
            raise ValueError("secondary users must be served by secondary stations")
        for arr in (gain, noise, p_max, serving, target):
            arr.setflags(write=False)
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "p_max", p_max)
        object.__setattr__(self, "serving", serving)
        object.__setattr__(self, "target_sinr", target)

    @property
    def num_stations(self) -> int:
        return self.num_pbs + self.num_sbs

    @property
    def num_users(self) -> int:
        return self.num_pu + self.num_su

    @property
    def pu_indices(self) -> np.ndarray:
        return np.arange(self.num_pu)

    @property
    def su_indices(self) -> np.ndarray:
        return np.arange(self.num_pu, self.num_users)

    def cell_members(self, station: int) -> np.ndarray:
        """Indices of users served by `station`."""
        return np.flatnonzero(self.serving == station)

    def own_gain(self) -> np.ndarray:
        """gain[serving[i], i] for every user i."""
        return self.gain[self.serving, np.arange(self.num_users)]


def _as_power(net: NetworkInstance, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (net.num_users,):
        raise ValueError(f"power vector must have shape ({net.num_users},)")
    if np.any(p < 0) or not np.all(np.isfinite(p)):
        raise ValueError("powers must be finite and nonnegative")
    return p


def sinr_of(net: NetworkInstance, p) -> np.ndarray:
    """Per-user SINR at its serving station under power vector p."""
    p = _as_power(net, p)
    received = net.gain @ p                       # total received power per station
    idx = np.arange(net.num_users)
    own = net.gain[net.serving, idx] * p
    denom = received[net.serving] - own + net.noise[net.serving]
    return own / denom


def total_interference(net: NetworkInstance, p, station: int) -> float:
    """Aggregate power at `station` from users it does not serve."""
    p = _as_power(net, p)
    outside = net.serving != station
    return float(net.gain[station, outside] @ p[outside])


def cognitive_interference(net: NetworkInstance, p) -> np.ndarray:
    """SU-generated interference at each primary station (length num_pbs)."""
    p = _as_power(net, p)
    su = slice(net.num_pu, net.num_users)
    return net.gain[:net.num_pbs, su] @ p[su]


def spectral_radius(mat: np.ndarray) -> float:
    """Perron root of an elementwise-nonnegative square matrix."""
    mat = np.asarray(mat, dtype=float)
    if mat.shape[0] == 0:
        return 0.0
    if np.any(mat < 0):
        raise ValueError("matrix must be elementwise nonnegative")
    return float(np.max(np.abs(np.linalg.eigvals(mat))))


def _coupling(net: NetworkInstance, gamma: np.ndarray,
              users: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalized coupling matrix F and noise load U for the given users.

    F[a, b] = gamma_a * h_{serv(a), b} / h_{serv(a), a} for b != a,
    U[a] = gamma_a * noise_{serv(a)} / h_{serv(a), a}.
    """
    serv = net.serving[users]
    own = net.gain[serv, users]
    cross = net.gain[np.ix_(serv, users)] / own[:, None]
    f = gamma[:, None] * cross
    np.fill_diagonal(f, 0.0)
    u = gamma * net.noise[serv] / own
    return f, u


def powers_from_sinr(net: NetworkInstance, gamma) -> np.ndarray:
    """Componentwise-minimal powers achieving SINR vector gamma exactly.

    Raises InfeasibleSinr when the coupling spectral radius is >= 1 (no
    finite solution exists).  The result ignores power caps; callers check
    them separately.
    """
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (net.num_users,):
        raise ValueError(f"sinr vector must have shape ({net.num_users},)")
    if np.any(gamma < 0) or not np.all(np.isfinite(gamma)):
        raise ValueError("target SINRs must be finite and nonnegative")
    users = np.arange(net.num_users)
    f, u = _coupling(net, gamma, users)
    rho = spectral_radius(f)
    if rho >= 1.0 - FEASIBLE_RHO_MARGIN:
        raise InfeasibleSinr(f"coupling spectral radius {rho:.6g} >= 1")
    p = np.linalg.solve(np.eye(net.num_users) - f, u)
    # Rounding can leave tiny negatives when targets are 0.
    return np.maximum(p, 0.0)


def is_sinr_feasible(net: NetworkInstance, gamma, rtol: float = 1e-12) -> bool:
    """True when gamma is achievable within the power caps (Definition-style:
    spectral radius below one and the minimal power solution under p_max)."""
    try:
        p = powers_from_sinr(net, gamma)
    except InfeasibleSinr:
        return False
    return bool(np.all(p <= net.p_max * (1.0 + rtol)))
