"""Shared fixtures and independent oracles for the test suite.

Fixture networks are small enough to solve by hand:

* t2: two primary cells with one user each (own gain 1, cross gain 0.5,
  target 0.5, cap 1, noise 0.1).  Everything about it is rational:
  H = [[1/3, 1/6], [1/6, 1/3]], A = [[1.6, 0.4], [0.4, 1.6]],
  Phi_max = (3, 3), C = (2.8, 2.8), TITL = (1.9, 1.9), itl0 = (1.75, 1.75),
  and the zero-interference powers are (1/15, 1/15).
* t2x: t2 plus one secondary cell with two users that hit the opposite
  primary station hard (gain 10).  Overloaded on purpose: the capped
  stationary point with everyone active is (1, 1, 0.3, 0.3) with both
  primaries stuck at their caps below target.
* a dyadic single cell (cap 0.5, target 1, noise 0.125) where every
  closed-form quantity is a sum of powers of two, so equalities hold bit
  for bit.

The oracles here never reuse the code paths they check: rational
stationary points come from Fraction Gaussian elimination, spectral radii
from numpy eigenvalues (the package uses power iteration), exact-target
powers from the per-user balance equations (the package goes through the
cell-aggregated form), and admission optima from exhaustive subset
enumeration.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from underlaypc import NetworkInstance


# ---------------------------------------------------------------------------
# Fixture networks.

def make_t2() -> NetworkInstance:
    return NetworkInstance(
        num_pbs=2, num_sbs=0, num_pu=2, num_su=0,
        gain=[[1.0, 0.5], [0.5, 1.0]],
        noise=[0.1, 0.1], p_max=[1.0, 1.0],
        serving=[0, 1], target_sinr=[0.5, 0.5])


def make_t2x() -> NetworkInstance:
    return NetworkInstance(
        num_pbs=2, num_sbs=1, num_pu=2, num_su=2,
        gain=[[1.0, 0.5, 10.0, 0.3],
              [0.5, 1.0, 0.3, 10.0],
              [0.1, 0.1, 1.0, 1.0]],
        noise=[0.1, 0.1, 0.1], p_max=[1.0, 1.0, 1.0, 1.0],
        serving=[0, 1, 2, 2], target_sinr=[0.5, 0.5, 0.5, 0.5])


def make_single_cell(h: float = 1.0, p_max: float = 1.0,
                     target: float = 1.0, noise: float = 0.1) -> NetworkInstance:
    return NetworkInstance(
        num_pbs=1, num_sbs=0, num_pu=1, num_su=0,
        gain=[[h]], noise=[noise], p_max=[p_max],
        serving=[0], target_sinr=[target])


def make_dyadic_cell() -> NetworkInstance:
    return make_single_cell(h=1.0, p_max=0.5, target=1.0, noise=0.125)


@pytest.fixture
def t2() -> NetworkInstance:
    return make_t2()


@pytest.fixture
def t2x() -> NetworkInstance:
    return make_t2x()


# ---------------------------------------------------------------------------
# Random instance generators (own-cell gains dominate, so mild targets are
# usually jointly feasible; heavier targets overload the drop).

def random_network(rng, num_pbs: int, num_sbs: int, num_pu: int, num_su: int,
                   cross_scale: float = 0.05,
                   target_lo: float = 0.05, target_hi: float = 0.5,
                   noise: float = 0.01, p_max: float = 1.0) -> NetworkInstance:
    b, m = num_pbs + num_sbs, num_pu + num_su
    serving = np.concatenate([
        rng.integers(num_pbs, size=num_pu),
        num_pbs + rng.integers(num_sbs, size=num_su)
        if num_su else np.zeros(0, dtype=int)])
    gain = cross_scale * rng.lognormal(0.0, 1.0, size=(b, m))
    gain[serving, np.arange(m)] = rng.uniform(0.5, 2.0, size=m)
    return NetworkInstance(
        num_pbs=num_pbs, num_sbs=num_sbs, num_pu=num_pu, num_su=num_su,
        gain=gain, noise=np.full(b, noise), p_max=np.full(m, p_max),
        serving=serving,
        target_sinr=rng.uniform(target_lo, target_hi, size=m))


def random_feasible_network(rng, num_pbs: int, num_sbs: int,
                            num_pu: int, num_su: int,
                            attempts: int = 200, **kwargs) -> NetworkInstance:
    """Random instance whose full target vector is feasible (oracle-checked)."""
    for _ in range(attempts):
        net = random_network(rng, num_pbs, num_sbs, num_pu, num_su, **kwargs)
        p = oracle_feasible_powers(net)
        if p is not None and np.all(p <= net.p_max):
            return net
    raise AssertionError("no feasible draw; loosen the generator parameters")


# ---------------------------------------------------------------------------
# Independent oracles.

def rho_eig(mat) -> float:
    """Spectral radius via eigenvalues."""
    mat = np.asarray(mat, dtype=float)
    if mat.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(mat))))


def oracle_coupling(net: NetworkInstance, active=None, extra_at_station=None):
    """(F, u) of the per-user balance p = F p + u at exact targets,
    transcribed straight from the SINR definition.  `extra_at_station`
    adds fixed external interference per receiving point."""
    act = np.arange(net.num_users) if active is None \
        else np.asarray(list(active), dtype=int)
    own = net.gain[net.serving[act], act]
    f = net.target_sinr[act, None] \
        * net.gain[np.ix_(net.serving[act], act)] / own[:, None]
    np.fill_diagonal(f, 0.0)
    floor = net.noise[net.serving[act]].astype(float)
    if extra_at_station is not None:
        floor = floor + np.asarray(extra_at_station, dtype=float)[net.serving[act]]
    u = net.target_sinr[act] * floor / own
    return f, u


def oracle_feasible_powers(net: NetworkInstance, active=None,
                           extra_at_station=None):
    """Exact-target powers of the active set, or None when the eigenvalue
    oracle says no finite solution exists."""
    f, u = oracle_coupling(net, active, extra_at_station)
    if u.size == 0:
        return u
    if rho_eig(f) >= 1.0:
        return None
    p = np.linalg.solve(np.eye(u.size) - f, u)
    if np.any(p < 0):
        return None
    return p


def oracle_best_subset(net: NetworkInstance, rtol: float = 1e-12) -> int:
    """Largest number of SUs jointly feasible with all PUs at targets,
    by exhaustive enumeration (meant for SU counts <= 8)."""
    pus = list(range(net.num_pu))
    sus = list(range(net.num_pu, net.num_users))
    for k in range(len(sus), -1, -1):
        for subset in itertools.combinations(sus, k):
            act = pus + list(subset)
            p = oracle_feasible_powers(net, act)
            if p is not None and np.all(p <= net.p_max[act] * (1.0 + rtol)):
                return k
    return 0


def exact_fixed_point(net: NetworkInstance, active=None) -> list[Fraction]:
    """Uncapped stationary powers of the active set as exact Fractions.

    Only meaningful for hand-built fixtures whose gains, targets and noise
    are exactly representable floats.
    """
    act = list(range(net.num_users)) if active is None \
        else [int(i) for i in active]
    n = len(act)
    a = [[Fraction(0)] * n for _ in range(n)]
    b = [Fraction(0)] * n
    for r, i in enumerate(act):
        s = int(net.serving[i])
        own = Fraction(float(net.gain[s, i]))
        t = Fraction(float(net.target_sinr[i]))
        a[r][r] = Fraction(1)
        for c, j in enumerate(act):
            if j != i:
                a[r][c] = -t * Fraction(float(net.gain[s, j])) / own
        b[r] = t * Fraction(float(net.noise[s])) / own
    return solve_exact(a, b)


def solve_exact(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination over Fractions."""
    n = len(b)
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                m = a[r][col] / a[col][col]
                for c in range(col, n):
                    a[r][c] -= m * a[col][c]
                b[r] -= m * b[col]
    return [b[r] / a[r][r] for r in range(n)]
