"""Monte Carlo network layouts and INI configuration handling.

Four layout kinds, all on a flat service area with receiving points at a
common height and transmitters on the ground:

* two-pbs: two primary stations on the horizontal midline, primaries only;
* four-cell-a: stations on the corners of a centered d x d square (primary
  on the main diagonal), users dropped uniformly over the whole area and
  associated with a uniformly random station of their tier;
* four-cell-b: same stations, but each user first picks a tier station
  uniformly and then drops uniformly inside that station's quadrant (so it
  is served by the nearest station of its tier);
* ad-hoc: every user is a transmitter-receiver pair, the receiver uniform
  in a disc around the transmitter; each receiver is its own station.

Gains follow k * distance^(-alpha) on the 3-D distance with the horizontal
separation clamped below at 1 m.  Per-user targets are drawn uniformly from
a finite dB set.  All draws come from one numpy Generator seeded per
snapshot, in user-index order, so snapshots are reproducible.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field

import numpy as np

from .network import NetworkInstance

KINDS = ("two-pbs", "four-cell-a", "four-cell-b", "ad-hoc")
MIN_HORIZONTAL_M = 1.0


class ConfigError(Exception):
    """Bad or missing configuration values."""


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str
    num_pu: int
    num_su: int = 0
    target_sinr_db: tuple[float, ...] = (-20.0, -24.0)
    area: tuple[float, float] | None = None
    bs_separation: float = 150.0
    bs_height: float = 20.0
    noise: float = 5e-13
    attenuation: float = 0.09
    path_loss_exponent: float = 4.0
    p_max: float = 0.1
    max_link_distance: float = 250.0
    assignment: str = "uniform"
    snapshots: int = 200
    seed: int = 1
    alphas: tuple[float, ...] = (1.0,)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown scenario kind {self.kind!r}")
        if self.area is None:
            default = (1000.0, 500.0) if self.kind == "two-pbs" else (1000.0, 1000.0)
            object.__setattr__(self, "area", default)
        w, h = self.area
        if w <= 0 or h <= 0:
            raise ConfigError("area dimensions must be positive")
        if self.kind != "ad-hoc" and not 0 < self.bs_separation < min(w, h):
            raise ConfigError("bs_separation must fit inside the area")
        if self.num_pu < 1:
            raise ConfigError("need at least one primary user")
        if self.num_su < 0:
            raise ConfigError("num_su must be nonnegative")
        if self.kind == "two-pbs" and self.num_su != 0:
            raise ConfigError("two-pbs layouts have no secondary tier")
        if not self.target_sinr_db:
            raise ConfigError("target_sinr_db must be a nonempty set")
        if self.assignment not in ("uniform", "nearest"):
            raise ConfigError("assignment must be 'uniform' or 'nearest'")
        if self.noise < 0 or self.attenuation <= 0 or self.p_max <= 0:
            raise ConfigError("noise, attenuation and p_max must be positive")
        if self.bs_height < 0 or self.path_loss_exponent <= 0:
            raise ConfigError("bs_height and path_loss_exponent must be positive")
        if self.max_link_distance <= 0:
            raise ConfigError("max_link_distance must be positive")
        if self.snapshots < 1:
            raise ConfigError("snapshots must be positive")
        if any(a <= 0 for a in self.alphas):
            raise ConfigError("alphas must be positive")


def _station_layout(cfg: ScenarioConfig):
    """Station coordinates and tier split for the cellular kinds."""
    w, h = cfg.area
    d = cfg.bs_separation
    if cfg.kind == "two-pbs":
        pbs = np.array([[w / 2 - d / 2, h / 2], [w / 2 + d / 2, h / 2]])
        return pbs, np.zeros((0, 2))
    # Centered square: primaries on the main diagonal corners, secondaries
    # on the anti-diagonal ones.
    pbs = np.array([[-d / 2, -d / 2], [d / 2, d / 2]])
    sbs = np.array([[-d / 2, d / 2], [d / 2, -d / 2]])
    return pbs, sbs


def _quadrant(cfg: ScenarioConfig, center: np.ndarray, rng) -> np.ndarray:
    """Uniform point in the area quadrant containing `center`."""
    w, h = cfg.area
    x_lo, x_hi = (-w / 2, 0.0) if center[0] < 0 else (0.0, w / 2)
    y_lo, y_hi = (-h / 2, 0.0) if center[1] < 0 else (0.0, h / 2)
    return np.array([rng.uniform(x_lo, x_hi), rng.uniform(y_lo, y_hi)])


def _uniform_in_area(cfg: ScenarioConfig, rng) -> np.ndarray:
    w, h = cfg.area
    if cfg.kind == "two-pbs":
        return np.array([rng.uniform(0.0, w), rng.uniform(0.0, h)])
    return np.array([rng.uniform(-w / 2, w / 2), rng.uniform(-h / 2, h / 2)])


def _link_receiver(cfg: ScenarioConfig, tx: np.ndarray, rng) -> np.ndarray:
    """Receiver uniform in the disc of radius max_link_distance around tx,
    redrawn until it falls inside the area."""
    w, h = cfg.area
    while True:
        r = cfg.max_link_distance * np.sqrt(rng.uniform())
        theta = rng.uniform(0.0, 2.0 * np.pi)
        rx = tx + r * np.array([np.cos(theta), np.sin(theta)])
        if -w / 2 <= rx[0] <= w / 2 and -h / 2 <= rx[1] <= h / 2:
            return rx


def generate_snapshot(cfg: ScenarioConfig, seed: int) -> NetworkInstance:
    """One random network drop for the given seed."""
    rng = np.random.default_rng(seed)
    num_users = cfg.num_pu + cfg.num_su
    if cfg.kind == "ad-hoc":
        stations = np.zeros((num_users, 2))
        users = np.zeros((num_users, 2))
        serving = np.arange(num_users)
        for i in range(num_users):
            users[i] = _uniform_in_area(cfg, rng)
            stations[i] = _link_receiver(cfg, users[i], rng)
        num_pbs, num_sbs = cfg.num_pu, cfg.num_su
    else:
        pbs, sbs = _station_layout(cfg)
        stations = np.vstack([pbs, sbs])
        num_pbs, num_sbs = len(pbs), len(sbs)
        users = np.zeros((num_users, 2))
        serving = np.zeros(num_users, dtype=int)
        for i in range(num_users):
            is_pu = i < cfg.num_pu
            lo = 0 if is_pu else num_pbs
            count = num_pbs if is_pu else num_sbs
            tier = stations[lo:lo + count]
            if cfg.kind == "four-cell-b":
                m = int(rng.integers(count))
                users[i] = _quadrant(cfg, tier[m], rng)
                serving[i] = lo + m
            else:
                users[i] = _uniform_in_area(cfg, rng)
                if cfg.kind == "two-pbs" and cfg.assignment == "nearest":
                    m = int(np.argmin(np.sum((tier - users[i]) ** 2, axis=1)))
                else:
                    m = int(rng.integers(count))
                serving[i] = lo + m
    db = np.asarray(cfg.target_sinr_db, dtype=float)
    targets = 10.0 ** (db[rng.integers(db.size, size=num_users)] / 10.0)
    horiz = np.maximum(
        np.sqrt(((stations[:, None, :] - users[None, :, :]) ** 2).sum(axis=2)),
        MIN_HORIZONTAL_M)
    dist = np.sqrt(horiz ** 2 + cfg.bs_height ** 2)
    gain = cfg.attenuation * dist ** (-cfg.path_loss_exponent)
    return NetworkInstance(
        num_pbs=num_pbs, num_sbs=num_sbs,
        num_pu=cfg.num_pu, num_su=cfg.num_su,
        gain=gain,
        noise=np.full(num_pbs + num_sbs, cfg.noise),
        p_max=np.full(num_users, cfg.p_max),
        serving=serving,
        target_sinr=targets)


# ---------------------------------------------------------------------------
# Configuration files.  Either a [scenario] section describing the generator
# above, or a [network] section spelling out one explicit instance (gains
# row per receiving point).  Targets are in dB at this boundary; everything
# internal is linear.

def load_config(path: str):
    """Parse an INI file into a ScenarioConfig or an explicit
    NetworkInstance.  Raises ConfigError on anything malformed."""
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    if parser.has_section("scenario") == parser.has_section("network"):
        raise ConfigError("config needs exactly one of [scenario] or [network]")
    try:
        if parser.has_section("scenario"):
            return _scenario_from(parser["scenario"])
        return _network_from(parser["network"])
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.replace(",", " ").split())


def _scenario_from(sec) -> ScenarioConfig:
    kwargs = {"kind": sec.get("kind", "four-cell-a"),
              "num_pu": sec.getint("num_pu")}
    if "num_su" in sec:
        kwargs["num_su"] = sec.getint("num_su")
    if "target_sinr_db" in sec:
        kwargs["target_sinr_db"] = _floats(sec["target_sinr_db"])
    if "area" in sec:
        area = _floats(sec["area"])
        if len(area) != 2:
            raise ConfigError("area needs two dimensions")
        kwargs["area"] = area
    for key in ("bs_separation", "bs_height", "noise", "attenuation",
                "path_loss_exponent", "p_max", "max_link_distance"):
        if key in sec:
            kwargs[key] = sec.getfloat(key)
    if "assignment" in sec:
        kwargs["assignment"] = sec.get("assignment")
    if "snapshots" in sec:
        kwargs["snapshots"] = sec.getint("snapshots")
    if "seed" in sec:
        kwargs["seed"] = sec.getint("seed")
    if "alphas" in sec:
        kwargs["alphas"] = _floats(sec["alphas"])
    return ScenarioConfig(**kwargs)


def _network_from(sec) -> NetworkInstance:
    num_pbs = sec.getint("num_pbs")
    num_sbs = sec.getint("num_sbs", 0)
    num_pu = sec.getint("num_pu")
    num_su = sec.getint("num_su", 0)
    rows = []
    for m in range(num_pbs + num_sbs):
        key = f"gain_{m}"
        if key not in sec:
            raise ConfigError(f"missing {key} row")
        rows.append(_floats(sec[key]))
    gain = np.array(rows, dtype=float)
    noise = np.asarray(_floats(sec["noise"]), dtype=float)
    if noise.size == 1:
        noise = np.full(num_pbs + num_sbs, noise[0])
    p_max = np.asarray(_floats(sec["p_max"]), dtype=float)
    if p_max.size == 1:
        p_max = np.full(num_pu + num_su, p_max[0])
    serving = np.asarray([int(t) for t in sec["serving"].split()], dtype=int)
    target_db = np.asarray(_floats(sec["target_sinr_db"]), dtype=float)
    if target_db.size == 1:
        target_db = np.full(num_pu + num_su, target_db[0])
    try:
        return NetworkInstance(
            num_pbs=num_pbs, num_sbs=num_sbs, num_pu=num_pu, num_su=num_su,
            gain=gain, noise=noise, p_max=p_max, serving=serving,
            target_sinr=10.0 ** (target_db / 10.0))
    except ValueError as exc:
        raise ConfigError(f"bad network section: {exc}") from exc


def build_instance(cfg_or_net, seed: int) -> NetworkInstance:
    """Snapshot from a ScenarioConfig, or the instance itself when explicit."""
    if isinstance(cfg_or_net, NetworkInstance):
        return cfg_or_net
    return generate_snapshot(cfg_or_net, seed)
