"""Experiment pipelines, initial-condition generators, configuration and
reporting.

Each experiment assembles the other modules into one verdict-producing run:
``thm22`` checks front convergence in sup norm, ``thm23`` hands the
extracted phase to the discrete curvature flow and tracks the gap,
``thm24`` fits the limiting phase offset of a periodically modulated front
and compares it with the averaging prediction, and ``step_kappa`` follows a
step-shaped phase whose transition zone spreads diffusively.

Randomness is provided by an explicit splitmix64 stream so reports are
reproducible bit for bit from (config, seed).  Reference outputs: seed 0
gives ``0xE220A8397B1DCDAF``, ``0x6E789E6AA1B965F4``, ``0x06C45D188009454F``;
seed 1 gives ``0x910A2DEC89025CC1``, ``0xBEEB8DA1658EEC67``,
``0xF893A2EEFB32555E``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import __version__ as _pkg_version
from . import flow, phase, sim
from .core import BistableNonlinearity, LatticeField, PhaseSequence, d_plus
from .errors import FlatnessViolated, H0Violated, PreAsymptotic
from .wave import WaveProfile, adjoint_solve, compute_d, solve_r, solve_wave

__all__ = [
    "ExperimentSpec",
    "ExperimentReport",
    "splitmix64",
    "splitmix64_uniform",
    "make_kappa",
    "make_v0",
    "make_initial",
    "run_thm22",
    "run_thm23",
    "run_thm24",
    "run_step_kappa",
    "run_experiment",
    "default_spec",
    "parse_config",
    "spec_from_config",
]

_MASK = (1 << 64) - 1


def splitmix64(seed: int, n: int) -> list[int]:
    """First ``n`` outputs of the splitmix64 stream for ``seed``."""
    x = seed & _MASK
    out = []
    for _ in range(n):
        x = (x + 0x9E3779B97F4A7C15) & _MASK
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        out.append(z ^ (z >> 31))
    return out

def splitmix64_uniform(seed: int, n: int) -> np.ndarray:
    """``n`` doubles in [0, 1) from the splitmix64 stream."""
    return np.array([v / 2.0 ** 64 for v in splitmix64(seed, n)])


@dataclass
class ExperimentSpec:
    """Complete description of one experiment run."""

    name: str
    a: float = 0.3
    width: int = 256
    height: int = 64
    dt: Optional[float] = None
    t_end: float = 150.0
    tau: float = 60.0
    record_every: Optional[int] = None
    boundary_j: str = "periodic"
    seed: int = 1
    kappa: dict = field(default_factory=lambda: {"kind": "periodic", "P": 8,
                                                 "amplitude": 2.0, "offset": 0.0})
    v0: dict = field(default_factory=lambda: {"kind": "none"})
    tolerances: dict = field(default_factory=dict)
    L: float = 20.0
    h: float = 0.0625

    def __post_init__(self):
        if self.name not in ("thm22", "thm23", "thm24", "step_kappa"):
            raise ValueError(f"unknown experiment name {self.name!r}")
        defaults = {"front_error": 0.02, "tracking": 0.1, "mu_stable": 0.01,
                    "mu_pred": 0.05, "edge_phase": 0.1, "flatness_handoff": 0.1,
                    "mcf_delta": 0.2}
        self.tolerances = {**defaults, **self.tolerances}
        if self.kappa.get("kind") == "periodic" and int(self.kappa.get("P", 1)) < 1:
            raise ValueError("kappa period P must be >= 1")

    def config_dict(self) -> dict:
        return {
            "name": self.name, "a": self.a, "width": self.width,
            "height": self.height, "dt": self.dt, "t_end": self.t_end,
            "tau": self.tau, "record_every": self.record_every,
            "boundary_j": self.boundary_j, "seed": self.seed,
            "kappa": self.kappa, "v0": self.v0, "tolerances": self.tolerances,
            "L": self.L, "h": self.h,
        }

    def config_hash(self) -> str:
        canon = json.dumps(self.config_dict(), sort_keys=True)
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


@dataclass
class ExperimentReport:
    """Metric series, verdicts with their tolerances, and provenance."""

    name: str
    config: dict
    series: dict
    verdicts: dict
    mu_hat: Optional[float] = None
    mu_pred: Optional[float] = None
    provenance: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v["pass"] for v in self.verdicts.values())

    def to_ndjson(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            meta = {"record": "meta", "name": self.name, "config": self.config,
                    "mu_hat": self.mu_hat, "mu_pred": self.mu_pred,
                    "provenance": self.provenance, "passed": self.passed}
            fh.write(json.dumps(meta) + "\n")
            for key, rows in self.series.items():
                for t, value in rows:
                    fh.write(json.dumps({"record": "series", "metric": key,
                                         "t": t, "value": value}) + "\n")
            for key, v in self.verdicts.items():
                fh.write(json.dumps({"record": "verdict", "criterion": key, **v}) + "\n")


def _verdict(value: float, tolerance: float, ok: Optional[bool] = None) -> dict:
    if ok is None:
        ok = value < tolerance
    return {"value": value, "tolerance": tolerance, "pass": bool(ok)}


# ---------------------------------------------------------------------------
# initial data generators


def make_kappa(spec: ExperimentSpec) -> PhaseSequence:
    """Initial phase modulation sequence from the configured generator."""
    cfg = spec.kappa
    kind = cfg.get("kind", "periodic")
    j = np.arange(spec.height)
    offset = float(cfg.get("offset", 0.0))
    if kind == "periodic":
        P = int(cfg.get("P", 8))
        amp = float(cfg.get("amplitude", 2.0))
        vals = amp * np.sin(2.0 * np.pi * j / P) + offset
    elif kind == "step":
        lo = float(cfg.get("lo", 0.0))
        hi = float(cfg.get("hi", 4.0))
        vals = np.where(j < spec.height // 2, lo, hi) + offset
    elif kind == "random":
        amp = float(cfg.get("amplitude", 1.0))
        seed = int(cfg.get("seed", spec.seed))
        vals = amp * (2.0 * splitmix64_uniform(seed, spec.height) - 1.0) + offset
    else:
        raise ValueError(f"unknown kappa kind {kind!r}")
    return PhaseSequence(vals, boundary_j=spec.boundary_j)


def make_v0(spec: ExperimentSpec) -> np.ndarray:
    """Localized perturbation v0 on the window (zero, bump, or summable noise)."""
    cfg = spec.v0
    kind = cfg.get("kind", "none")
    shape = (spec.width, spec.height)
    if kind == "none":
        return np.zeros(shape)
    i = (np.arange(spec.width) - spec.width // 2).astype(float)[:, None]
    j = (np.arange(spec.height) - spec.height // 2).astype(float)[None, :]
    ci = float(cfg.get("center_i", 0.0))
    cj = float(cfg.get("center_j", 0.0))
    if kind == "gaussian_bump":
        amp = float(cfg.get("amp", 0.5))
        width = float(cfg.get("width", 3.0))
        return amp * np.exp(-((i - ci) ** 2 + (j - cj) ** 2) / (2.0 * width * width))
    if kind == "random_l1":
        amp = float(cfg.get("amp", 0.5))
        decay = float(cfg.get("decay", 4.0))
        seed = int(cfg.get("seed", spec.seed))
        noise = 2.0 * splitmix64_uniform(seed, spec.width * spec.height) - 1.0
        envelope = np.exp(-(np.abs(i - ci) + np.abs(j - cj)) / decay)
        return amp * noise.reshape(shape) * envelope
    raise ValueError(f"unknown v0 kind {kind!r}")


def make_initial(spec: ExperimentSpec, w: WaveProfile) -> LatticeField:
    """Front-like initial data ``u0 = Phi(i - kappa_j) + v0``.

    The bistability side condition (values near the left window edge staying
    strictly below ``a``, near the right edge strictly above) is checked on
    the first and last five columns as a finite-window proxy for the
    infinite-lattice limits.
    """
    kappa = make_kappa(spec)
    i_offset = -(spec.width // 2)
    i = (np.arange(spec.width) + i_offset).astype(float)[:, None]
    vals = w.phi_at(i - kappa.values[None, :]) + make_v0(spec)
    edge = 5
    left = float(np.max(vals[:edge, :]))
    right = float(np.min(vals[-edge:, :]))
    if left >= w.a:
        raise H0Violated(f"left-edge value {left:.6g} is not below a={w.a:g}")
    if right <= w.a:
        raise H0Violated(f"right-edge value {right:.6g} is not above a={w.a:g}")
    return LatticeField(vals, i_offset=i_offset, boundary_j=spec.boundary_j)


# ---------------------------------------------------------------------------
# pipelines


def _prepare(spec: ExperimentSpec, w: Optional[WaveProfile], *, need_d: bool = False):
    if w is None:
        f = BistableNonlinearity(a=spec.a)
        w = solve_wave(f, L=spec.L, h=spec.h)
    if need_d and w.d is None:
        adjoint_solve(w)
        compute_d(w)
        solve_r(w)
    cfg = sim.SimConfig(w.f, dt=spec.dt, t_end=spec.t_end,
                        record_every=spec.record_every, width=spec.width,
                        height=spec.height, boundary_j=spec.boundary_j)
    return w, cfg


def _provenance(spec: ExperimentSpec) -> dict:
    return {"config_hash": spec.config_hash(), "package_version": _pkg_version,
            "numpy_version": np.__version__}


def _phase_series(snaps, w) -> list[tuple[float, phase.PhaseExtract]]:
    return [(t, phase.extract(u, w)) for t, u in snaps]


def run_thm22(spec: ExperimentSpec, w: Optional[WaveProfile] = None) -> ExperimentReport:
    """Front convergence: sup distance to the fitted profile falls below
    tolerance by ``t_end``."""
    w, cfg = _prepare(spec, w)
    u0 = make_initial(spec, w)
    snaps = sim.run(u0, cfg)
    extracts = _phase_series(snaps, w)
    fe_series = []
    fl_series = []
    for (t, u), (_, g) in zip(snaps, extracts):
        if not g.all_defined:
            continue
        fe_series.append((t, phase.front_error(u, w, g)))
        fl_series.append((t, phase.flatness(g)))
    if not fe_series:
        raise PreAsymptotic("no snapshot had every row's phase defined")
    tol = spec.tolerances["front_error"]
    final = fe_series[-1][1]
    report = ExperimentReport(
        name=spec.name, config=spec.config_dict(),
        series={"front_error": fe_series, "flatness": fl_series},
        verdicts={"front_error_final": _verdict(final, tol)},
        provenance=_provenance(spec))
    return report


def run_thm23(spec: ExperimentSpec, w: Optional[WaveProfile] = None) -> ExperimentReport:
    """Curvature-flow tracking: hand the extracted phase at ``tau`` to the
    discrete curvature flow and bound the gap up to ``t_end``."""
    w, cfg = _prepare(spec, w, need_d=True)
    u0 = make_initial(spec, w)
    snaps = sim.run(u0, cfg)
    extracts = _phase_series(snaps, w)
    handoff_tol = spec.tolerances["flatness_handoff"]
    idx0 = None
    for idx, (t, g) in enumerate(extracts):
        if t >= spec.tau:
            idx0 = idx
            break
    if idx0 is None:
        raise FlatnessViolated(f"no snapshot at or after tau={spec.tau:g}")
    t0, g0 = extracts[idx0]
    if not g0.all_defined:
        raise PreAsymptotic(f"phase undefined on some rows at tau={t0:g}")
    fl0 = phase.flatness(g0)
    if fl0 > handoff_tol:
        raise FlatnessViolated(
            f"flatness {fl0:.4f} at hand-off t={t0:g} exceeds {handoff_tol:g}")
    times = [t for t, _ in extracts[idx0:]]
    params = flow.FlowParams(c=w.c, d=w.d)
    gamma0 = PhaseSequence(g0.gamma.values.copy(), boundary_j=spec.boundary_j)
    mcf = flow.mcf_solve(gamma0, params, t_grid=[t - t0 for t in times])
    vtr = flow.v_solve(gamma0, params, t_grid=[t - t0 for t in times])
    gap_series = []
    v_gap_series = []
    for k, (t, g) in enumerate(extracts[idx0:]):
        if not g.all_defined:
            continue
        gap_series.append((t, float(np.max(np.abs(g.gamma.values - mcf.values[k])))))
        v_gap_series.append((t, float(np.max(np.abs(mcf.values[k] - vtr.values[k])))))
    sup_gap = max(v for _, v in gap_series)
    sup_v_gap = max(v for _, v in v_gap_series)
    tol = spec.tolerances["tracking"]
    report = ExperimentReport(
        name=spec.name, config=spec.config_dict(),
        series={"mcf_gap": gap_series, "mcf_v_gap": v_gap_series,
                "flatness_handoff": [(t0, fl0)]},
        verdicts={"tracking_sup": _verdict(sup_gap, tol),
                  "handoff_flatness": _verdict(fl0, handoff_tol),
                  "mcf_vs_v": _verdict(sup_v_gap, tol)},
        provenance=_provenance(spec))
    return report


def _mu_prediction(w: WaveProfile, g: phase.PhaseExtract, tau: float) -> float:
    """Averaging prediction for the limiting offset from the phase at the
    hand-off time: ``(1/d) log mean_j exp(d (gamma_j - c tau))``."""
    rel = g.gamma.values - w.c * tau
    return float(np.log(np.mean(np.exp(w.d * rel))) / w.d)


def run_thm24(spec: ExperimentSpec, w: Optional[WaveProfile] = None) -> ExperimentReport:
    """Limiting offset of a periodically modulated front: fit ``mu`` from
    late snapshots, check stability, the final profile fit, and the
    averaging prediction."""
    w, cfg = _prepare(spec, w, need_d=True)
    u0 = make_initial(spec, w)
    snaps = sim.run(u0, cfg)
    extracts = _phase_series(snaps, w)
    mu_series = []
    for (t, _), (_, g) in zip(snaps, extracts):
        if g.all_defined:
            mu_series.append((t, float(np.mean(g.gamma.values)) - w.c * t))
    if not mu_series:
        raise PreAsymptotic("no snapshot had every row's phase defined")
    n = len(mu_series)
    tail10 = [v for _, v in mu_series[max(0, n - max(1, n // 10)):]]
    tail20 = [v for _, v in mu_series[max(0, n - max(1, n // 5)):]]
    mu_hat = float(np.mean(tail10))
    mu_spread = float(max(tail20) - min(tail20))
    t_end, u_end = snaps[-1]
    i = u_end.lattice_i().astype(float)[:, None]
    final_err = float(np.max(np.abs(u_end.values - w.phi_at(i - w.c * t_end - mu_hat))))
    first_defined = next(((t, g) for (t, g) in extracts if g.all_defined))
    tau = max(spec.tau, first_defined[0])
    g_tau = next(g for (t, g) in extracts if t >= tau and g.all_defined)
    t_tau = next(t for (t, g) in extracts if t >= tau and g.all_defined)
    mu_pred = _mu_prediction(w, g_tau, t_tau)
    tols = spec.tolerances
    report = ExperimentReport(
        name=spec.name, config=spec.config_dict(),
        series={"mu_of_t": mu_series},
        verdicts={"mu_stable": _verdict(mu_spread, tols["mu_stable"]),
                  "final_profile_error": _verdict(final_err, tols["front_error"]),
                  "mu_vs_prediction": _verdict(abs(mu_hat - mu_pred), tols["mu_pred"])},
        mu_hat=mu_hat, mu_pred=mu_pred,
        provenance=_provenance(spec))
    return report


def run_step_kappa(spec: ExperimentSpec, w: Optional[WaveProfile] = None) -> ExperimentReport:
    """Step-shaped phase: edge rows settle at the two plateau offsets while
    the transition zone is tracked by the curvature flow and spreads like
    ``sqrt(t)`` in the diffusive phase proxy."""
    if spec.boundary_j != "reflect":
        raise ValueError("step_kappa needs the reflect j-boundary")
    w, cfg = _prepare(spec, w, need_d=True)
    u0 = make_initial(spec, w)
    kappa = make_kappa(spec)
    lo = float(kappa.values[0])
    hi = float(kappa.values[-1])
    snaps = sim.run(u0, cfg)
    extracts = _phase_series(snaps, w)
    t_end, g_end = extracts[-1]
    if not g_end.all_defined:
        raise PreAsymptotic("phase undefined on some rows at t_end")
    rows = 3
    drift = w.c * t_end
    edge_lo = float(np.mean(g_end.gamma.values[:rows])) - drift
    edge_hi = float(np.mean(g_end.gamma.values[-rows:])) - drift
    edge_err = max(abs(edge_lo - lo), abs(edge_hi - hi))

    # curvature-flow tracking of the transition zone from the hand-off time
    idx0 = next((k for k, (t, g) in enumerate(extracts)
                 if t >= spec.tau and g.all_defined), None)
    if idx0 is None:
        raise PreAsymptotic(f"phase undefined at tau={spec.tau:g}")
    t0, g0 = extracts[idx0]
    times = [t for t, _ in extracts[idx0:]]
    params = flow.FlowParams(c=w.c, d=w.d)
    gamma0 = PhaseSequence(g0.gamma.values.copy(), boundary_j="reflect")
    # the step transition hands off with a mild but not tiny slope, so the
    # curvature-flow flatness guard gets the wider experiment-level bound
    mcf = flow.mcf_solve(gamma0, params, t_grid=[t - t0 for t in times],
                         delta=spec.tolerances["mcf_delta"])
    gap_series = [(t, float(np.max(np.abs(g.gamma.values - mcf.values[k]))))
                  for k, (t, g) in enumerate(extracts[idx0:]) if g.all_defined]
    sup_gap = max(v for _, v in gap_series)

    # diffusive spreading of the transition zone, measured on the phase LDE
    # proxy over a long window so late times stay uncontaminated by edges
    proxy_h = 512
    jj = np.arange(proxy_h)
    proxy0 = PhaseSequence(np.where(jj < proxy_h // 2, lo, hi), boundary_j="reflect")
    t_probe = np.geomspace(10.0, 1000.0, 13)
    proxy = flow.v_solve(proxy0, params, t_grid=t_probe)
    widths = []
    for row in proxy.values:
        rel = (row - row[0]) / (row[-1] - row[0])
        j10 = int(np.searchsorted(rel, 0.1))
        j90 = int(np.searchsorted(rel, 0.9))
        widths.append(float(j90 - j10))
    slope = float(np.polyfit(np.log(t_probe), np.log(widths), 1)[0])

    tols = spec.tolerances
    report = ExperimentReport(
        name=spec.name, config=spec.config_dict(),
        series={"mcf_gap": gap_series,
                "proxy_width": list(zip(t_probe.tolist(), widths))},
        verdicts={"edge_phases": _verdict(edge_err, tols["edge_phase"]),
                  "tracking_sup": _verdict(sup_gap, tols["tracking"]),
                  "width_slope": _verdict(abs(slope - 0.5), 0.1)},
        provenance=_provenance(spec))
    return report


_RUNNERS = {"thm22": run_thm22, "thm23": run_thm23, "thm24": run_thm24,
            "step_kappa": run_step_kappa}


def run_experiment(spec: ExperimentSpec, w: Optional[WaveProfile] = None) -> ExperimentReport:
    return _RUNNERS[spec.name](spec, w)


def default_spec(name: str) -> ExperimentSpec:
    """Built-in experiment parameters reproducing the headline checks."""
    if name == "thm22":
        return ExperimentSpec(name="thm22", t_end=150.0)
    if name == "thm23":
        return ExperimentSpec(name="thm23", t_end=200.0, tau=60.0)
    if name == "thm24":
        return ExperimentSpec(
            name="thm24", t_end=150.0, tau=30.0,
            kappa={"kind": "periodic", "P": 8, "amplitude": 1.0, "offset": 0.0})
    if name in ("step", "step_kappa"):
        return ExperimentSpec(
            name="step_kappa", t_end=150.0, tau=60.0, boundary_j="reflect",
            height=128, kappa={"kind": "step", "lo": 0.0, "hi": 4.0})
    raise ValueError(f"unknown experiment name {name!r}")


# ---------------------------------------------------------------------------
# configuration files: flat key=value text, # comments


def parse_config(text: str) -> dict:
    """Parse flat ``key=value`` lines (UTF-8, ``#`` comments) to a dict."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _coerce(value: str):
    low = value.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        return value


def spec_from_config(cfg: dict, name: Optional[str] = None) -> ExperimentSpec:
    """Build an :class:`ExperimentSpec` from a flat config dict.

    Scalar spec fields map directly (``a``, ``width``, ``height``, ``dt``,
    ``t_end``, ``tau``, ``seed``, ``boundary_j``, ``L``, ``h``,
    ``record_every``); generator fields use prefixes ``kappa_*`` and
    ``v0_*``; tolerance overrides use ``tol_<criterion>``.
    """
    values = {k: _coerce(v) for k, v in cfg.items()}
    name = name or values.pop("name", None)
    if name is None:
        raise ValueError("config must set name= (thm22|thm23|thm24|step_kappa)")
    spec = default_spec(str(name))
    for key in ("a", "width", "height", "dt", "t_end", "tau", "record_every",
                "boundary_j", "seed", "L", "h"):
        if key in values:
            setattr(spec, key, values.pop(key))
    kappa = dict(spec.kappa)
    v0 = dict(spec.v0)
    for key in list(values):
        if key.startswith("kappa_"):
            kappa[key[len("kappa_"):]] = values.pop(key)
        elif key.startswith("v0_"):
            v0[key[len("v0_"):]] = values.pop(key)
        elif key.startswith("tol_"):
            spec.tolerances[key[len("tol_"):]] = values.pop(key)
    values.pop("name", None)
    if values:
        raise ValueError(f"unknown config keys: {sorted(values)}")
    spec.kappa = kappa
    spec.v0 = v0
    spec.__post_init__()
    return spec
