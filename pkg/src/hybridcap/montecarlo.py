"""Parameter sweeps, trial averaging, knee detection and slope fits."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from importlib import resources
from pathlib import Path
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .channel import ChannelRealization
from .protocols import SchemeCapacity, evaluate_wireless, report_from_capacities
from .scaling import ScalingPoint, Scheme, generalized_exponent
from .topology import ConfigurationError, NetworkConfig, generate

__all__ = [
    "SWEEP_VARIABLES",
    "CSV_COLUMNS",
    "DEFAULT_TRIALS",
    "PACKAGED_EXPONENT_POINTS",
    "SweepError",
    "KneeNotDetected",
    "SweepSpec",
    "SweepRow",
    "SweepResult",
    "SlopeFit",
    "XkiReport",
    "ExponentReport",
    "trial_seed",
    "run_sweep",
    "run_series",
    "detect_knee",
    "fit_loglog",
    "verify_xki_scaling",
    "verify_exponent_empirical",
    "instance_for",
    "scaled_config",
    "Experiment",
    "packaged_experiments",
    "load_experiment",
]

SWEEP_VARIABLES = ("r_bs", "n", "m", "l", "alpha")
CSV_COLUMNS = ("variable", "value", "t_ish_mean", "t_imh_mean", "t_n_mean", "ci95", "bottleneck_mode")
DEFAULT_TRIALS = 200
Z95 = 1.959963984540054

# (alpha, beta, gamma, eta) tuples checked against the simulator
PACKAGED_EXPONENT_POINTS = (
    ScalingPoint(3.5, 0.25, 0.25, 2.0),
    ScalingPoint(3.5, 0.25, 0.25, -1.0),
    ScalingPoint(3.5, 0.4, 0.2, 2.0),
    ScalingPoint(4.0, 0.5, 0.3, 0.0),
)


class SweepError(ConfigurationError):
    """A sweep value produced an invalid network configuration."""

    def __init__(self, variable: str, value, cause: Exception):
        super().__init__(f"{variable}={value}: {cause}")
        self.variable = variable
        self.value = value
        self.cause = cause


class KneeNotDetected(RuntimeError):
    """The sweep has not saturated, so no knee can be located."""


def trial_seed(seed: int, trial: int) -> int:
    """64-bit seed of one trial.

    It does not depend on the sweep value, so every value of a sweep sees
    the same node drops and phases (common random numbers).
    """
    state = np.random.SeedSequence([int(seed), int(trial)]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


@dataclass(frozen=True)
class SweepSpec:
    base: NetworkConfig
    variable: str
    values: tuple
    trials: int = DEFAULT_TRIALS
    seed: int = 0

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"variable must be one of {SWEEP_VARIABLES}, got {self.variable!r}")
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError("values must be nonempty")
        if isinstance(self.trials, bool) or not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        for v in self.values:
            self.config_for(v)

    def config_for(self, value) -> NetworkConfig:
        if self.variable in ("n", "m", "l"):
            if float(value) != int(value):
                raise SweepError(self.variable, value, ValueError("must be an integer"))
            value = int(value)
        else:
            value = float(value)
        try:
            return self.base.replace(**{self.variable: value})
        except ConfigurationError as exc:
            raise SweepError(self.variable, value, exc) from exc

    def to_dict(self) -> dict:
        return {
            "base": self.base.to_dict(),
            "variable": self.variable,
            "values": list(self.values),
            "trials": self.trials,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SweepRow:
    value: float
    t_ish_mean: float
    t_imh_mean: float
    t_n_mean: float
    ci95: float
    bottleneck_mode: str
    bottleneck_fraction: float
    t_n: tuple = field(repr=False, default=())
    t_ish: tuple = field(repr=False, default=())
    t_imh: tuple = field(repr=False, default=())
    bottlenecks: tuple = field(repr=False, default=())

    def summary(self) -> dict:
        return {
            "value": self.value,
            "t_ish_mean": self.t_ish_mean,
            "t_imh_mean": self.t_imh_mean,
            "t_n_mean": self.t_n_mean,
            "ci95": self.ci95,
            "bottleneck_mode": self.bottleneck_mode,
            "bottleneck_fraction": self.bottleneck_fraction,
        }


@dataclass(frozen=True)
class SweepResult:
    spec: SweepSpec
    rows: tuple

    @property
    def variable(self) -> str:
        return self.spec.variable

    @property
    def values(self) -> np.ndarray:
        return np.array([r.value for r in self.rows], dtype=float)

    @property
    def t_n_mean(self) -> np.ndarray:
        return np.array([r.t_n_mean for r in self.rows])

    @property
    def ci95(self) -> np.ndarray:
        return np.array([r.ci95 for r in self.rows])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([
                self.variable, _fmt(r.value), _fmt(r.t_ish_mean), _fmt(r.t_imh_mean),
                _fmt(r.t_n_mean), _fmt(r.ci95), r.bottleneck_mode,
            ])
        return buf.getvalue()

    def to_json(self, per_trial: bool = False) -> str:
        rows = []
        for r in self.rows:
            d = r.summary()
            if per_trial:
                d["trials"] = [
                    {"t_ish": a, "t_imh": b, "t_n": c, "bottleneck": k}
                    for a, b, c, k in zip(r.t_ish, r.t_imh, r.t_n, r.bottlenecks)
                ]
            rows.append(d)
        return json.dumps({"spec": self.spec.to_dict(), "rows": rows}, indent=2)


def _fmt(x: float) -> str:
    return repr(float(x))


def _row(value, t_ish, t_imh, t_n, kinds) -> SweepRow:
    t_n = np.asarray(t_n)
    ci = Z95 * float(np.std(t_n, ddof=1)) / math.sqrt(len(t_n)) if len(t_n) > 1 else 0.0
    counts = Counter(kinds)
    mode, hits = max(counts.items(), key=lambda kv: (kv[1], kv[0]))
    return SweepRow(
        value=float(value),
        t_ish_mean=float(np.mean(t_ish)),
        t_imh_mean=float(np.mean(t_imh)),
        t_n_mean=float(np.mean(t_n)),
        ci95=ci,
        bottleneck_mode=mode,
        bottleneck_fraction=hits / len(kinds),
        t_n=tuple(float(v) for v in t_n),
        t_ish=tuple(float(v) for v in t_ish),
        t_imh=tuple(float(v) for v in t_imh),
        bottlenecks=tuple(kinds),
    )


def instance_for(config: NetworkConfig, seed: int) -> dict[Scheme, SchemeCapacity]:
    """Wireless capacities of one trial; the backhaul rate is applied later."""
    config = config.replace(seed=seed)
    topo = generate(config)
    return evaluate_wireless(topo, ChannelRealization(topo, seed=seed), config)


def run_series(spec: SweepSpec, r_bs_values: Sequence[float]) -> dict[float, SweepResult]:
    """Run ``spec`` once for each backhaul rate in ``r_bs_values``.

    Wireless capacities depend only on the non-backhaul parameters, so each
    (value, trial) instance is drawn once and shared by every backhaul rate.
    """
    r_bs_values = [float(r) for r in r_bs_values]
    if spec.variable == "r_bs":
        raise ValueError("series over r_bs is only defined for a non-backhaul sweep variable")
    collected = {r: [] for r in r_bs_values}
    for value in spec.values:
        config = spec.config_for(value)
        samples = {r: ([], [], [], []) for r in r_bs_values}
        for t in range(spec.trials):
            try:
                caps = instance_for(config, trial_seed(spec.seed, t))
            except ConfigurationError as exc:
                raise SweepError(spec.variable, value, exc) from exc
            for r in r_bs_values:
                rep = report_from_capacities(caps, r)
                s = samples[r]
                s[0].append(rep.t_ish)
                s[1].append(rep.t_imh)
                s[2].append(rep.t_n)
                s[3].append(str(rep.bottleneck))
        for r in r_bs_values:
            collected[r].append(_row(value, *samples[r]))
    out = {}
    for r in r_bs_values:
        sub = dataclasses.replace(spec, base=spec.base.replace(r_bs=r))
        out[r] = SweepResult(sub, tuple(collected[r]))
    return out


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Average both protocols over ``spec.trials`` random instances per value.

    Deterministic for a fixed spec.  A backhaul sweep reuses each trial's
    wireless capacities across all values.
    """
    if spec.variable != "r_bs":
        return run_series(spec, [spec.base.r_bs])[float(spec.base.r_bs)]
    values = [float(v) for v in spec.values]
    for v in values:
        spec.config_for(v)
    samples = [([], [], [], []) for _ in values]
    for t in range(spec.trials):
        try:
            caps = instance_for(spec.base, trial_seed(spec.seed, t))
        except ConfigurationError as exc:
            raise SweepError(spec.variable, values[0], exc) from exc
        for s, r in zip(samples, values):
            rep = report_from_capacities(caps, r)
            s[0].append(rep.t_ish)
            s[1].append(rep.t_imh)
            s[2].append(rep.t_n)
            s[3].append(str(rep.bottleneck))
    return SweepResult(spec, tuple(_row(v, *s) for v, s in zip(values, samples)))


def detect_knee(result: SweepResult | tuple, threshold: float = 0.99,
                flat_tolerance: float = 0.01) -> float:
    """Smallest backhaul rate reaching ``threshold`` of the sweep maximum.

    ``result`` is a backhaul sweep or a pair ``(r_bs values, mean t_n)``.
    The crossing is linearly interpolated between bracketing points.

    Raises
    ------
    KneeNotDetected
        If the last two points differ by more than ``flat_tolerance``.
    """
    if isinstance(result, SweepResult):
        if result.variable != "r_bs":
            raise ValueError("knee detection needs a sweep over r_bs")
        x, y = result.values, result.t_n_mean
    else:
        x, y = (np.asarray(a, dtype=float) for a in result)
    if len(x) < 4:
        raise ValueError("knee detection needs at least 4 sweep points")
    order = np.argsort(x)
    x, y = x[order], y[order]
    top = float(y.max())
    if top <= 0:
        return float(x[0])
    if abs(y[-1] - y[-2]) > flat_tolerance * top:
        raise KneeNotDetected(
            f"sweep not saturated: last two points differ by {abs(y[-1] - y[-2]) / top:.1%}"
        )
    target = threshold * top
    i = int(np.argmax(y >= target))
    if i == 0:
        return float(x[0])
    x0, x1, y0, y1 = x[i - 1], x[i], y[i - 1], y[i]
    return float(x0 + (target - y0) * (x1 - x0) / (y1 - y0))


@dataclass(frozen=True)
class SlopeFit:
    """OLS fit of ``y = slope * x + intercept``."""

    slope: float
    stderr: float
    intercept: float

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def fit_loglog(x: Iterable[float], y: Iterable[float]) -> SlopeFit:
    """Least-squares slope of ``log y`` against ``log x``."""
    return _ols(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)))


def _ols(x: np.ndarray, y: np.ndarray) -> SlopeFit:
    if len(x) < 2:
        raise ValueError("need at least two points to fit a slope")
    a = np.column_stack([x, np.ones_like(x)])
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    dof = len(x) - 2
    if dof > 0:
        resid = y - a @ coef
        s2 = float(resid @ resid) / dof
        se = math.sqrt(s2 / float(np.sum((x - x.mean()) ** 2)))
    else:
        se = 0.0
    return SlopeFit(float(coef[0]), se, float(coef[1]))


@dataclass(frozen=True)
class XkiReport:
    """Growth of cross-cell pair counts with ``n``.

    ``exponent`` fits the mean cross-cell count, which concentrates around
    ``n**(a-b)``.  ``max_fit`` fits the largest count; extreme-value
    fluctuations of order ``sqrt(mean * log n)`` bias it at finite ``n``.
    """

    a: float
    b: float
    n_values: tuple
    mean_x: tuple
    max_x: tuple
    exponent: SlopeFit
    max_fit: SlopeFit
    max_vs_loglog: SlopeFit
    max_vs_log: SlopeFit
    log_constant: float
    branch: str

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["n_values"] = list(self.n_values)
        d["mean_x"] = list(self.mean_x)
        d["max_x"] = list(self.max_x)
        return d


def verify_xki_scaling(a: float, b: float, n_values: Sequence[int], trials: int,
                       seed: int = 0) -> XkiReport:
    """Sample pair counts with ``n**a`` sources in each of ``n**b`` cells.

    Each source picks a destination cell uniformly.  For every ``n`` the
    mean and the maximum of the cross-cell counts are averaged over
    ``trials`` draws.
    """
    if not (a > 0 and b > 0):
        raise ValueError("a and b must be positive")
    n_values = [int(n) for n in n_values]
    if len(n_values) < 3 or any(x >= y for x, y in zip(n_values, n_values[1:])):
        raise ValueError("need at least three ascending n values")
    if trials < 20:
        raise ValueError(f"at least 20 trials are needed for a stable fit (got {trials})")
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), 0x1A]))
    means, maxes = [], []
    for n in n_values:
        cells = max(2, round(n**b))
        sources = max(1, round(n**a))
        off = ~np.eye(cells, dtype=bool)
        pvals = np.full(cells, 1.0 / cells)
        m_acc = mx_acc = 0.0
        for _ in range(trials):
            x = rng.multinomial(sources, pvals, size=cells)
            m_acc += x[off].mean()
            mx_acc += x[off].max()
        means.append(m_acc / trials)
        maxes.append(mx_acc / trials)
    ns = np.array(n_values, dtype=float)
    exponent = fit_loglog(ns, means)
    max_fit = fit_loglog(ns, maxes)
    max_vs_loglog = _ols(np.log(np.log(ns)), np.log(maxes))
    max_vs_log = _ols(np.log(ns), np.asarray(maxes))
    log_constant = float(np.max(np.asarray(maxes) / np.log(ns)))
    branch = "power" if exponent.slope - 2 * exponent.stderr > 0.05 else "log"
    return XkiReport(
        a, b, tuple(n_values), tuple(means), tuple(maxes), exponent, max_fit,
        max_vs_loglog, max_vs_log, log_constant, branch,
    )


def _nearest_square(x: float) -> int:
    r = max(1, math.isqrt(int(round(x))))
    cands = [c * c for c in (r - 1, r, r + 1) if c >= 1]
    return min(cands, key=lambda s: (abs(s - x), s))


def scaled_config(p: ScalingPoint, n: int, base: NetworkConfig | None = None) -> NetworkConfig:
    """Finite instance with ``m ~ n**beta``, ``l ~ n**gamma``, ``r_bs = n**eta``."""
    base = base or NetworkConfig()
    eta = float(p.require_eta())
    m = _nearest_square(n ** float(p.beta))
    l = max(1, round(n ** float(p.gamma)))
    return base.replace(n=int(n), m=m, l=l, alpha=float(p.alpha), r_bs=float(n) ** eta)


@dataclass(frozen=True)
class ExponentReport:
    point: ScalingPoint
    n_values: tuple
    t_n_mean: tuple
    fit: SlopeFit | None
    predicted: float
    errors: dict

    @property
    def deviation(self) -> float:
        return abs(self.fit.slope - self.predicted) if self.fit else math.inf

    def to_dict(self) -> dict:
        return {
            "alpha": float(self.point.alpha),
            "beta": float(self.point.beta),
            "gamma": float(self.point.gamma),
            "eta": float(self.point.eta),
            "n_values": list(self.n_values),
            "t_n_mean": list(self.t_n_mean),
            "fitted_slope": self.fit.slope if self.fit else None,
            "stderr": self.fit.stderr if self.fit else None,
            "predicted": self.predicted,
            "errors": {str(k): v for k, v in self.errors.items()},
        }


def verify_exponent_empirical(p: ScalingPoint, n_values: Sequence[int], trials: int,
                              seed: int = 0, base: NetworkConfig | None = None) -> ExponentReport:
    """Fit the growth of simulated ``T_n`` and compare with the closed form."""
    if trials < 1:
        raise ValueError(f"trials must be positive (got {trials})")
    n_values = sorted(int(n) for n in n_values)
    if len(n_values) < 2 or n_values[-1] < 10 * n_values[0]:
        raise ValueError("n values must span at least one decade")
    predicted = float(generalized_exponent(p).value.exponent)
    ok_n, means, errors = [], [], {}
    for n in n_values:
        try:
            config = scaled_config(p, n, base)
            t = [report_from_capacities(instance_for(config, trial_seed(seed, k)), config.r_bs).t_n
                 for k in range(trials)]
        except ConfigurationError as exc:
            errors[n] = str(exc)
            continue
        ok_n.append(n)
        means.append(float(np.mean(t)))
    usable = [(n, t) for n, t in zip(ok_n, means) if t > 0]
    fit = fit_loglog(*zip(*usable)) if len(usable) >= 2 else None
    return ExponentReport(p, tuple(ok_n), tuple(means), fit, predicted, errors)


@dataclass(frozen=True)
class Experiment:
    """A sweep plus optional backhaul rates to repeat it at."""

    spec: SweepSpec
    series: tuple = ()

    @classmethod
    def from_dict(cls, doc: dict) -> "Experiment":
        known = {"base", "variable", "values", "trials", "seed", "series"}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown experiment keys: {sorted(unknown)}")
        if "variable" not in doc or "values" not in doc:
            raise ValueError("experiment needs 'variable' and 'values'")
        spec = SweepSpec(
            base=NetworkConfig.from_dict(doc.get("base", {})),
            variable=doc["variable"],
            values=tuple(doc["values"]),
            trials=doc.get("trials", DEFAULT_TRIALS),
            seed=doc.get("seed", 0),
        )
        series = tuple(float(r) for r in doc.get("series", ()))
        if series and spec.variable == "r_bs":
            raise ValueError("a backhaul sweep cannot carry a backhaul series")
        return cls(spec, series)

    def run(self) -> dict[float | None, SweepResult]:
        if self.series:
            return run_series(self.spec, self.series)
        return {None: run_sweep(self.spec)}


def packaged_experiments() -> list[str]:
    root = resources.files("hybridcap") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_experiment(source: str | Path) -> Experiment:
    """Load an experiment from a JSON file or a packaged name such as ``fig8_a35``."""
    path = Path(source)
    if path.suffix != ".json" and str(source) in packaged_experiments():
        text = (resources.files("hybridcap") / "configs" / f"{source}.json").read_text()
    else:
        text = path.read_text()
    return Experiment.from_dict(json.loads(text))
