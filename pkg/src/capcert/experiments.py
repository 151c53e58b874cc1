"""
Experiment configuration, sweep orchestration and artifact writing.

A config is one JSON object::

    {
      "protocol": "p1" | "p2" | "qubit",
      "analysis": "bound" | "asymptotic" | "simulate" | "coherent-info" | "tomography",
      "channel": {"kind": "loss", "tau": 0.8, "n_th": 0.0},
      "params": {...},
      "sweep": {"n": [1e4, 1e6], ...},
      "curves": [{"label": "...", "protocol": "p2", "params": {...}}, ...],
      "monte_carlo": {"trials": 100, "seed": 7},
      "output": {"path": "out.csv", "format": "csv"}
    }

Sweep axes form a cartesian product in the order given; an axis may name a
protocol parameter or a channel field. ``curves`` repeats the sweep once per
entry with the entry's overrides applied. For the qubit protocol the channel
block is ``{"alpha": ..., "beta": ...}``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import csv
import io
import itertools
import json
import math
import os

from . import protocol1 as p1
from . import protocol2 as p2
from . import qubit as qb
from .channels import ChannelModel, make_rng

PROTOCOLS = ("p1", "p2", "qubit")
ANALYSES = {
    "p1": ("bound", "asymptotic", "simulate"),
    "p2": ("bound", "asymptotic", "simulate"),
    "qubit": ("coherent-info", "tomography"),
}
STOCHASTIC = {("p1", "simulate"), ("p2", "simulate"), ("qubit", "tomography")}
PARAMS = {
    "p1": {"n", "k", "k_over_n", "d", "t", "dt", "alpha", "n_bar", "s_db", "epsilon", "p_err"},
    "p2": {"n", "k", "k_over_n", "n_bar", "a", "c", "delta", "epsilon"},
    "qubit": {"shots_per_setting", "delta", "epsilon", "restarts", "counts_csv"},
}
CHANNEL_FIELDS = {
    "p1": {"kind", "tau", "n_th", "gain", "sigma2_add"},
    "p2": {"kind", "tau", "n_th", "gain", "sigma2_add"},
    "qubit": {"alpha", "beta"},
}
TOP_KEYS = {"protocol", "analysis", "channel", "params", "sweep", "curves", "monte_carlo", "output"}
CURVE_KEYS = {"label", "protocol", "analysis", "channel", "params"}


class ConfigError(ValueError):
    """Malformed experiment configuration (exit code 1)."""


class Infeasible(ValueError):
    """A sweep point admits no nontrivial evaluation."""


@dataclass
class Curve:
    label: str
    protocol: str
    analysis: str
    channel: dict
    params: dict


@dataclass
class ExperimentConfig:
    curves: list
    sweep: dict
    trials: int = 1
    seed: int = None
    output_path: str = "capcert_out.csv"
    output_format: str = "csv"
    labelled: bool = False

    @property
    def stochastic(self):
        return any((c.protocol, c.analysis) in STOCHASTIC for c in self.curves)

    @classmethod
    def from_dict(cls, raw):
        if not isinstance(raw, dict):
            raise ConfigError("config must be a JSON object")
        _reject_unknown(raw, TOP_KEYS, "config")
        base = Curve("", raw.get("protocol"), raw.get("analysis", "bound"),
                     dict(raw.get("channel", {})), dict(raw.get("params", {})))
        entries = raw.get("curves")
        if entries is None:
            curves = [base]
        else:
            if not isinstance(entries, list) or not entries:
                raise ConfigError("curves must be a non-empty list")
            curves = []
            for i, entry in enumerate(entries):
                if not isinstance(entry, dict):
                    raise ConfigError(f"curves[{i}] must be an object")
                _reject_unknown(entry, CURVE_KEYS, f"curves[{i}]")
                # a curve that switches protocol starts from empty blocks
                same = entry.get("protocol", base.protocol) == base.protocol
                curves.append(Curve(
                    str(entry.get("label", i)),
                    entry.get("protocol", base.protocol),
                    entry.get("analysis", base.analysis if same else "bound"),
                    {**(base.channel if same else {}), **entry.get("channel", {})},
                    {**(base.params if same else {}), **entry.get("params", {})},
                ))
        sweep = raw.get("sweep", {})
        if not isinstance(sweep, dict):
            raise ConfigError("sweep must map names to value lists")
        for name, values in sweep.items():
            if not isinstance(values, list) or not values:
                raise ConfigError(f"sweep axis {name!r} needs a non-empty list of values")
        for c in curves:
            if c.protocol not in PROTOCOLS:
                raise ConfigError(f"protocol must be one of {PROTOCOLS}, got {c.protocol!r}")
            if c.analysis not in ANALYSES[c.protocol]:
                raise ConfigError(f"analysis {c.analysis!r} not available for {c.protocol}; "
                                  f"choose from {ANALYSES[c.protocol]}")
            _reject_unknown(c.params, PARAMS[c.protocol], f"params ({c.protocol})")
            _reject_unknown(c.channel, CHANNEL_FIELDS[c.protocol], f"channel ({c.protocol})")
            for name in sweep:
                if name not in PARAMS[c.protocol] | CHANNEL_FIELDS[c.protocol] - {"kind"}:
                    raise ConfigError(f"sweep axis {name!r} is not a {c.protocol} parameter "
                                      f"or channel field")
        mc = raw.get("monte_carlo", {})
        _reject_unknown(mc, {"trials", "seed"}, "monte_carlo")
        out = raw.get("output", {})
        _reject_unknown(out, {"path", "format"}, "output")
        fmt = out.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"output format must be csv or json, got {fmt!r}")
        trials = mc.get("trials", 1)
        if not isinstance(trials, int) or trials < 1:
            raise ConfigError("monte_carlo.trials must be a positive integer")
        seed = mc.get("seed")
        if seed is not None and (not isinstance(seed, int) or seed < 0):
            raise ConfigError("monte_carlo.seed must be a non-negative integer")
        cfg = cls(curves, sweep, trials, seed, out.get("path", f"capcert_out.{fmt}"), fmt,
                  labelled=entries is not None)
        # build every point once so bad values surface before any work starts
        for curve, point in cfg.points():
            build_point(curve, point)
        return cfg

    def points(self):
        names = list(self.sweep)
        for curve in self.curves:
            for combo in itertools.product(*(self.sweep[n] for n in names)):
                yield curve, dict(zip(names, combo))


def _reject_unknown(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where} must be an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigError(f"unknown keys in {where}: {sorted(extra)}")


def load_config(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    return ExperimentConfig.from_dict(raw)


# -- point construction -----------------------------------------------------

@dataclass
class Point:
    curve: Curve
    values: dict
    channel: object
    params: dict = field(default_factory=dict)
    settings: object = None


def _resolve_mode_counts(params):
    if "k_over_n" in params:
        if "k" in params:
            raise ConfigError("give k or k_over_n, not both")
        params["k"] = params.pop("k_over_n") * params["n"]


def build_point(curve, values):
    """Resolve one sweep point into a channel and protocol settings; raises ConfigError."""
    channel_fields = CHANNEL_FIELDS[curve.protocol] - {"kind"}
    channel = dict(curve.channel)
    params = dict(curve.params)
    for name, v in values.items():
        (channel if name in channel_fields else params)[name] = v
    try:
        if curve.protocol == "qubit":
            ch = qb.QubitChannelSpec(float(channel.get("alpha", 0.0)), float(channel.get("beta", 0.0)))
            return Point(curve, values, ch, params)
        ch = ChannelModel.from_dict(channel) if channel else ChannelModel.identity()
        if "n" in params or "k_over_n" in params:
            _resolve_mode_counts(params)
        if curve.analysis == "asymptotic":
            if "n_bar" not in params:
                raise ConfigError("asymptotic analysis needs n_bar")
            return Point(curve, values, ch, params)
        if curve.protocol == "p1":
            if "dt" in params:
                if "t" in params:
                    raise ConfigError("give t or dt, not both")
                params["t"] = params.pop("dt") / params["d"]
            settings = p1.ProtocolOneConfig(**params)
            if curve.analysis == "simulate" and int(settings.k) % 2:
                raise ConfigError(f"k must be even for simulation, got {settings.k}")
        else:
            if ("a" in params) != ("c" in params):
                raise ConfigError("give both thresholds a and c, or neither")
            if "a" not in params:
                params["a"], params["c"] = p2.channel_thresholds(ch, params.get("n_bar", 0.0))
            settings = p2.ProtocolTwoConfig(**params)
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"{curve.protocol} point {values}: {exc}") from exc
    return Point(curve, values, ch, params, settings)


# -- evaluation ----------------------------------------------------------------

def _evaluate_asymptotic(pt):
    ch = pt.channel
    if ch.kind not in ("loss", "identity"):
        raise ConfigError("asymptotic comparison is defined for loss channels")
    n_bar = pt.params["n_bar"]
    d = pt.params.get("d", 0.1)
    tau = ch.tau if ch.kind == "loss" else 1.0
    n_th = ch.n_th if ch.kind == "loss" else 0.0
    a, c = p2.channel_thresholds(ch, n_bar)
    t = pt.params.get("t", p1.asymptotic_threshold_t(tau, n_bar, n_th, d))
    return {"B_iid": p2.asymptotic_Biid(a, c, n_bar), "B": p1.asymptotic_B(d, t)}


def _bound_p1(cfg):
    b = p1.theorem1_bound(cfg)
    ent = p1.entanglement_bound(cfg)
    return {"status": b.status, "q_lower": b.q_lower, "q_per_mode": b.q_lower / cfg.n,
            "ent_lower": ent, "ent_per_mode": None if ent is None else ent / cfg.n,
            "eta_star": b.eta_star, "lambda": b.lam, "zeta": b.zeta, "mu": b.mu, "delta": b.delta}


def _bound_p2(cfg):
    q = p2.theorem2_bound(cfg)
    nu = p2.symplectic_eigenvalues(cfg.xi)
    return {"q_lower": q, "q_per_mode": q / cfg.n, "B_iid": p2.asymptotic_Biid(cfg.a, cfg.c, cfg.n_bar),
            "nu1": float(nu[0]), "nu2": float(nu[1])}


def evaluate(pt, rng=None):
    """One deterministic or stochastic evaluation; returns a flat dict of result fields."""
    c = pt.curve
    if c.analysis == "asymptotic":
        return _evaluate_asymptotic(pt)
    if c.protocol == "p1":
        if c.analysis == "bound":
            return _bound_p1(pt.settings)
        return p1.run_protocol_one(pt.settings, pt.channel, rng).to_dict()
    if c.protocol == "p2":
        if c.analysis == "bound":
            return _bound_p2(pt.settings)
        s = pt.settings
        try:
            record = p2.simulate_heterodyne_pairs(pt.channel, s.n_bar, s.k, rng)
            verdict = p2.run_protocol_two(s, pt.channel, rng, record)
        except ValueError as exc:
            raise Infeasible(str(exc)) from exc
        a_true, c_true = p2.channel_thresholds(pt.channel, s.n_bar)
        out = verdict.to_dict()
        out["sigma_covers"] = a_true <= verdict.sigma_max
        out["gamma_covers"] = c_true >= verdict.gamma_min
        return out
    spec = pt.channel
    if c.analysis == "coherent-info":
        return {"coherent_info": qb.coherent_information(qb.choi_state(spec)),
                "closed_form": qb.coherent_information_closed_form(spec.alpha, spec.beta)}
    prm = pt.params
    delta = prm.get("delta", 0.01)
    rho = qb.choi_state(spec)
    if "counts_csv" in prm:
        counts = qb.TomographyCounts.from_csv(prm["counts_csv"], delta)
    else:
        counts = qb.simulate_tomography(rho, int(prm.get("shots_per_setting", 10000)), rng, delta)
    report = qb.qubit_report(counts, prm.get("epsilon", 0.02), rng, int(prm.get("restarts", 4)))
    report["true_in_polytope"] = qb.polytope_halfspace_check(rho, counts)
    report["coherent_info"] = qb.coherent_information(rho)
    return report


def _safe_evaluate(pt, rng=None):
    """``(fields, diagnostic)``; the diagnostic is None for a feasible point."""
    try:
        res = evaluate(pt, rng)
    except Infeasible as exc:
        return {}, str(exc)
    if res.get("status", "ok") != "ok":
        return res, f"bound is {res['status']} (lambda={res['lambda']:.3g} >= sqrt(eps/2))"
    return res, None


def _threads(requested):
    if requested:
        return max(1, int(requested))
    env = os.environ.get("CAPCERT_THREADS")
    return max(1, int(env)) if env else 1


def _map(fn, items, threads):
    if threads == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _row_head(cfg, pt):
    head = {}
    if cfg.labelled:
        head["curve"] = pt.curve.label
        head["protocol"] = pt.curve.protocol
    head.update(pt.values)
    return head


def run_experiment(cfg, seed=None, threads=None):
    """Evaluate every sweep point once; returns ``(rows, diagnostics)``.

    Stochastic analyses draw point ``i`` from stream ``i`` of ``seed``.
    """
    seed = cfg.seed if seed is None else seed
    if cfg.stochastic and seed is None:
        raise ConfigError("a stochastic analysis needs monte_carlo.seed or --seed")
    points = [build_point(c, v) for c, v in cfg.points()]

    def job(i):
        pt = points[i]
        rng = make_rng(seed, i) if (pt.curve.protocol, pt.curve.analysis) in STOCHASTIC else None
        return _safe_evaluate(pt, rng)

    results = _map(job, range(len(points)), _threads(threads))
    rows, diags = [], []
    for pt, (res, err) in zip(points, results):
        row = _row_head(cfg, pt)
        row.update(res)
        if err:
            diags.append(f"{pt.curve.label or pt.curve.protocol} {pt.values}: {err}")
        rows.append(row)
    return rows, diags


def _binomial_se(p, n):
    return math.sqrt(p * (1.0 - p) / n)


def run_montecarlo(cfg, seed=None, threads=None):
    """Repeat every stochastic sweep point ``cfg.trials`` times.

    Trial ``j`` of point ``i`` uses stream ``i * trials + j``. Returns
    ``(trial_rows, summary)``.
    """
    seed = cfg.seed if seed is None else seed
    if seed is None:
        raise ConfigError("montecarlo needs monte_carlo.seed or --seed")
    points = [build_point(c, v) for c, v in cfg.points()]
    for pt in points:
        if (pt.curve.protocol, pt.curve.analysis) not in STOCHASTIC:
            raise ConfigError(f"montecarlo needs a stochastic analysis, got "
                              f"{pt.curve.protocol}/{pt.curve.analysis}")
    jobs = [(i, j) for i in range(len(points)) for j in range(cfg.trials)]

    def job(ij):
        i, j = ij
        return _safe_evaluate(points[i], make_rng(seed, i * cfg.trials + j))

    results = _map(job, jobs, _threads(threads))
    trial_rows, summary_points = [], []
    for i, pt in enumerate(points):
        chunk = results[i * cfg.trials:(i + 1) * cfg.trials]
        recs = []
        for j, (res, err) in enumerate(chunk):
            row = {"point": i, "trial": j, "stream": i * cfg.trials + j}
            row.update(_row_head(cfg, pt))
            row.update(res)
            if err:
                row["error"] = err
            trial_rows.append(row)
            recs.append(row)
        summary_points.append(_summarize(pt, recs))
    summary = {"seed": seed, "trials": cfg.trials,
               "stream_rule": "stream = point * trials + trial", "points": summary_points}
    return trial_rows, summary


def _rate(recs, key):
    vals = [bool(r[key]) for r in recs if r.get(key) is not None]
    if not vals:
        return None, None
    p = sum(vals) / len(vals)
    return p, _binomial_se(p, len(vals))


def _summarize(pt, recs):
    out = {"point": recs[0]["point"], **_row_head_plain(pt), "trials": len(recs),
           "errors": sum("error" in r for r in recs)}
    key = "true_in_polytope" if pt.curve.protocol == "qubit" else "passed"
    out["pass_rate"], out["pass_rate_se"] = _rate(recs, key)
    if pt.curve.protocol == "p2":
        for k in ("sigma_covers", "gamma_covers"):
            p, se = _rate(recs, k)
            out[f"{k}_rate"], out[f"{k}_rate_se"] = p, se
    if pt.curve.protocol == "p1" and pt.channel.kind in ("loss", "identity") and pt.channel.n_th == 0:
        s = pt.settings
        tau = pt.channel.tau if pt.channel.kind == "loss" else 1.0
        out["predicted_pass_rate"] = p1.pass_probability_pure_loss(s.k, s.t, s.d, tau, s.n_bar)
    return out


def _row_head_plain(pt):
    head = {"curve": pt.curve.label} if pt.curve.label else {}
    head.update(pt.values)
    return head


# -- artifacts -------------------------------------------------------------------

def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def _json_clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    if isinstance(v, dict):
        return {k: _json_clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_clean(x) for x in v]
    if hasattr(v, "item"):  # numpy scalar
        return _json_clean(v.item())
    return v


def columns(rows):
    """Union of row keys in first-seen order."""
    cols = []
    for r in rows:
        cols.extend(k for k in r if k not in cols)
    return cols


def rows_to_csv(rows):
    buf = io.StringIO()
    cols = columns(rows)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        w.writerow([_fmt(_json_clean(r.get(c))) for c in cols])
    return buf.getvalue()


def to_json(obj):
    return json.dumps(_json_clean(obj), indent=2, allow_nan=False) + "\n"


def write_rows(rows, path, fmt):
    text = rows_to_csv(rows) if fmt == "csv" else to_json(rows)
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def write_json(obj, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(to_json(obj))
    return path
