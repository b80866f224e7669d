"""Batch front door: sectioned key=value configs, subcommand dispatch,
deterministic CSV/JSON emission.

Usage: ``quasi1d <task> --config FILE --seed N --out PATH [--threads K]
[--format csv|json]``.  Exit codes: 0 success, 1 configuration/validation
failure, 2 numerical failure.  Output files are written via a temp file and
an atomic rename, so no partial file is ever left behind.
"""

from __future__ import annotations

import argparse
import configparser
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import liecheck, lyapunov, models, randsrc, selftest, spectra
from .errors import (
    ParseError,
    Quasi1dError,
    UnknownKey,
    ValidationError,
)
from .models import SeedSpec

__all__ = ["RunConfig", "parse_config", "serialize_config", "run", "main"]

TASKS = ("lyap-scan", "ids", "furstenberg", "zipper-check", "thouless",
         "wegner", "eigenmode", "transport", "selftest")

BURN_IN = lyapunov.BURN_IN  # fixed estimator burn-in, documented default

_MODEL_KEYS = {
    "discrete": {"type", "dim", "coupling"},
    "continuous": {"type", "dim", "cell", "couplings"},
    "point": {"type", "dim", "couplings"},
    "unitary-anderson": {"type", "reflection", "transmission"},
    "zipper": {"type", "dim", "verblunsky"},
    "extended-cmv": {"type"},
}
_LAW_KEYS = {"law", "law-a", "law-b", "law-p", "law-lo", "law-hi",
             "law-values", "law-weights"}
_PHASE_LAW_KEYS = {"phase-law", "phase-law-a", "phase-law-b", "phase-law-p",
                   "phase-law-lo", "phase-law-hi", "phase-law-values",
                   "phase-law-weights"}

_PARAM_KEYS = {
    "lyap-scan": {"grid", "n", "realizations", "reorth"},
    "ids": {"grid", "L", "realizations"},
    "furstenberg": {"grid", "svd-tol"},
    "zipper-check": {"draws", "sample-count"},
    "thouless": {"grid", "L", "realizations", "n", "lyap-realizations", "reorth"},
    "wegner": {"energy", "kappa", "beta", "l-list", "realizations", "xi"},
    "eigenmode": {"window-lo", "window-hi", "L", "realizations", "n-lyap"},
    "transport": {"L", "t-max", "t-count", "realizations"},
    "selftest": set(),
}

_DEFAULTS = {
    "lyap-scan": {"n": 100_000, "realizations": 16, "reorth": 10},
    "ids": {"realizations": 8},
    "furstenberg": {"svd-tol": 1e-9},
    "zipper-check": {"draws": 1000, "sample-count": 0},
    "thouless": {"realizations": 8, "n": 1_000_000, "lyap-realizations": 8,
                 "reorth": 10},
    "wegner": {"realizations": 200},
    "eigenmode": {"realizations": 4, "n-lyap": 100_000},
    "transport": {"realizations": 4},
}


@dataclass(frozen=True, eq=False)
class RunConfig:
    task: str
    model: object
    params: dict
    seed: int = 0
    out: str | None = None
    fmt: str = "csv"
    threads: int = 1
    model_items: tuple = field(default=(), repr=False)

    def key(self):
        return (self.task, self.model_items, tuple(sorted(self.params.items())))

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.key() == other.key()


# --- low-level parsing -------------------------------------------------------

def _floats(text: str):
    try:
        return [float(p.strip()) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ValidationError(f"expected a comma-separated number list: {text!r}") from exc


def _complexes(text: str):
    try:
        return [complex(p.strip()) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise ValidationError(f"expected a comma-separated complex list: {text!r}") from exc


def _float(section: dict, key: str):
    try:
        return float(section[key])
    except ValueError as exc:
        raise ValidationError(f"key {key!r}: not a number: {section[key]!r}") from exc


def _int(section: dict, key: str):
    try:
        return int(section[key])
    except ValueError as exc:
        raise ValidationError(f"key {key!r}: not an integer: {section[key]!r}") from exc


def _grid(text: str) -> np.ndarray:
    """Grid spec: ``lo:hi:count`` (inclusive linspace) or a comma list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"grid spec must be lo:hi:count, got {text!r}")
        lo, hi = float(parts[0]), float(parts[1])
        count = int(parts[2])
        if count < 1:
            raise ValidationError("grid count must be >= 1")
        return np.linspace(lo, hi, count)
    return np.asarray(_floats(text))


def _parse_law(items: dict, prefix: str = "law"):
    kind = items.get(prefix, "bernoulli")
    get = lambda suffix, default=None: items.get(f"{prefix}-{suffix}", default)
    if kind == "bernoulli":
        return randsrc.Bernoulli01(float(get("p", 0.5)))
    if kind == "two-point":
        return randsrc.TwoPoint(complex(get("a", 0.0)), complex(get("b", 1.0)),
                                float(get("p", 0.5)))
    if kind == "uniform":
        return randsrc.UniformInterval(float(get("lo", 0.0)), float(get("hi", 1.0)))
    if kind == "finite":
        values = _complexes(get("values", ""))
        weights = _floats(get("weights", ",".join("1" for _ in values) or "1"))
        return randsrc.FiniteSupport(tuple(values), tuple(weights))
    raise ValidationError(f"unknown law kind {kind!r}")


def _build_model(items: dict):
    mtype = items.get("type")
    if mtype not in _MODEL_KEYS:
        raise ValidationError(f"unknown or missing model type {mtype!r}")
    allowed = _MODEL_KEYS[mtype] | _LAW_KEYS
    if mtype == "unitary-anderson":
        allowed |= _PHASE_LAW_KEYS
    for key in items:
        if key not in allowed:
            raise UnknownKey(f"key {key!r} not valid for model type {mtype!r}")
    if mtype == "discrete":
        dim = _int(items, "dim") if "dim" in items else 1
        law = _parse_law(items)
        return models.DiscreteQuasi1D(
            dim, coupling=_float(items, "coupling") if "coupling" in items else 1.0,
            laws=tuple(law for _ in range(dim)))
    if mtype == "continuous":
        dim = _int(items, "dim") if "dim" in items else 1
        law = _parse_law(items)
        couplings = tuple(_floats(items["couplings"])) if "couplings" in items else ()
        return models.ContinuousQuasi1D(
            dim, cell=_float(items, "cell") if "cell" in items else 1.0,
            couplings=couplings, laws=tuple(law for _ in range(dim)))
    if mtype == "point":
        dim = _int(items, "dim") if "dim" in items else 1
        law = _parse_law(items)
        couplings = tuple(_floats(items["couplings"])) if "couplings" in items else ()
        return models.PointInteractions(
            dim, couplings=couplings, laws=tuple(law for _ in range(dim)))
    if mtype == "unitary-anderson":
        r = _float(items, "reflection") if "reflection" in items else 0.0
        t = _float(items, "transmission") if "transmission" in items else 1.0
        if abs(r * r + t * t - 1.0) > 1e-12:
            raise ValidationError(
                f"unitary Anderson constraint r^2+t^2=1 violated: r={r}, t={t}")
        if "phase-law" in items or any(k in items for k in _PHASE_LAW_KEYS):
            return models.UnitaryAnderson(r, t, phase_law=_parse_law(items, "phase-law"))
        return models.UnitaryAnderson(r, t)
    if mtype == "zipper":
        dim = _int(items, "dim") if "dim" in items else 1
        entries = _complexes(items.get("verblunsky", ""))
        if len(entries) != dim * dim:
            raise ValidationError(
                f"verblunsky needs {dim * dim} entries (row-major), got {len(entries)}")
        return models.ScatteringZipper(dim, np.array(entries).reshape(dim, dim))
    return models.ExtendedCMV(law=_parse_law(items))


def parse_config(text: str, task: str = "lyap-scan", seed: int = 0,
                 out: str | None = None, fmt: str = "csv",
                 threads: int = 1) -> RunConfig:
    """Parse and fully validate a sectioned key=value config.

    Raises ParseError for malformed text (duplicate keys carry the line
    number), UnknownKey for keys outside the documented schema, and
    ValidationError for constraint violations.
    """
    if task not in TASKS:
        raise ValidationError(f"unknown task {task!r}")
    parser = configparser.ConfigParser(interpolation=None, delimiters=("=",),
                                       strict=True)
    try:
        parser.read_string(text)
    except configparser.DuplicateOptionError as exc:
        raise ParseError(f"duplicate key {exc.option!r} at line {exc.lineno}") from exc
    except configparser.DuplicateSectionError as exc:
        raise ParseError(f"duplicate section {exc.section!r} at line {exc.lineno}") from exc
    except configparser.Error as exc:
        raise ParseError(str(exc)) from exc

    for section in parser.sections():
        if section not in ("model", "params"):
            raise UnknownKey(f"unknown section [{section}]")

    model = None
    model_items = ()
    if parser.has_section("model"):
        items = dict(parser.items("model"))
        model = _build_model(items)
        model_items = tuple(sorted(items.items()))
    elif task != "selftest":
        raise ValidationError("missing [model] section")

    raw = dict(parser.items("params")) if parser.has_section("params") else {}
    allowed = _PARAM_KEYS[task]
    for key in raw:
        if key not in allowed:
            raise UnknownKey(f"key {key!r} not valid for task {task!r}")
    params = dict(_DEFAULTS.get(task, {}))
    params.update(raw)
    params = _validate_params(task, params, model)
    if fmt not in ("csv", "json"):
        raise ValidationError(f"unknown format {fmt!r}")
    return RunConfig(task, model, params, seed=seed, out=out, fmt=fmt,
                     threads=threads, model_items=model_items)


def _validate_params(task: str, params: dict, model) -> dict:
    p = dict(params)

    def need(key):
        if key not in p:
            raise ValidationError(f"task {task!r} requires key {key!r}")

    def as_int(key, lo, hi=None):
        v = int(p[key])
        if v < lo or (hi is not None and v > hi):
            bound = f">= {lo}" if hi is None else f"in [{lo}, {hi}]"
            raise ValidationError(f"key {key!r} must be {bound}, got {v}")
        p[key] = v

    def as_float(key, lo=None, hi=None, strict=False):
        v = float(p[key])
        if lo is not None and (v <= lo if strict else v < lo):
            raise ValidationError(f"key {key!r} must be {'>' if strict else '>='} {lo}")
        if hi is not None and (v >= hi if strict else v > hi):
            raise ValidationError(f"key {key!r} must be {'<' if strict else '<='} {hi}")
        p[key] = v

    if task == "lyap-scan":
        need("grid")
        p["grid"] = tuple(_grid(str(p["grid"])))
        as_int("n", 1000)
        as_int("realizations", 1)
        as_int("reorth", 1, 50)
    elif task == "ids":
        need("grid"), need("L")
        p["grid"] = tuple(_grid(str(p["grid"])))
        if any(np.diff(p["grid"]) < 0):
            raise ValidationError("ids grid must be ordered")
        as_int("L", 8)
        as_int("realizations", 4)
    elif task == "furstenberg":
        need("grid")
        p["grid"] = tuple(_grid(str(p["grid"])))
        as_float("svd-tol", 0.0, strict=True)
    elif task == "zipper-check":
        as_int("draws", 1)
        as_int("sample-count", 0)
        if not isinstance(model, models.ScatteringZipper):
            raise ValidationError("zipper-check requires a zipper model")
    elif task == "thouless":
        need("grid"), need("L")
        p["grid"] = tuple(_grid(str(p["grid"])))
        as_int("L", 8)
        as_int("realizations", 1)
        as_int("n", 1000)
        as_int("lyap-realizations", 2)
        as_int("reorth", 1, 50)
    elif task == "wegner":
        need("energy"), need("kappa"), need("beta"), need("l-list")
        as_float("energy")
        as_float("kappa", 0.0, strict=True)
        as_float("beta", 0.0, 1.0, strict=True)
        p["l-list"] = tuple(int(v) for v in _floats(str(p["l-list"])))
        as_int("realizations", 200)
        if "xi" in p:
            as_float("xi", 0.0, strict=True)
        else:
            p["xi"] = None
    elif task == "eigenmode":
        need("window-lo"), need("window-hi"), need("L")
        as_float("window-lo"), as_float("window-hi")
        as_int("L", 8)
        as_int("realizations", 1)
        as_int("n-lyap", 1000)
    elif task == "transport":
        need("L"), need("t-max"), need("t-count")
        as_int("L", 20)
        as_float("t-max", 0.0, strict=True)
        as_int("t-count", 2)
        as_int("realizations", 1)
    return p


def serialize_config(config: RunConfig) -> str:
    """Canonical config text; parse(serialize(parse(t))) == parse(t)."""
    lines = []
    if config.model_items:
        lines.append("[model]")
        lines.extend(f"{k} = {v}" for k, v in config.model_items)
    lines.append("[params]")
    for k, v in sorted(config.params.items()):
        if v is None:
            continue
        if isinstance(v, tuple):
            lines.append(f"{k} = {','.join(_fmt(x) for x in v)}")
        else:
            lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"


# --- formatting --------------------------------------------------------------

def _fmt(x) -> str:
    """17 significant digits, '.' decimal, no locale."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    v = float(x)
    if math.isnan(v):
        return "nan"
    return f"{v:.17g}"


def _write_atomic(path: str, payload: str) -> None:
    tmp = f"{path}.tmp"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def _emit(config: RunConfig, header, rows, json_extra=None) -> None:
    if config.out is None:
        return
    if config.fmt == "csv":
        buf = io.StringIO()
        buf.write(",".join(header) + "\n")
        for row in rows:
            buf.write(",".join(_fmt(x) for x in row) + "\n")
        payload = buf.getvalue()
    else:
        doc = {"task": config.task, "columns": list(header),
               "rows": [[x if isinstance(x, str) else
                         (int(x) if isinstance(x, (int, np.integer)) else _fmt(x))
                         for x in row] for row in rows]}
        if json_extra:
            doc.update(json_extra)
        payload = json.dumps(doc, indent=1, sort_keys=True) + "\n"
    _write_atomic(config.out, payload)


# --- task runners -------------------------------------------------------------

def _point_for(model, value: float):
    if isinstance(model, models.UNITARY):
        return models.Unimodular(complex(np.exp(1j * value)))
    return models.Energy(float(value))


def _lyap_one(args):
    model, value, seed, n, realizations, reorth = args
    stream = lyapunov.CocycleStream(model, _point_for(model, value), SeedSpec(seed))
    res = lyapunov.lyap_spectrum(stream, n, realizations, reorth)
    return res


def _run_lyap_scan(config: RunConfig):
    p = config.params
    jobs = [(config.model, v, config.seed, p["n"], p["realizations"], p["reorth"])
            for v in p["grid"]]
    results = _pool_map(_lyap_one, jobs, config.threads)
    s = models.cocycle_dim(config.model)
    label = "angle" if isinstance(config.model, models.UNITARY) else "energy"
    header = ([label] + [f"gamma{i + 1}" for i in range(s)]
              + [f"sigma{i + 1}" for i in range(s)] + ["pairing_defect"])
    rows = [[v, *res.exponents, *res.std_errors, res.pairing_defect]
            for v, res in zip(p["grid"], results)]
    _emit(config, header, rows)
    first = results[0]
    return (f"lyap-scan: gamma1 = {first.exponents[0]:.6g} "
            f"+- {first.std_errors[0]:.2g} at {label} = {p['grid'][0]:g}")


def _run_ids(config: RunConfig):
    p = config.params
    curve = spectra.ids_estimate(config.model, np.asarray(p["grid"]), p["L"],
                                 p["realizations"], SeedSpec(config.seed))
    header = ["grid", "ids", "sigma"]
    rows = [[g, v, s] for g, v, s in zip(curve.grid, curve.values, curve.std_errors)]
    _emit(config, header, rows)
    mid = len(curve.grid) // 2
    return (f"ids: N({curve.grid[mid]:g}) = {curve.values[mid]:.6g} "
            f"+- {curve.std_errors[mid]:.2g}")


def _furstenberg_one(args):
    dim, energy, couplings, tol = args
    return liecheck.check_lemma_spN(dim, energy, couplings, tol)


def _run_furstenberg(config: RunConfig):
    p = config.params
    model = config.model
    couplings = getattr(model, "couplings", None)
    jobs = [(model.dim, float(e), couplings, p["svd-tol"]) for e in p["grid"]]
    reports = _pool_map(_furstenberg_one, jobs, config.threads)
    header = ["energy", "closure_dim", "target_dim", "verdict"]
    rows = [[e, rep.closure_dim, rep.target_dim, rep.verdict]
            for e, rep in zip(p["grid"], reports)]
    extra = {"reports": [rep.to_dict() for rep in reports]}
    _emit(config, header, rows, json_extra=extra)
    verdict = "Full" if all(r.verdict == "Full" for r in reports) else "not Full"
    return (f"furstenberg: {verdict} at every grid energy "
            f"(dim {reports[0].closure_dim}/{reports[0].target_dim})")


def _run_zipper_check(config: RunConfig):
    from . import matkit
    p = config.params
    model = config.model
    d = model.dim
    rng = randsrc.stream_rng(SeedSpec(config.seed), randsrc.KIND_PROBE, 1)
    worst_lorentz = 0.0
    worst_factor = 0.0
    worst_realify = 0.0
    form = matkit.lorentz_form(d)
    for _ in range(p["draws"]):
        z = complex(np.exp(2j * np.pi * rng.random()))
        u0, v0, u1, v1 = randsrc.haar_block(rng, 4, d)
        t = models.zipper_transfer(model, models.Unimodular(z), (u0, v0, u1, v1)).matrix
        worst_lorentz = max(worst_lorentz, float(np.linalg.norm(
            t.conj().T @ form @ t - form, 2)))
        fac = (models.phi_map(models.scattering_matrix(model.verblunsky, u0, v0) / z)
               @ models.phi_map(models.scattering_matrix(model.verblunsky, u1, v1)))
        worst_factor = max(worst_factor, float(np.linalg.norm(t - fac, 2)))
        y = matkit.cayley_realify(t)
        worst_realify = max(worst_realify, matkit.group_residual(
            y, matkit.GroupTag.symplectic(2 * d)))
    z0 = complex(np.exp(2j * np.pi * rng.random()))
    report = liecheck.zipper_lie_closure(d, z0, model.verblunsky, p["sample-count"])
    header = ["check", "value", "threshold", "status"]
    rows = [
        ["lorentz_residual", worst_lorentz, 1e-10,
         "pass" if worst_lorentz <= 1e-10 else "fail"],
        ["factorization_residual", worst_factor, 1e-10,
         "pass" if worst_factor <= 1e-10 else "fail"],
        ["realified_symplectic_residual", worst_realify, 1e-8,
         "pass" if worst_realify <= 1e-8 else "fail"],
        ["lie_closure_dim", float(report.closure_dim), float(report.target_dim),
         "pass" if report.verdict == "Full" else "fail"],
    ]
    _emit(config, header, rows, json_extra={"closure": report.to_dict()})
    status = "pass" if all(r[3] == "pass" for r in rows) else "fail"
    return f"zipper-check: {status} over {p['draws']} draws"


def _run_thouless(config: RunConfig):
    p = config.params
    fit = spectra.thouless_residual(
        config.model, np.asarray(p["grid"]), p["L"], p["realizations"],
        p["n"], SeedSpec(config.seed), p["lyap-realizations"], p["reorth"])
    header = ["energy", "gamma1", "convolution", "residual"]
    rows = [[e, g, c, g + fit.alpha_hat - c]
            for e, g, c in zip(fit.energies, fit.gamma1, fit.convolution)]
    _emit(config, header, rows)
    return (f"thouless: alpha = {fit.alpha_hat:.6g}, "
            f"rms residual = {fit.rms_residual:.4g}")


def _wegner_one(args):
    model, energy, (L,), kappa, beta, realizations, seed, xi = args
    return spectra.wegner_probe(model, energy, (L,), kappa, beta, realizations,
                                SeedSpec(seed), xi).rows[0]


def _run_wegner(config: RunConfig):
    p = config.params
    jobs = [(config.model, p["energy"], (L,), p["kappa"], p["beta"],
             p["realizations"], config.seed, p["xi"]) for L in p["l-list"]]
    rows_raw = _pool_map(_wegner_one, jobs, config.threads)
    header = ["L", "kappa", "beta", "threshold", "probability",
              "ci_low", "ci_high", "reference"]
    rows = [[r.L, r.kappa, r.beta, r.threshold, r.probability, r.ci_low,
             r.ci_high, r.reference] for r in rows_raw]
    _emit(config, header, rows)
    probs = ", ".join(f"{r.probability:.3g}" for r in rows_raw)
    return f"wegner: probabilities [{probs}] across L = {list(p['l-list'])}"


def _run_eigenmode(config: RunConfig):
    p = config.params
    res = spectra.eigenmode_decay(
        config.model, p["L"], (p["window-lo"], p["window-hi"]),
        p["realizations"], SeedSpec(config.seed), n_lyap=p["n-lyap"])
    header = ["mode", "decay_rate"]
    rows = [[i, r] for i, r in enumerate(res.rates)]
    _emit(config, header, rows,
          json_extra={"median_rate": _fmt(res.median_rate),
                      "gamma_smallest": _fmt(res.gamma_smallest)})
    return (f"eigenmode: median rate {res.median_rate:.4g} vs "
            f"gamma_D {res.gamma_smallest:.4g} (ratio {res.ratio:.3g})")


def _run_transport(config: RunConfig):
    p = config.params
    t_grid = np.linspace(0.0, p["t-max"], p["t-count"])
    res = spectra.transport_probe(config.model, p["L"], t_grid,
                                  p["realizations"], SeedSpec(config.seed))
    header = ["t", "m2"]
    rows = [[t, m] for t, m in zip(res.times, res.m2)]
    _emit(config, header, rows,
          json_extra={"sup_m2": _fmt(res.sup_m2),
                      "growth_exponent": _fmt(res.growth_exponent)})
    return (f"transport: sup m2 = {res.sup_m2:.6g}, "
            f"fitted exponent {res.growth_exponent:.3g}")


def _run_selftest(config: RunConfig):
    results = selftest.run_all()
    header = ["check", "status"]
    rows = [[name, status] for name, status in results]
    _emit(config, header, rows)
    failed = [name for name, status in results if status != "ok"]
    for name, status in results:
        print(f"{status:4s} {name}")
    if failed:
        raise Quasi1dError(f"selftest failures: {', '.join(failed)}")
    return f"selftest: {len(results)} checks ok"


_RUNNERS = {
    "lyap-scan": _run_lyap_scan,
    "ids": _run_ids,
    "furstenberg": _run_furstenberg,
    "zipper-check": _run_zipper_check,
    "thouless": _run_thouless,
    "wegner": _run_wegner,
    "eigenmode": _run_eigenmode,
    "transport": _run_transport,
    "selftest": _run_selftest,
}


def _pool_map(fn, jobs, threads: int):
    if threads <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(threads, len(jobs))) as pool:
        return list(pool.map(fn, jobs))


def run(config: RunConfig) -> int:
    """Dispatch a validated config; returns the process exit code."""
    try:
        summary = _RUNNERS[config.task](config)
    except (ValidationError, UnknownKey, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Quasi1dError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    print(summary)
    return 0


def _default_threads() -> int:
    env = os.environ.get("QUASI1D_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="quasi1d",
        description="Numerical laboratory for random quasi-1D operators")
    parser.add_argument("task", choices=TASKS)
    parser.add_argument("--config", help="sectioned key=value config file")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None)
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--format", dest="fmt", choices=("csv", "json"),
                        default="csv")
    args = parser.parse_args(argv)

    threads = args.threads if args.threads is not None else _default_threads()
    text = ""
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
    elif args.task != "selftest":
        print("error: --config is required for this task", file=sys.stderr)
        return 1
    try:
        config = parse_config(text, task=args.task, seed=args.seed,
                              out=args.out, fmt=args.fmt, threads=threads)
    except (ParseError, UnknownKey, ValidationError, Quasi1dError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
