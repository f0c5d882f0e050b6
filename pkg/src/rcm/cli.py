"""Command-line front end: ``rcm train | predict | eta-max | sweep | verify``."""

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (DimensionError, EmptyClass, FormatError, InvalidParameter, LabelError,
                     RCMError)
from .model import (AUTO, TrainConfig, TrainedModel, evaluate, kappa_from_rate, predict, train)
from .solver_convex import EtaStatus, Regime, eta_max, eta_sweep
from .uncertainty import Dataset, Family
from .verify import run_suites

SCHEMA_VERSION = 1
LABELS = {"+1": 1, "1": 1, "-1": -1}

EXIT_OK = 0
EXIT_SUITE = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_FORMAT = 4
EXIT_PARAM = 5
EXIT_DIMENSION = 6
EXIT_SOLVER = 7

NATIVE_NAME = {"rch": "nu_min", "ellipsoid": "kappa_max", "fda": "zeta_max", "ch": "eta_max"}


# ---------------------------------------------------------------------------
# files


def _is_number(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def read_rows(path):
    """Numeric-looking CSV rows as ``(line_number, tokens)``, header and blank lines skipped."""
    rows = []
    with open(path, newline="") as fh:
        for lineno, rec in enumerate(csv.reader(fh), start=1):
            rec = [t.strip() for t in rec]
            if not rec or all(t == "" for t in rec):
                continue
            if not rows and lineno == 1 and not _is_number(rec[0]):
                continue
            rows.append((lineno, rec))
    if rows:
        width = len(rows[0][1])
        for lineno, rec in rows:
            if len(rec) != width:
                raise FormatError(f"expected {width} fields, found {len(rec)}", lineno)
    return rows


def _features(lineno, toks):
    try:
        return [float(t) for t in toks]
    except ValueError:
        raise FormatError("non-numeric feature value", lineno) from None


def ingest_csv(path, require_both=True):
    """Labelled dataset from a CSV file whose first column is the label."""
    rows = read_rows(path)
    if not rows:
        raise EmptyClass(f"{path} contains no samples")
    if len(rows[0][1]) < 2:
        raise FormatError("need a label and at least one feature", rows[0][0])
    X, y = [], []
    for lineno, rec in rows:
        if rec[0] not in LABELS:
            raise LabelError(f"label must be +1, 1 or -1, got {rec[0]!r}", lineno)
        y.append(LABELS[rec[0]])
        X.append(_features(lineno, rec[1:]))
    data = Dataset(np.array(X), np.array(y))
    if require_both:
        data.require_both_classes()
    return data


def read_features(path, d):
    """Feature matrix for prediction; a leading label column is dropped if present."""
    rows = read_rows(path)
    if not rows:
        return np.zeros((0, d))
    width = len(rows[0][1])
    if width == d + 1:
        return np.array([_features(n, r[1:]) for n, r in rows])
    if width == d:
        return np.array([_features(n, r) for n, r in rows])
    raise DimensionError(f"model has d={d} but rows have {width} fields")


def _floats(v):
    return [float(x) for x in np.asarray(v, dtype=float).ravel()]


def model_to_dict(m):
    param = m.param
    if isinstance(param, (list, tuple)):
        param = [float(p) for p in param]
    elif param is not None:
        param = float(param)
    em = m.eta_max
    if isinstance(em, (list, tuple)):
        em = [float(p) for p in em]
    elif em is not None:
        em = float(em)
    return {
        "schema_version": SCHEMA_VERSION,
        "family": m.family,
        "param": param,
        "eta_max": em,
        "eta_status": m.eta_status,
        "regime": m.regime.value,
        "w": _floats(m.w),
        "b": float(m.b),
        "g_value": float(m.g_value),
        "bias_method": m.bias_method,
        "bias_fallback": bool(m.bias_fallback),
        "path": m.path,
        "per_class": None if m.per_class is None else [_floats(x) for x in m.per_class],
        "d": int(m.d),
    }


def model_from_dict(doc):
    try:
        if doc["schema_version"] != SCHEMA_VERSION:
            raise FormatError(f"unsupported schema_version {doc['schema_version']}")
        w = np.array(doc["w"], dtype=float)
        if w.size != doc["d"]:
            raise FormatError("w length does not match d")
        pc = doc.get("per_class")
        return TrainedModel(
            w=w, b=float(doc["b"]), family=doc["family"], param=doc["param"],
            eta_max=doc["eta_max"], eta_status=doc["eta_status"], regime=Regime(doc["regime"]),
            g_value=float(doc["g_value"]),
            per_class=None if pc is None else tuple(np.array(x, dtype=float) for x in pc),
            bias_method=doc["bias_method"], bias_fallback=bool(doc.get("bias_fallback", False)),
            path=doc.get("path", "convex"))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"malformed model file: {exc}") from None


def dump_json(obj):
    # repr floats round-trip exactly; sorted keys keep the bytes stable
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def save_model(m, path):
    with open(path, "w") as fh:
        fh.write(dump_json(model_to_dict(m)))


def load_model(path):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"model file is not JSON: {exc.msg}", exc.lineno) from None
    return model_from_dict(doc)


# ---------------------------------------------------------------------------
# config


@dataclass
class RunConfig:
    command: str
    data: Optional[str] = None
    family: str = "ch"
    param: object = AUTO
    kappa_plus: Optional[float] = None
    kappa_minus: Optional[float] = None
    rate_plus: Optional[float] = None
    rate_minus: Optional[float] = None
    bias: str = "midpoint"
    ridge: float = 1e-6
    tol: float = 1e-8
    eps: float = 1e-6
    max_iter: int = 10_000
    seed: int = 0
    out: Optional[str] = None
    trace: Optional[str] = None
    model: Optional[str] = None
    grid: int = 11

    @classmethod
    def from_args(cls, ns):
        fields = {k: v for k, v in vars(ns).items() if k in cls.__dataclass_fields__}
        return cls(**fields)

    def kappa_pair(self):
        """Explicit ``(kappa_plus, kappa_minus)`` from kappa or rate flags, or ``None``."""
        sides = []
        for k, r, name in ((self.kappa_plus, self.rate_plus, "plus"),
                           (self.kappa_minus, self.rate_minus, "minus")):
            if k is not None and r is not None:
                raise InvalidParameter(f"give --kappa-{name} or --rate-{name}, not both")
            sides.append(kappa_from_rate(r) if r is not None else k)
        if all(s is None for s in sides):
            return None
        if any(s is None for s in sides):
            raise InvalidParameter("set both the plus and the minus radius (kappa or rate)")
        if self.family != "ellipsoid":
            raise InvalidParameter("kappa and rate flags apply to the ellipsoid family only")
        return tuple(float(s) for s in sides)

    def parsed_param(self):
        if self.param is None or str(self.param).lower() == AUTO:
            return None
        try:
            return float(self.param)
        except ValueError:
            raise InvalidParameter(f"--param must be a number or 'auto', got {self.param!r}") from None

    def train_config(self):
        kappa = self.kappa_pair()
        if kappa is not None and self.parsed_param() is not None:
            raise InvalidParameter("give --param or a kappa/rate pair, not both")
        return TrainConfig(ridge=self.ridge, tol=self.tol, eps=self.eps, max_iter=self.max_iter,
                           seed=self.seed, bias=self.bias, kappa=kappa)


# ---------------------------------------------------------------------------
# commands


def _fmt(v):
    if v is None:
        return "none"
    if isinstance(v, (list, tuple)):
        return "(" + ",".join(f"{x:.10g}" for x in v) + ")"
    return f"{v:.10g}"


def _require(value, flag):
    if value is None:
        raise InvalidParameter(f"{flag} is required for this command")
    return value


def run_train(cfg):
    data = ingest_csv(_require(cfg.data, "--data"))
    tc = cfg.train_config()
    m = train(data, cfg.family, cfg.parsed_param(), tc)
    save_model(m, _require(cfg.out, "--out"))
    if cfg.trace:
        records = m.trace.as_list() if m.trace is not None else []
        with open(cfg.trace, "w") as fh:
            fh.write(dump_json(records))
    err = evaluate(m, data).error_rate
    print(f"family={m.family} param={_fmt(m.param)} eta_max={_fmt(m.eta_max)} "
          f"regime={m.regime.value} g_value={m.g_value:.10g} train_error={err:.6g}")
    return EXIT_OK


def run_predict(cfg):
    m = load_model(_require(cfg.model, "--model"))
    X = read_features(_require(cfg.data, "--data"), m.d)
    labels = predict(m, X) if len(X) else np.zeros(0, dtype=int)
    text = "".join(f"{int(v):+d}\n" for v in labels)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _family(cfg, data):
    kappa = cfg.kappa_pair()
    if kappa is None:
        return Family.from_data(data, cfg.family, cfg.ridge)
    top = max(kappa)
    if min(kappa) < 0 or top <= 0:
        raise InvalidParameter("kappa pair must be non-negative and not both zero")
    return Family.from_data(data, cfg.family, cfg.ridge, (kappa[0] / top, kappa[1] / top))


def _native(fam, eta):
    if fam.kind == "ellipsoid" and fam.kappa_ratio != (1.0, 1.0):
        return list(fam.radii(eta))
    return fam.to_native(eta)


def run_eta_max(cfg):
    data = ingest_csv(_require(cfg.data, "--data"))
    fam = _family(cfg, data)
    res = eta_max(fam, tol=min(cfg.tol, 1e-9))
    name = NATIVE_NAME[fam.kind]
    if res.status is EtaStatus.NEVER_INTERSECTS:
        print(f"{name}=none status={res.status.value}")
    else:
        print(f"{name}={_fmt(_native(fam, res.eta_max))} status={res.status.value}")
    return EXIT_OK


def sweep_grid(fam, emax, n):
    """``n`` normalized parameters from 0 up to the family limit (or twice the critical value)."""
    lo, hi = fam.eta_range()
    if fam.kind == "ch":
        raise InvalidParameter("the convex-hull family has no parameter to sweep")
    if not np.isfinite(hi):
        hi = 2.0 * emax.eta_max if emax.status is EtaStatus.FOUND and emax.eta_max > 0 else 1.0
    return np.linspace(lo, hi, n)


def run_sweep(cfg):
    data = ingest_csv(_require(cfg.data, "--data"))
    fam = _family(cfg, data)
    if cfg.grid < 2:
        raise InvalidParameter("--grid needs at least 2 points")
    emax = eta_max(fam, tol=min(cfg.tol, 1e-9))
    rows = eta_sweep(fam, sweep_grid(fam, emax, cfg.grid), emax, tol=cfg.tol)
    lines = []
    for eta, value in rows:
        native = _native(fam, eta)
        first = native[0] if isinstance(native, list) else native
        lines.append(f"{first!r},{value!r}\n")
    text = "".join(lines)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def run_verify(cfg):
    results = run_suites()
    for r in results:
        status = "PASS" if r.ok else "FAIL"
        print(f"{status} {r.name}: {r.passed}/{r.total}")
        for label in r.failed:
            print(f"  failed: {label}")
    failed = sum(len(r.failed) for r in results)
    passed = sum(r.passed for r in results)
    print(f"{passed} passed, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_SUITE


COMMANDS = {"train": run_train, "predict": run_predict, "eta-max": run_eta_max,
            "sweep": run_sweep, "verify": run_verify}


def build_parser():
    p = argparse.ArgumentParser(prog="rcm", description="Robust linear classification.",
                                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--data", help="CSV file, label in the first column")
    p.add_argument("--family", choices=["ch", "rch", "ellipsoid", "fda"], default="ch")
    p.add_argument("--param", default=AUTO,
                   help="nu (rch), kappa (ellipsoid), zeta (fda) or 'auto' for the critical value")
    p.add_argument("--kappa-plus", type=float, help="ellipsoid radius of the + class")
    p.add_argument("--kappa-minus", type=float, help="ellipsoid radius of the - class")
    p.add_argument("--rate-plus", type=float, help="+ class error rate, radius sqrt((1-r)/r)")
    p.add_argument("--rate-minus", type=float, help="- class error rate, radius sqrt((1-r)/r)")
    p.add_argument("--bias", choices=["midpoint", "threshold"], default="midpoint")
    p.add_argument("--ridge", type=float, default=1e-6,
                   help="covariance ridge relative to trace(cov)/d")
    p.add_argument("--tol", type=float, default=1e-8, help="nearest-point tolerance")
    p.add_argument("--eps", type=float, default=1e-6, help="local-search step tolerance")
    p.add_argument("--max-iter", type=int, default=10_000, help="local-search outer iterations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (model, predictions or sweep CSV)")
    p.add_argument("--trace", help="JSON trace of local-search iterations")
    p.add_argument("--model", help="model file for predict")
    p.add_argument("--grid", type=int, default=11, help="number of sweep points")
    return p


def main(argv=None):
    ns = build_parser().parse_args(argv)
    cfg = RunConfig.from_args(ns)
    try:
        return COMMANDS[cfg.command](cfg)
    except OSError as exc:
        code, exc_ = EXIT_IO, exc
    except FormatError as exc:
        code, exc_ = EXIT_FORMAT, exc
    except DimensionError as exc:
        code, exc_ = EXIT_DIMENSION, exc
    except (InvalidParameter, EmptyClass) as exc:
        code, exc_ = EXIT_PARAM, exc
    except RCMError as exc:
        code, exc_ = EXIT_SOLVER, exc
    print(f"rcm {cfg.command}: {type(exc_).__name__}: {exc_}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
