"""Command-line front end.

Every command reads a run spec (``--spec file.json`` and/or flags), does
its work through the library, and writes one JSON, CSV or SVG artifact.
Each artifact records the run-spec hash and seed next to the package version.

Exit codes: 0 ok, 1 invalid input, 2 rejected by the theorem hypotheses
(``q <= 1`` or no witness), 3 failed check.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, Optional

from . import __version__, acceptance, diagram
from .exponents import (
    QCRegularity,
    Rejection,
    hk_beta_planar,
    planar_bounds,
    regime_of,
    sobolev_q,
    target_inv_q,
    target_q,
)
from .norms import DEFAULT_CUTOFFS, DEFAULT_SEED, SLOPE_THRESHOLD, FractionalNormSpec, estimate, worker_count
from .profiles import constant, custom, flat_power, singular_power
from .radial_maps import Ball, RadialStretch, jacobian_power_integral, jacobian_power_integral_quadrature
from .sharpness import InfeasibleWitness, build_witness, verify_witness_numerically

EXIT_OK, EXIT_INVALID, EXIT_REJECTED, EXIT_FAILED = 0, 1, 2, 3
COMMANDS = ("exponents", "diagram", "jacobian", "witness", "verify", "norms", "suite")
FORMATS = ("json", "csv", "svg")


class InvalidInput(ValueError):
    pass


class Rejected(Exception):
    pass


# -- run spec -----------------------------------------------------------------

PARAMS: Dict[str, set] = {
    "exponents": {"s", "p", "n", "a", "b", "C_a", "C_b", "K"},
    "diagram": {"n", "a", "b", "sources", "s_values", "inv_p_values", "index_for", "epsilon0", "title"},
    "jacobian": {"k", "t", "n", "radius"},
    "witness": {"regime", "s", "p", "q_prime", "n", "a", "b"},
    "verify": {"regime", "s", "p", "q_prime", "n", "a", "b", "estimator", "slope_threshold"},
    "norms": {"profile", "s", "p", "n", "radius", "estimator", "slope_threshold", "cutoffs", "samples"},
    "suite": {"criteria", "slope_threshold"},
}
DEFAULT_FORMAT = {"diagram": "svg", "jacobian": "csv"}
SPEC_KEYS = {"command", "params", "output", "seed"}


@dataclass
class RunSpec:
    command: str
    params: Dict[str, Any] = field(default_factory=dict)
    output: Dict[str, Any] = field(default_factory=dict)
    seed: int = DEFAULT_SEED

    @classmethod
    def from_dict(cls, d: dict) -> "RunSpec":
        if not isinstance(d, dict):
            raise InvalidInput("run spec must be a JSON object")
        unknown = set(d) - SPEC_KEYS
        if unknown:
            raise InvalidInput(f"unknown run-spec keys: {sorted(unknown)}")
        if "command" not in d:
            raise InvalidInput("run spec needs a command")
        out = d.get("output", {}) or {}
        if not isinstance(out, dict) or set(out) - {"path", "format"}:
            raise InvalidInput("output must be an object with optional 'path' and 'format'")
        spec = cls(d["command"], dict(d.get("params", {}) or {}), dict(out), d.get("seed", DEFAULT_SEED))
        spec.validate()
        return spec

    def validate(self):
        if self.command not in COMMANDS:
            raise InvalidInput(f"unknown command {self.command!r}")
        if not isinstance(self.params, dict):
            raise InvalidInput("params must be an object")
        unknown = set(self.params) - PARAMS[self.command]
        if unknown:
            raise InvalidInput(f"unknown params for {self.command}: {sorted(unknown)}")
        fmt = self.output.get("format")
        if fmt is not None and fmt not in FORMATS:
            raise InvalidInput(f"format must be one of {FORMATS}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidInput("seed must be an unsigned 64-bit integer")

    @property
    def format(self) -> str:
        return self.output.get("format") or DEFAULT_FORMAT.get(self.command, "json")

    def to_dict(self) -> dict:
        return {"command": self.command, "params": self.params, "output": self.output, "seed": self.seed}

    @property
    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


# -- parameter coercion ---------------------------------------------------------


def num(x, name="value"):
    """Exact number from JSON: ints and decimal literals become Fractions."""
    if isinstance(x, bool) or x is None:
        raise InvalidInput(f"{name}: expected a number, got {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if math.isinf(x):
            return math.inf
        return Fraction(repr(float(x)))
    if isinstance(x, str):
        if x.strip().lower() in ("inf", "infinity"):
            return math.inf
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise InvalidInput(f"{name}: cannot parse {x!r}") from None
    raise InvalidInput(f"{name}: expected a number, got {x!r}")


def _get(params, key, default=None, required=False):
    if key in params:
        return num(params[key], key)
    if required:
        raise InvalidInput(f"missing parameter {key!r}")
    return default


def _int(params, key, default):
    v = params.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise InvalidInput(f"{key} must be a positive integer")
    return v


def _regularity(params, n) -> QCRegularity:
    try:
        return QCRegularity(
            n,
            a=_get(params, "a", math.inf),
            b=_get(params, "b", math.inf),
            C_a=_get(params, "C_a", 1),
            C_b=_get(params, "C_b", 1),
        )
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None


def _exact(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return repr(float(x))


# -- commands -------------------------------------------------------------------


def cmd_exponents(spec: RunSpec):
    P = spec.params
    s, p = _get(P, "s", required=True), _get(P, "p", required=True)
    n = _int(P, "n", 2)
    if not 0 <= s <= 1 or not p > 1:
        raise InvalidInput("need 0 <= s <= 1 and p > 1")
    row = {"s": _exact(s), "p": _exact(p), "n": n, "regime": regime_of(s, p, n).value}
    if "K" in P:
        if n != 2 or "a" in P or "b" in P:
            raise InvalidInput("planar queries take K with n = 2 and no explicit a, b")
        K = _get(P, "K")
        if K < 1:
            raise InvalidInput("K must be >= 1")
        a_K, b_K = planar_bounds(K)
        reg = QCRegularity(2, a=a_K, b=b_K, K=K)
        inv_bound = target_inv_q(s, p, reg)
        row.update(K=_exact(K), a_K=_exact(a_K), b_K=_exact(b_K), inv_q_bound=_exact(inv_bound),
                   bound=f"1/q > {_exact(inv_bound)}")
        if regime_of(s, p, 2).value == "subcritical" and s < 2 / p:
            beta = hk_beta_planar(s, p, K)
            row["beta"] = beta.reason if isinstance(beta, Rejection) else _exact(beta)
        rows = [row]
        if inv_bound >= 1:
            raise Rejected(json.dumps(rows))
        return rows
    reg = _regularity(P, n)
    q = target_q(s, p, reg)
    if isinstance(q, Rejection):
        row.update(q=None, rejected=q.reason, inv_q=_exact(q.value))
        raise Rejected(json.dumps([row]))
    row.update(q=_exact(q), inv_q=_exact(1 / q if not math.isinf(q) else 0), admissible=True)
    if s == 1:
        sq = sobolev_q(p, reg)
        row["sobolev_rule"] = sq.reason if isinstance(sq, Rejection) else _exact(sq)
    return [row]


def cmd_diagram(spec: RunSpec):
    P = spec.params
    n = _int(P, "n", 2)
    reg = _regularity(P, n)

    def pairs(key):
        v = P.get(key)
        if v is None:
            return None
        if not isinstance(v, list) or not all(isinstance(x, list) and len(x) == 2 for x in v):
            raise InvalidInput(f"{key} must be a list of [s, p] pairs")
        return [(num(a, key), num(b, key)) for a, b in v]

    def values(key, default):
        v = P.get(key)
        if v is None:
            return default
        if not isinstance(v, list):
            raise InvalidInput(f"{key} must be a list")
        return [num(x, key) for x in v]

    index_for = P.get("index_for")
    if index_for is not None:
        if not isinstance(index_for, list) or len(index_for) != 2:
            raise InvalidInput("index_for must be [s, p]")
        index_for = (num(index_for[0], "index_for"), num(index_for[1], "index_for"))
    try:
        fig = diagram.build(
            reg,
            sources=pairs("sources"),
            s_values=values("s_values", diagram.DEFAULT_S),
            inv_p_values=values("inv_p_values", diagram.DEFAULT_INV_P),
            index_for=index_for,
            epsilon0=_get(P, "epsilon0"),
        )
    except ValueError as exc:
        if "q <= 1" in str(exc):
            raise Rejected(str(exc)) from None
        raise InvalidInput(str(exc)) from None
    return fig


def cmd_jacobian(spec: RunSpec):
    P = spec.params
    n = _int(P, "n", 2)
    ks = P.get("k", [1, 2])
    ts = P.get("t", [1])
    ks = ks if isinstance(ks, list) else [ks]
    ts = ts if isinstance(ts, list) else [ts]
    R = _get(P, "radius", Fraction(1))
    rows = []
    for k in ks:
        k = num(k, "k")
        if not k > 0:
            raise InvalidInput("k must be positive")
        phi = RadialStretch(k, n)
        for t in ts:
            t = num(t, "t")
            exact = jacobian_power_integral(phi, Ball(float(R)), t)
            quad = jacobian_power_integral_quadrature(phi, Ball(float(R)), t)
            div = math.isinf(exact)
            rows.append({
                "k": _exact(k),
                "t": _exact(t),
                "n": n,
                "radius": _exact(R),
                "closed_form": "divergent" if div else repr(float(exact)),
                "quadrature": "divergent" if math.isinf(quad) else repr(float(quad)),
                "rel_error": "" if div or math.isinf(quad) else repr(float(abs(exact - quad) / exact)),
                "distortion": repr(float(phi.distortion)),
            })
    return rows


def _witness_from(P):
    regime = P.get("regime")
    n = _int(P, "n", 2)
    s, p, qp = (_get(P, k, required=True) for k in ("s", "p", "q_prime"))
    if regime not in ("subcritical", "supercritical"):
        if regime == "critical":
            raise Rejected("the critical regime has no witness")
        raise InvalidInput("regime must be 'subcritical' or 'supercritical'")
    key = "b" if regime == "subcritical" else "a"
    c = _get(P, key, required=True)
    try:
        return build_witness(regime, s, p, qp, n, c)
    except InfeasibleWitness as exc:
        raise Rejected(str(exc)) from None
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None


def cmd_witness(spec: RunSpec):
    return _witness_from(spec.params).to_dict()


def cmd_verify(spec: RunSpec):
    P = spec.params
    w = _witness_from(P)
    thr = float(_get(P, "slope_threshold", Fraction(str(SLOPE_THRESHOLD))))
    report = verify_witness_numerically(
        w, estimator=P.get("estimator", "gagliardo_double_integral"), slope_threshold=thr, seed=spec.seed
    )
    return report


def _profile(d):
    if not isinstance(d, dict) or "kind" not in d or set(d) - {"kind", "rho", "pieces", "value"}:
        raise InvalidInput("profile must be {kind, rho} or {kind: custom, pieces}")
    kind = d["kind"]
    if kind in ("singular_power", "flat_power"):
        rho = num(d.get("rho"), "rho")
        return (singular_power if kind == "singular_power" else flat_power)(rho)
    if kind == "constant":
        return constant(float(num(d.get("value", 1), "value")))
    if kind == "custom":
        pieces = d.get("pieces")
        if not isinstance(pieces, list) or not pieces:
            raise InvalidInput("custom profile needs pieces [[lo, hi, coeff, exponent], ...]")
        return custom([[float(num(x, "piece")) for x in pc] for pc in pieces])
    raise InvalidInput(f"unknown profile kind {kind!r}")


def cmd_norms(spec: RunSpec):
    P = spec.params
    try:
        prof = _profile(P.get("profile"))
        nspec = FractionalNormSpec(
            float(_get(P, "s", required=True)),
            float(_get(P, "p", required=True)),
            _int(P, "n", 2),
            Ball(float(_get(P, "radius", Fraction(1)))),
            P.get("estimator", "gagliardo_double_integral"),
        )
        cutoffs = P.get("cutoffs", list(DEFAULT_CUTOFFS))
        kw = {
            "slope_threshold": float(_get(P, "slope_threshold", Fraction(str(SLOPE_THRESHOLD)))),
            "cutoffs": [float(num(c, "cutoffs")) for c in cutoffs],
        }
        if nspec.estimator == "modulus_of_smoothness":
            kw.update(seed=spec.seed, samples=_int(P, "samples", 100_000))
        return estimate(prof, nspec, **kw).to_dict()
    except InvalidInput:
        raise
    except ValueError as exc:
        raise InvalidInput(str(exc)) from None


def cmd_suite(spec: RunSpec, echo=None):
    P = spec.params
    crit = P.get("criteria")
    if crit is not None and (not isinstance(crit, list) or not all(isinstance(c, int) for c in crit)):
        raise InvalidInput("criteria must be a list of integers")
    thr = float(_get(P, "slope_threshold", Fraction(str(SLOPE_THRESHOLD))))
    if thr < 0:
        raise InvalidInput("slope_threshold must be nonnegative")
    cfg = acceptance.SuiteConfig(slope_threshold=thr, seed=spec.seed, criteria=crit)
    results = acceptance.run_suite(cfg, echo=echo)
    return {"passed": all(r.passed for r in results), "criteria": [r.to_dict() for r in results]}


# -- output ---------------------------------------------------------------------


def _metadata(spec: RunSpec) -> dict:
    return {"spec_hash": spec.digest, "seed": spec.seed, "version": __version__, "command": spec.command}


def _json_default(x):
    if isinstance(x, Fraction):
        return float(x)
    if hasattr(x, "value"):
        return x.value
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _table_csv(rows, meta) -> str:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={v}\n")
    if rows:
        w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in rows:
            w.writerow({k: ("" if v is None else v) for k, v in r.items()})
    return buf.getvalue()


def render(spec: RunSpec, result) -> str:
    meta = _metadata(spec)
    fmt = spec.format
    if isinstance(result, diagram.Diagram):
        if fmt == "svg":
            title = spec.params.get("title")
            comment = "<!-- " + " ".join(f"{k}={v}" for k, v in meta.items()) + " -->\n"
            svg = result.svg(title)
            return svg.replace("\n", "\n" + comment, 1)
        if fmt == "csv":
            head = "".join(f"# {k}={v}\n" for k, v in meta.items())
            return head + result.csv()
        return json.dumps({"metadata": meta, "result": result.to_dict()}, indent=2, default=_json_default) + "\n"
    if fmt == "svg":
        raise InvalidInput(f"{spec.command} has no SVG output")
    if fmt == "csv":
        rows = result if isinstance(result, list) else [_flatten(result)]
        return _table_csv(rows, meta)
    return json.dumps({"metadata": meta, "result": result}, indent=2, default=_json_default) + "\n"


def _flatten(d, prefix=""):
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, default=_json_default)
        else:
            out[key] = v
    return out


def write_atomic(path: str, text: str):
    """Write via a temporary file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".qcc-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- entry point ----------------------------------------------------------------


def _parse_override(item: str):
    if "=" not in item:
        raise InvalidInput(f"--param expects key=value, got {item!r}")
    key, raw = item.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return key.strip(), value


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qcc", description="Composition-operator exponent toolkit.")
    ap.add_argument("command", nargs="?", choices=COMMANDS, help="command (may come from --spec)")
    ap.add_argument("--spec", help="JSON run spec")
    ap.add_argument("--out", help="output path (default: stdout)")
    ap.add_argument("--format", choices=FORMATS, help="output format")
    ap.add_argument("--seed", type=int, help="seed for stochastic estimators (u64)")
    ap.add_argument("--tolerance", type=float,
                    help="relative tolerance for the jacobian command's quadrature check")
    ap.add_argument("-P", "--param", action="append", default=[], metavar="KEY=VALUE",
                    help="set a command parameter (value parsed as JSON)")
    ap.add_argument("--version", action="version", version=f"qcc {__version__}")
    return ap


def _load_spec(args) -> RunSpec:
    data: Dict[str, Any] = {}
    if args.spec:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise InvalidInput(f"cannot read spec: {exc}") from None
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"spec is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise InvalidInput("run spec must be a JSON object")
    if args.command:
        if data.get("command") not in (None, args.command):
            raise InvalidInput("command given twice with different values")
        data["command"] = args.command
    params = dict(data.get("params", {}) or {})
    for item in args.param:
        k, v = _parse_override(item)
        params[k] = v
    data["params"] = params
    out = dict(data.get("output", {}) or {})
    if args.out:
        out["path"] = args.out
    if args.format:
        out["format"] = args.format
    data["output"] = out
    if args.seed is not None:
        data["seed"] = args.seed
    return RunSpec.from_dict(data)


RUNNERS = {
    "exponents": cmd_exponents,
    "diagram": cmd_diagram,
    "jacobian": cmd_jacobian,
    "witness": cmd_witness,
    "verify": cmd_verify,
    "norms": cmd_norms,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    err = sys.stderr
    try:
        try:
            worker_count()  # validates QCC_THREADS early
        except ValueError as exc:
            raise InvalidInput(str(exc)) from None
        spec = _load_spec(args)
        code = EXIT_OK
        if spec.command == "suite":
            result = cmd_suite(spec, echo=lambda line: print(line, file=err))
            if not result["passed"]:
                code = EXIT_FAILED
        else:
            result = RUNNERS[spec.command](spec)
            if spec.command == "jacobian" and args.tolerance is not None:
                bad = [r for r in result if r["rel_error"] and float(r["rel_error"]) > args.tolerance]
                if bad:
                    code = EXIT_FAILED
            if spec.command == "verify" and not result["ok"]:
                code = EXIT_FAILED
        text = render(spec, result)
    except InvalidInput as exc:
        print(f"qcc: invalid input: {exc}", file=err)
        return EXIT_INVALID
    except Rejected as exc:
        print(f"qcc: rejected: {exc}", file=err)
        return EXIT_REJECTED
    path = spec.output.get("path")
    if path:
        write_atomic(path, text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
