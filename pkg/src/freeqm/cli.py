"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import free_products as fp
from . import metric_targets as mt
from . import qm_core as qc
from . import sequences as sq
from . import twisted as tw
from .kernels import BACKEND
from .suite import SUITES, run_suite
from .words import Alphabet, WordParseError, parse_word

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


class ConfigError(Exception):
    pass


# -- input helpers -----------------------------------------------------------------


def _load_json(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _budget(text: str) -> tuple[int, int]:
    try:
        parts = dict(p.split("=", 1) for p in text.replace(" ", "").split(","))
        k, l = int(parts["K"]), int(parts["L"])
    except (ValueError, KeyError):
        raise argparse.ArgumentTypeError(f"budget must look like K=<int>,L=<int>, got {text!r}") from None
    if k < 1 or l < 1:
        raise argparse.ArgumentTypeError("budget values must be positive")
    return k, l


def _alphabet(text: str) -> Alphabet:
    try:
        alpha = Alphabet.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if len(alpha) < 2:
        raise argparse.ArgumentTypeError("alphabet needs at least two generators")
    return alpha


def _qm(args) -> qc.SyllableQM:
    if not args.sigma:
        raise ConfigError("--sigma is required")
    data = _load_json(args.sigma)
    try:
        if isinstance(data, dict) and "form" in data:
            return qc.SyllableQM.uniform(args.alphabet, sq.sequence_from_json(data))
        if isinstance(data, dict):
            return qc.SyllableQM(args.alphabet, {g: sq.sequence_from_json(v) for g, v in data.items()})
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"{args.sigma}: {exc}") from None
    raise ConfigError(f"{args.sigma}: expected a sequence object or a per-generator map")


def _word(args, alphabet):
    try:
        return parse_word(args.word or "", alphabet)
    except WordParseError as exc:
        raise ConfigError(f"--word: {exc}") from None


# -- output ------------------------------------------------------------------------


def _flatten(record, prefix=""):
    out = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        elif isinstance(value, list):
            out[name] = ";".join(json.dumps(v) if isinstance(v, (dict, list)) else str(v) for v in value)
        else:
            out[name] = value
    return out


def emit(record, fmt: str, out=None):
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(record, indent=2, sort_keys=True) + "\n")
        return
    tabular = isinstance(record, dict) and "rows" in record
    rows = record["rows"] if tabular else [record]
    flat = [_flatten(r) for r in rows]
    if fmt == "csv":
        keys = []
        for row in flat:
            keys.extend(k for k in row if k not in keys)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
        out.write(buf.getvalue())
        return
    if len(flat) == 1 and set(flat[0]) == {"value"}:
        out.write(f"{flat[0]['value']}\n")
        return
    if tabular:
        header = _flatten({k: v for k, v in record.items() if k != "rows"})
        width = max((len(k) for k in header), default=0)
        for k, v in header.items():
            out.write(f"{k.ljust(width)}  {v}\n")
        out.write("\n")
    for row in flat:
        width = max(len(k) for k in row) if row else 0
        for k, v in row.items():
            out.write(f"{k.ljust(width)}  {v}\n")
        if len(flat) > 1:
            out.write("\n")


# -- subcommands -------------------------------------------------------------------


def cmd_eval(args):
    qm = _qm(args)
    x = _word(args, qm.alphabet)
    try:
        value = qm(x)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.format == "human":
        return {"value": str(value)}, EXIT_OK
    return {"word": str(x), "value": str(value)}, EXIT_OK


def cmd_defect(args):
    qm = _qm(args)
    k, l = args.budget
    cert = qc.defect_bruteforce(qm, k, l, sample=args.sample, seed=args.seed)
    record = cert.to_json()
    record["seed"] = args.seed
    record["backend"] = BACKEND
    return record, EXIT_OK if cert.consistent else EXIT_FAIL


def cmd_homogenize(args):
    qm = _qm(args)
    x = _word(args, qm.alphabet)
    closed = qc.homogenize_closed_form(qm, x)
    est, err = qc.homogenize_limit(qm, x, args.n)
    ok = abs(closed - est) <= err
    record = {
        "word": str(x),
        "closed_form": str(closed),
        "limit_estimate": str(est),
        "error_bound": str(err),
        "n": args.n,
        "agrees": ok,
    }
    return record, EXIT_OK if ok else EXIT_FAIL


def cmd_gromov(args):
    qm = _qm(args)
    if not qm.is_uniform():
        raise ConfigError("gromov needs one sequence shared by all generators")
    try:
        report = qc.gromov_certificate(qm)
    except qc.WitnessMismatch as exc:
        return {"error": str(exc)}, EXIT_FAIL
    return report.to_json(), EXIT_OK


def cmd_witness(args):
    qm = _qm(args)
    s, t = qm.alphabet.names[:2]
    try:
        value = qc.injectivity_witness(qm, s, t, args.l, args.k)
    except qc.WitnessMismatch as exc:
        return {"error": str(exc)}, EXIT_FAIL
    return {"l": args.l, "k": args.k, "value": str(value),
            "expected": str(2 * args.k * qm.family[s](args.l))}, EXIT_OK


def _product(args) -> fp.FreeProduct:
    try:
        return fp.FreeProduct.parse(args.factors)
    except ValueError as exc:
        raise ConfigError(f"--factors: {exc}") from None


def _fp_sigma(args, product):
    if not args.sigma:
        if product.factors == fp.PSL2.factors:
            return fp.psl2_default_sigma(1)
        raise ConfigError("--sigma is required for this free product")
    try:
        return fp.fp_sigma_from_json(product, _load_json(args.sigma))
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ConfigError(f"{args.sigma}: {exc}") from None


def cmd_fp_eval(args):
    product = _product(args)
    sigma = _fp_sigma(args, product)
    try:
        x = product.parse_word(args.word or "")
    except ValueError as exc:
        raise ConfigError(f"--word: {exc}") from None
    return {"word": str(x), "value": str(fp.fp_eval(sigma, x))}, EXIT_OK


def cmd_fp_dim(args):
    product = _product(args)
    try:
        dims = {name: fp.odd_map_dimension(g) for name, g in product.factors.items()}
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return {"factors": {n: str(d) for n, d in dims.items()}, "v0_dimension": sum(dims.values())}, EXIT_OK


def _matrix(args):
    try:
        return fp._as_matrix(args.matrix)
    except (ValueError, json.JSONDecodeError) as exc:
        raise ConfigError(f"--matrix: {exc}") from None


def cmd_psl2_parse(args):
    m = _matrix(args)
    w = fp.psl2_parse(m)
    back = fp.psl2_matrix(w)
    ok = fp.psl2_equal(back, m)
    return {"matrix": [list(r) for r in m], "word": str(w),
            "product": [list(r) for r in back], "roundtrip": ok}, EXIT_OK if ok else EXIT_FAIL


def cmd_psl2_eval(args):
    m = _matrix(args)
    args.factors = "A=Z2,B=Z3"
    sigma = _fp_sigma(args, fp.PSL2)
    w = fp.psl2_parse(m)
    return {"matrix": [list(r) for r in m], "word": str(w),
            "value": str(fp.fp_eval(sigma, w))}, EXIT_OK


def cmd_epsrep(args):
    try:
        group = mt.MetricGroup.parse(args.group, args.eps)
    except ValueError as exc:
        raise ConfigError(f"--group: {exc}") from None
    if not args.sigma:
        raise ConfigError("--sigma is required")
    try:
        sigma = mt.GroupSequenceSpec.from_json(_load_json(args.sigma), group)
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(f"{args.sigma}: {exc}") from None
    k, l = args.budget
    report = mt.eps_defect_bruteforce(sigma, k, l, check=False)
    verdict = mt.nontriviality_check(sigma, args.eps)
    record = {"bound": report.to_json(), "nontriviality": verdict.to_json()}
    return record, EXIT_OK if report.holds else EXIT_FAIL


def cmd_twisted(args):
    k, l = args.budget
    if args.rep:
        try:
            pi = tw.UnitaryRep.from_json(_load_json(args.rep))
            data = _load_json(args.sigma) if args.sigma else None
            if data is None:
                raise ConfigError("--sigma is required with --rep")
            tables = {g: [[complex(re, im) for re, im in vec] for vec in vecs] for g, vecs in data.items()}
            sigma = tw.TwistedSequence(pi, tables)
        except (ValueError, TypeError, KeyError) as exc:
            raise ConfigError(str(exc)) from None
        report = tw.twisted_bound_check(pi, sigma, k, l)
    else:
        pi, sigma = tw.random_twisted_setup(args.alphabet, args.dim, min(k, 2), args.seed)
        report = tw.twisted_bound_check(pi, sigma, k, l, args.seed)
    return report.to_json(), EXIT_OK if report.holds else EXIT_FAIL


def cmd_suite(args):
    k, l = args.budget
    extra = ()
    if args.sigma:
        extra = (_qm(args).family[args.alphabet.names[0]],)
    results = run_suite(k, l, args.seed, only=args.only, extra_sequences=extra)
    rows = [r.to_json() for r in results]
    if not args.timings:
        for r in rows:
            r.pop("seconds")
    weak = k < 3 or l < 4
    record = {
        "budget": {"K": k, "L": l},
        "seed": args.seed,
        "backend": BACKEND,
        "coverage": "reduced" if weak else "default",
        "passed": all(r.passed for r in results),
        "rows": rows,
    }
    return record, EXIT_OK if record["passed"] else EXIT_FAIL


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "human"), default="human")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--alphabet", type=_alphabet, default=Alphabet(("s", "t")),
                        help="comma-separated generator names (default: s,t)")

    parser = argparse.ArgumentParser(prog="freeqm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help, parent=sub, budget=None):
        p = parent.add_parser(name, parents=[common], help=help)
        p.set_defaults(func=func)
        if budget is not None:
            p.add_argument("--budget", type=_budget, default=budget, help="K=<int>,L=<int>")
        return p

    p = add("eval", cmd_eval, "evaluate g on a word")
    p.add_argument("--sigma", required=True)
    p.add_argument("--word", default="")

    p = add("defect", cmd_defect, "exact vs brute-force defect", budget=(3, 3))
    p.add_argument("--sigma", required=True)
    p.add_argument("--sample", type=int, default=None, help="sample this many pairs instead of all")

    p = add("homogenize", cmd_homogenize, "closed-form vs limit homogenization")
    p.add_argument("--sigma", required=True)
    p.add_argument("--word", default="")
    p.add_argument("--n", type=int, default=1024)

    p = add("gromov", cmd_gromov, "Gromov norm certificate")
    p.add_argument("--sigma", required=True)

    p = add("witness", cmd_witness, "injectivity witness g((s^l t^l)^k)")
    p.add_argument("--sigma", required=True)
    p.add_argument("--l", type=int, default=1)
    p.add_argument("--k", type=int, default=10)

    fp_parser = sub.add_parser("fp", help="free products")
    fp_sub = fp_parser.add_subparsers(dest="fp_command", required=True)
    p = add("eval", cmd_fp_eval, "evaluate g on a free-product word", parent=fp_sub)
    p.add_argument("--factors", default="A=Z2,B=Z3")
    p.add_argument("--sigma")
    p.add_argument("--word", default="")
    p = add("dim", cmd_fp_dim, "dimension of the odd-map space", parent=fp_sub)
    p.add_argument("--factors", default="A=Z2,B=Z3")

    psl = sub.add_parser("psl2", help="PSL(2, Z) = Z2 * Z3")
    psl_sub = psl.add_subparsers(dest="psl2_command", required=True)
    p = add("parse", cmd_psl2_parse, "normal form of a unimodular matrix", parent=psl_sub)
    p.add_argument("--matrix", required=True, help="JSON [[a,b],[c,d]]")
    p = add("eval", cmd_psl2_eval, "evaluate g on a matrix", parent=psl_sub)
    p.add_argument("--matrix", required=True)
    p.add_argument("--sigma")

    eps = sub.add_parser("epsrep", help="quasi-morphisms into metric groups")
    eps_sub = eps.add_subparsers(dest="epsrep_command", required=True)
    p = add("check", cmd_epsrep, "bound and non-triviality check", parent=eps_sub, budget=(2, 3))
    p.add_argument("--group", default="u1", help="reals, u1 or uN")
    p.add_argument("--sigma", required=True)
    p.add_argument("--eps", type=float, default=None)

    twp = sub.add_parser("twisted", help="twisted quasi-morphisms")
    tw_sub = twp.add_subparsers(dest="twisted_command", required=True)
    p = add("check", cmd_twisted, "twisted coboundary bound", parent=tw_sub, budget=(2, 3))
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--rep")
    p.add_argument("--sigma")

    p = add("suite", cmd_suite, "run every property suite", budget=(3, 4))
    p.add_argument("--only", nargs="*", choices=sorted(SUITES))
    p.add_argument("--sigma", help="extra sequence to include in the quasi-morphism checks")
    p.add_argument("--timings", action="store_true", help="include wall-clock times (breaks byte-identical output)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        record, code = args.func(args)
    except ConfigError as exc:
        print(f"freeqm: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    emit(record, args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
