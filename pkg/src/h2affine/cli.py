"""Command-line entry point.

    h2affine run <name> [--a F] [--N I] [--m I] [--tol F] [--seed I] [--trials I]
                        [--out PATH] [--format csv|json] [--config FILE]
    h2affine list
    h2affine verify-all [--quick] [--out DIR] [--config FILE]

Exit codes: 0 success, 1 usage error, 2 numeric failure, 3 I/O error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import experiments as ex
from .report import ReportIOError, plain, write_report

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3

_NUMERIC_KEYS = {"a": float, "N": int, "m": int, "tol": float, "seed": int, "trials": int}
_TEXT_KEYS = {"out", "format", "name"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def read_config(path: str) -> dict:
    """Flat key=value file; blank lines and lines starting with # are skipped."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ReportIOError(f"cannot read config {path}: {exc}") from exc
    cfg = {}
    for no, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key=value")
        k, v = (x.strip() for x in line.split("=", 1))
        if k in _NUMERIC_KEYS:
            try:
                cfg[k] = _NUMERIC_KEYS[k](v)
            except ValueError:
                raise UsageError(f"{path}:{no}: bad value for {k}: {v!r}") from None
        elif k in _TEXT_KEYS:
            cfg[k] = v
        else:
            raise UsageError(f"{path}:{no}: unknown key {k!r}")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="h2affine", description="Composition operators with affine symbols on H^2.")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    r = sub.add_parser("run", help="run one registry experiment")
    r.add_argument("name", nargs="?")
    r.add_argument("--a", type=float)
    r.add_argument("--N", type=int)
    r.add_argument("--m", type=int)
    r.add_argument("--tol", type=float)
    r.add_argument("--seed", type=int)
    r.add_argument("--trials", type=int)
    r.add_argument("--out")
    r.add_argument("--format", choices=("csv", "json"))
    r.add_argument("--config")
    sub.add_parser("list", help="list registry experiments")
    v = sub.add_parser("verify-all", help="run every experiment and check its bounds")
    v.add_argument("--quick", action="store_true")
    v.add_argument("--out", default="verify_reports")
    v.add_argument("--config")
    return p


def _cmd_list(out) -> int:
    for name, anchor, desc in ex.list_experiments():
        print(f"{name}\t{anchor}\t{desc}", file=out)
    return EXIT_OK


def _status_lines(report, out):
    for key, ok in report.checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {report.spec.name}: {key}", file=out)


def _cmd_run(args, out) -> int:
    cfg = read_config(args.config) if args.config else {}
    name = args.name or cfg.pop("name", None)
    cfg.pop("name", None)
    if not name:
        raise UsageError("run: experiment name required")
    over = {k: cfg.get(k) for k in _NUMERIC_KEYS}
    for k in _NUMERIC_KEYS:
        if getattr(args, k) is not None:
            over[k] = getattr(args, k)
    try:
        spec = ex.default_spec(name, **over)
        spec = ex.with_output(spec, args.out or cfg.get("out"), args.format or cfg.get("format"))
    except ex.SpecError as exc:
        raise UsageError(str(exc)) from None
    report = ex.run_experiment(spec)
    if spec.out:
        write_report(report)
        print(f"wrote {spec.out}", file=out)
    else:
        from .report import to_csv, to_json
        out.write(to_csv(report) if spec.format == "csv" else to_json(report))
    _status_lines(report, sys.stderr if not spec.out else out)
    return EXIT_OK if report.passed else EXIT_NUMERIC


def verify_all(out_dir: str, quick: bool = False, overrides: dict | None = None, out=None) -> int:
    """Run the whole registry, write every report as json and csv, and check bounds."""
    overrides = overrides or {}
    out = sys.stdout if out is None else out
    summary = {}
    failed = False
    for name, anchor, _ in ex.list_experiments():
        spec = ex.default_spec(name, quick=quick, **overrides)
        report = ex.run_experiment(spec)
        base = os.path.join(out_dir, name)
        write_report(report, "json", base + ".json")
        write_report(report, "csv", base + ".csv")
        _status_lines(report, out)
        summary[name] = {"anchor": anchor, "passed": report.passed, "checks": report.checks}
        failed |= not report.passed
    path = os.path.join(out_dir, "verify_summary.json")
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(plain({"quick": quick, "experiments": summary}), indent=2) + "\n")
    except OSError as exc:
        raise ReportIOError(f"cannot write {path}: {exc}") from exc
    n_fail = sum(not v["passed"] for v in summary.values())
    print(f"{len(summary) - n_fail}/{len(summary)} experiments passed", file=out)
    return EXIT_NUMERIC if failed else EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.cmd == "list":
            return _cmd_list(sys.stdout)
        if args.cmd == "run":
            return _cmd_run(args, sys.stdout)
        cfg = read_config(args.config) if args.config else {}
        over = {k: cfg[k] for k in _NUMERIC_KEYS if k in cfg}
        try:
            return verify_all(args.out, args.quick, over)
        except ex.SpecError as exc:
            raise UsageError(str(exc)) from None
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ReportIOError as exc:
        print(exc, file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, ValueError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
