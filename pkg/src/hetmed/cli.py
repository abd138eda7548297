"""Command-line interface: estimate, bounds, simulate, verify.

Exit codes: 0 success/consistent, 1 verification or coverage failure,
2 I/O error, 3 input or schema error, 4 missing required data.  Every
command taking a seed is fully reproducible; report files embed their run
manifest so any output can be regenerated from the file alone.
"""

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict
from datetime import datetime, timezone

from . import __version__
from .bounds import compare_all
from .estimators import empirical_mean, empirical_median, mle_oracle
from .simulation import (
    PROFILE_KINDS,
    ProfileSpec,
    SimulationConfig,
    constant_c_for,
    materialize_profile,
    run_experiment,
)
from .verify import (
    run_cor2_suite,
    run_dominance_suite,
    run_lemma1_suite,
    run_lemma2_suite,
)

__all__ = ["main"]


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; the exit-code contract wants 3.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def _manifest(command: str, config: dict, seed) -> dict:
    return {
        "command": command,
        "config": config,
        "seed": seed,
        "artifact_version": __version__,
        "started": _utc_now(),
        "finished": None,
    }


# ---------------------------------------------------------------- estimate


def _read_data_csv(path):
    """Read `value` or `value,sigma` rows; comments start with '#'."""
    try:
        handle = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise CliError(2, f"cannot read {path}: {exc}") from exc
    values, sigmas = [], []
    with handle:
        reader = csv.reader(handle)
        header = None
        for row in reader:
            if not row or not "".join(row).strip():
                continue
            if row[0].lstrip().startswith("#"):
                continue
            cells = [c.strip() for c in row]
            if header is None:
                header = [c.lower() for c in cells]
                if header not in (["value"], ["value", "sigma"]):
                    raise CliError(
                        3,
                        f"row {reader.line_num}: header must be 'value' or "
                        f"'value,sigma', got {','.join(cells)!r}",
                    )
                continue
            if len(cells) != len(header):
                raise CliError(
                    3,
                    f"row {reader.line_num}: expected {len(header)} column(s), "
                    f"got {len(cells)}",
                )
            try:
                parsed = [float(c) for c in cells]
            except ValueError as exc:
                raise CliError(3, f"row {reader.line_num}: {exc}") from exc
            values.append(parsed[0])
            if len(header) == 2:
                if not parsed[1] > 0.0:
                    raise CliError(
                        3, f"row {reader.line_num}: sigma must be positive"
                    )
                sigmas.append(parsed[1])
    if header is None or not values:
        raise CliError(3, f"{path}: no data rows found")
    return values, (sigmas if sigmas else None)


def _cmd_estimate(args) -> int:
    values, sigmas = _read_data_csv(args.input)
    if args.mle and sigmas is None:
        raise CliError(4, "--mle needs a sigma column in the input file")
    manifest = _manifest(
        "estimate",
        {"input": args.input, "json": args.json, "mle": args.mle},
        None,
    )
    result = {
        "mean": empirical_mean(values),
        "median": empirical_median(values),
        "mle": mle_oracle(values, sigmas) if sigmas is not None else None,
        "n": len(values),
    }
    manifest["finished"] = _utc_now()
    if args.json:
        print(json.dumps({**result, "manifest": manifest}, indent=2))
    else:
        print(f"n:      {result['n']}")
        print(f"mean:   {result['mean']:.10g}")
        print(f"median: {result['median']:.10g}")
        if result["mle"] is not None:
            print(f"mle:    {result['mle']:.10g}")
    return 0


# ------------------------------------------------------------------ bounds


def _parse_profile_arg(text: str) -> tuple[ProfileSpec, int]:
    """Parse 'kind:param[,param...],n=N' into a spec and a length."""
    kind, sep, rest = text.partition(":")
    if not sep or kind not in PROFILE_KINDS or kind == "explicit":
        kinds = sorted(k for k in PROFILE_KINDS if k != "explicit")
        raise CliError(3, f"invalid profile spec {text!r}; kinds: {', '.join(kinds)}")
    n = None
    params = []
    for part in rest.split(","):
        part = part.strip()
        if part.startswith("n="):
            try:
                n = int(part[2:])
            except ValueError as exc:
                raise CliError(3, f"invalid profile length in {text!r}") from exc
        elif part:
            try:
                params.append(float(part))
            except ValueError as exc:
                raise CliError(3, f"invalid profile parameter {part!r}") from exc
    names = PROFILE_KINDS[kind]
    if n is None:
        raise CliError(3, f"profile spec {text!r} is missing n=<length>")
    if len(params) != len(names):
        raise CliError(
            3,
            f"profile kind {kind!r} takes {len(names)} parameter(s) "
            f"({', '.join(names)}), got {len(params)}",
        )
    try:
        return ProfileSpec(kind=kind, **dict(zip(names, params))), n
    except ValueError as exc:
        raise CliError(3, str(exc)) from exc


def _read_profile_file(path) -> ProfileSpec:
    try:
        handle = open(path, encoding="utf-8")
    except OSError as exc:
        raise CliError(2, f"cannot read {path}: {exc}") from exc
    sigmas = []
    with handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                value = float(text)
            except ValueError as exc:
                raise CliError(3, f"line {lineno}: {exc}") from exc
            if not value > 0.0:
                raise CliError(3, f"line {lineno}: scale must be positive")
            sigmas.append(value)
    if not sigmas:
        raise CliError(3, f"{path}: no scales found")
    return ProfileSpec.explicit(sigmas)


def _cmd_bounds(args) -> int:
    if (args.profile is None) == (args.sigmas is None):
        raise CliError(3, "give exactly one of --profile or --sigmas")
    if args.profile is not None:
        spec, n = _parse_profile_arg(args.profile)
    else:
        spec = _read_profile_file(args.sigmas)
        n = len(spec.values)
    try:
        profile = materialize_profile(spec, n)
        c_const = constant_c_for(args.family, args.nu)
        reports = compare_all(profile, args.delta, beta=args.beta, c_const=c_const)
    except ValueError as exc:
        raise CliError(3, str(exc)) from exc
    if args.json:
        print(json.dumps([asdict(r) for r in reports], indent=2))
        return 0
    print(
        f"profile: n={profile.n} sigma_min={profile.sigmas[0]:.6g} "
        f"sigma_max={profile.sigmas[-1]:.6g}  delta={args.delta:g}  "
        f"family={args.family} (C={c_const:.6f})"
    )
    print(f"{'bound':<18} {'value':>14} {'j':>6}  {'applicable':<10} note")
    for r in reports:
        value = f"{r.value:.6g}" if r.value is not None else "-"
        flag = "yes" if r.applicable else "no"
        print(f"{r.bound_name:<18} {value:>14} {r.trim_index:>6}  {flag:<10} "
              f"{r.applicability_note}")
    return 0


# ---------------------------------------------------------------- simulate

_CONFIG_KEYS = {
    "family", "nu", "profile_spec", "n", "theta", "deltas", "trials", "seed",
}
_REQUIRED_KEYS = {"family", "profile_spec", "n", "deltas", "trials", "seed"}


def _parse_config(raw: dict) -> SimulationConfig:
    if not isinstance(raw, dict):
        raise CliError(3, "config must be a JSON object")
    unknown = sorted(set(raw) - _CONFIG_KEYS)
    if unknown:
        raise CliError(3, f"unknown config keys: {', '.join(unknown)}")
    missing = sorted(_REQUIRED_KEYS - set(raw))
    if missing:
        raise CliError(3, f"missing config keys: {', '.join(missing)}")
    spec_raw = raw["profile_spec"]
    if not isinstance(spec_raw, dict) or "kind" not in spec_raw:
        raise CliError(3, "profile_spec must be an object with a 'kind' key")
    kind = spec_raw["kind"]
    if kind not in PROFILE_KINDS:
        raise CliError(3, f"unknown profile kind {kind!r}")
    allowed = set(PROFILE_KINDS[kind]) | {"kind"}
    unknown = sorted(set(spec_raw) - allowed)
    if unknown:
        raise CliError(
            3, f"unknown profile_spec keys for kind {kind!r}: {', '.join(unknown)}"
        )
    try:
        spec = ProfileSpec(**spec_raw)
        return SimulationConfig(
            family=raw["family"],
            profile_spec=spec,
            n=int(raw["n"]),
            deltas=tuple(raw["deltas"]),
            trials=int(raw["trials"]),
            seed=int(raw["seed"]),
            theta=float(raw.get("theta", 0.0)),
            nu=float(raw.get("nu", 3.0)),
        )
    except (TypeError, ValueError) as exc:
        raise CliError(3, f"invalid config: {exc}") from exc


def _config_echo(config: SimulationConfig, threads: int) -> dict:
    spec = config.profile_spec
    spec_echo = {"kind": spec.kind}
    for name in PROFILE_KINDS[spec.kind]:
        spec_echo[name] = getattr(spec, name)
    echo = {
        "family": config.family,
        "profile_spec": spec_echo,
        "n": config.n,
        "theta": config.theta,
        "deltas": list(config.deltas),
        "trials": config.trials,
        "seed": config.seed,
        "nu": config.nu,
        "threads": threads,
    }
    return echo


def _write_csv(path, manifest: dict, header: list, rows: list) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write(
            "# manifest: " + json.dumps(manifest, separators=(",", ":")) + "\n"
        )
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _cmd_simulate(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as handle:
            raw = json.load(handle)
    except OSError as exc:
        raise CliError(2, f"cannot read {args.config}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(3, f"config is not valid JSON: {exc}") from exc
    config = _parse_config(raw)
    threads = args.threads
    manifest = _manifest("simulate", _config_echo(config, threads), config.seed)
    coverage, comparison = run_experiment(config, threads=threads)
    manifest["finished"] = _utc_now()

    os.makedirs(args.out, exist_ok=True)
    coverage_path = os.path.join(args.out, "coverage.csv")
    quantiles_path = os.path.join(args.out, "quantiles.csv")
    manifest_path = os.path.join(args.out, "manifest.json")
    _write_csv(
        coverage_path,
        manifest,
        ["bound_name", "delta", "bound_value", "trials", "exceedances",
         "empirical", "ci_low", "ci_high", "verdict"],
        [
            [c.bound_name, _fmt(c.delta), _fmt(c.bound_value), c.trials,
             _fmt(c.exceedances), _fmt(c.empirical), _fmt(c.ci_low),
             _fmt(c.ci_high), c.verdict]
            for c in coverage.cells
        ],
    )
    _write_csv(
        quantiles_path,
        manifest,
        ["estimator", "q50", "q90", "q99"],
        [[r.estimator, _fmt(r.q50), _fmt(r.q90), _fmt(r.q99)]
         for r in comparison.rows],
    )
    with open(manifest_path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2)
        handle.write("\n")

    violated = [c for c in coverage.cells if c.verdict == "violated"]
    for cell in violated:
        print(
            f"VIOLATED {cell.bound_name} delta={cell.delta:g}: "
            f"empirical={cell.empirical} ci=({cell.ci_low}, {cell.ci_high})"
        )
    print(
        f"coverage: {len(coverage.cells)} cells, {len(violated)} violated; "
        f"wrote {coverage_path}, {quantiles_path}, {manifest_path}"
    )
    return 1 if violated else 0


# ------------------------------------------------------------------ verify


def _int_list(text: str) -> list:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {exc}")


def _float_list(text: str) -> list:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals: {exc}")


def _print_suite(result, show_all: bool) -> int:
    shown = result.cases if show_all else result.failures
    for case in shown:
        status = "ok" if case.holds else "FAIL"
        if case.report_only:
            status += " [report-only]"
        print(f"{result.name}: {case.label}: {status}  {case.detail}")
    if result.summary:
        print(f"{result.name}: {result.summary}")
    if result.passed:
        print(f"{result.name}: all checks passed")
        return 0
    print(f"{result.name}: {len(result.failures)} failure(s)")
    return 1


def _cmd_verify(args) -> int:
    try:
        if args.check == "lemma1":
            result = run_lemma1_suite(
                args.n_list, args.delta_list, args.p_mode, args.cases, args.seed
            )
            if args.p_mode == "random":
                # one line per (n, delta) cell: the worst margin over draws
                worst = {}
                for case in result.cases:
                    cell = case.label.split(" draw=")[0]
                    margin = float(case.detail.split("margin=")[1].split(" ")[0])
                    if cell not in worst or margin < worst[cell][0]:
                        worst[cell] = (margin, case)
                for cell, (margin, case) in worst.items():
                    status = "ok" if case.holds else "FAIL"
                    if case.report_only:
                        status += " [report-only]"
                    print(f"lemma1: {cell}: {status}  worst {case.detail}")
            return _print_suite(result, show_all=args.p_mode == "half")
        if args.check == "lemma2":
            result = run_lemma2_suite(args.cases, args.max_n, args.seed)
        elif args.check == "cor2":
            result = run_cor2_suite(args.grid, args.seed)
        else:
            result = run_dominance_suite(args.cases, args.max_n, args.seed)
    except ValueError as exc:
        raise CliError(3, str(exc)) from exc
    return _print_suite(result, show_all=False)


# -------------------------------------------------------------------- main


def _build_parser() -> _Parser:
    parser = _Parser(prog="hetmed", description=__doc__)
    parser.add_argument("--version", action="version", version=f"hetmed {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_est = sub.add_parser("estimate", help="estimators from a CSV of observations")
    p_est.add_argument("input", help="CSV file with header value[,sigma]")
    p_est.add_argument("--json", action="store_true", help="emit a JSON object")
    p_est.add_argument("--mle", action="store_true",
                       help="require the oracle weighted mean (needs sigma column)")
    p_est.set_defaults(func=_cmd_estimate)

    p_bounds = sub.add_parser("bounds", help="deviation-bound table for a profile")
    p_bounds.add_argument("--profile", help="spec like constant:1,n=1000")
    p_bounds.add_argument("--sigmas", help="file with one positive scale per line")
    p_bounds.add_argument("--delta", type=float, required=True)
    p_bounds.add_argument("--beta", type=float, default=None,
                          help="exponential-tail constant; enables the adaptive-trim bound")
    p_bounds.add_argument("--family", default="gaussian",
                          choices=["gaussian", "laplace", "student_t", "cauchy"])
    p_bounds.add_argument("--nu", type=float, default=3.0,
                          help="student_t degrees of freedom")
    p_bounds.add_argument("--json", action="store_true")
    p_bounds.set_defaults(func=_cmd_bounds)

    p_sim = sub.add_parser("simulate", help="coverage + quantile experiment from JSON config")
    p_sim.add_argument("config", help="JSON config file")
    p_sim.add_argument("--out", default=".", help="output directory")
    p_sim.add_argument("--threads", type=int,
                       default=int(os.environ.get("HETMED_THREADS", "1")),
                       help="worker cap; results are independent of this")
    p_sim.set_defaults(func=_cmd_simulate)

    p_ver = sub.add_parser("verify", help="exact/randomized verification suites")
    ver_sub = p_ver.add_subparsers(dest="check", required=True, parser_class=_Parser)

    v1 = ver_sub.add_parser("lemma1", help="exact Poisson-binomial anticoncentration")
    v1.add_argument("--n-list", type=_int_list, default=[20, 40, 60, 100, 200])
    v1.add_argument("--delta-list", type=_float_list, default=[0.05, 0.1, 0.25])
    v1.add_argument("--p-mode", choices=["half", "random"], default="half")
    v1.add_argument("--cases", type=int, default=50,
                    help="random probability vectors per grid cell")
    v1.add_argument("--seed", type=int, default=0)
    v1.set_defaults(func=_cmd_verify)

    v2 = ver_sub.add_parser("lemma2", help="median counting identity")
    v2.add_argument("--cases", type=int, default=100_000)
    v2.add_argument("--max-n", type=int, default=31)
    v2.add_argument("--seed", type=int, default=7)
    v2.set_defaults(func=_cmd_verify)

    v3 = ver_sub.add_parser("cor2", help="probability-range window sweep")
    v3.add_argument("--grid", type=int, default=1000)
    v3.add_argument("--seed", type=int, default=7)
    v3.set_defaults(func=_cmd_verify)

    v4 = ver_sub.add_parser("dominance", help="trimmed-median vs mean-bound comparison")
    v4.add_argument("--cases", type=int, default=10_000)
    v4.add_argument("--max-n", type=int, default=2000)
    v4.add_argument("--seed", type=int, default=7)
    v4.set_defaults(func=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"hetmed: error: {exc.message}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
