"""Command-line front end.

Subcommands: mub-verify, bounds, sweep, simulate, multiparty, oracle.

Exit codes: 0 success, 1 usage or parameter errors, 2 verification
failure, 3 capability cap exceeded, 4 I/O errors.

Options may be preloaded from a flat config file (`key = value` lines,
`#` comments) via --config; explicit flags override config entries,
which in turn override the MUBQCT_SEED environment fallback.  Every
subcommand echoes its fully resolved configuration as a `# config: ...`
comment line: the first line of CSV outputs, stderr for JSON-emitting
commands.  All output is seed-deterministic: identical config and seed
give byte-identical files.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

from . import __version__
from .detection import (
    DETECTOR_PRESETS,
    ChannelModel,
    DetectorModel,
    detection_stats,
    mc_detection_stats,
    transmittance,
)
from .errors import CapabilityError
from .mub import Dimension, build_mub_family, export_family, verify_unbiasedness
from .protocol import ProtocolParams, multiparty_run, run_protocol
from .ratemodel import sweep, sweep_rows_to_csv
from .security import bounds_report, helstrom_numeric, lambda_numeric, lambda_paper_bound

FORMAT_VERSION = 1
DEFAULT_SEED = 12345
SEED_ENV_VAR = "MUBQCT_SEED"


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _load_config(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if not sep or not key or not value:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
            entries[key] = value
    return entries


def _config_argv(entries: dict[str, str]) -> list[str]:
    """Render config entries as flags, inserted ahead of explicit ones."""
    flags: list[str] = []
    for key in sorted(entries):
        value = entries[key]
        flag = "--" + key.replace("_", "-")
        if value.lower() in ("true", "false"):
            if value.lower() == "true":
                flags.append(flag)
        else:
            flags.extend([flag, value])
    return flags


def _extract_config_path(argv: list[str]) -> str | None:
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if tok.startswith("--config="):
            return tok.split("=", 1)[1]
    return None


def _resolve_argv(argv: list[str]) -> list[str]:
    path = _extract_config_path(argv)
    if path is None or not argv or argv[0].startswith("-"):
        return argv
    entries = _load_config(path)
    return [argv[0], *_config_argv(entries), *argv[1:]]


def _resolve_seed(seed: int | None) -> int:
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"{SEED_ENV_VAR} must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _config_items(args: argparse.Namespace) -> dict[str, str]:
    skip = {"func", "cmd", "config"}
    items: dict[str, str] = {}
    for key, value in vars(args).items():
        if key in skip or value is None:
            continue
        if isinstance(value, bool):
            value = "true" if value else "false"
        items[key] = str(value)
    return dict(sorted(items.items()))


def _config_line(args: argparse.Namespace) -> str:
    items = _config_items(args)
    body = " ".join(f"{k}={v}" for k, v in items.items())
    return f"# config: cmd={args.cmd} {body}".rstrip()


def _emit_json(obj, args, out_path: str | None = None) -> None:
    print(_config_line(args), file=sys.stderr)
    text = json.dumps(obj, indent=2) + "\n"
    sys.stdout.write(text)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _nan_to_none(x: float) -> float | None:
    return None if (x != x) else x


def _zscore(empirical: float, p: float, n: int) -> float | None:
    if n <= 0 or not 0.0 < p < 1.0:
        return None
    if empirical != empirical:
        return None
    return (empirical - p) / math.sqrt(p * (1.0 - p) / n)


def _detector_from_args(args) -> "DetectorModel":
    detector = DETECTOR_PRESETS[args.profile]
    overrides = {}
    if getattr(args, "eta", None) is not None:
        overrides["eta"] = args.eta
    if getattr(args, "visibility", None) is not None:
        overrides["visibility"] = args.visibility
    if getattr(args, "p_dark", None) is not None:
        overrides["p_dark"] = args.p_dark
    return dataclasses.replace(detector, **overrides) if overrides else detector


def _parse_int_list(spec: str) -> list[int]:
    toks = [tok.strip() for tok in spec.split(",") if tok.strip()]
    if not toks:
        raise ValueError(f"expected a comma-separated integer list, got {spec!r}")
    return [int(tok) for tok in toks]


def _parse_grid(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValueError(f"expected start:stop:step, got {spec!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError(f"grid step must be > 0, got {step}")
    if stop < start:
        raise ValueError(f"grid stop must be >= start, got {spec!r}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def cmd_mub_verify(args) -> int:
    if args.tol <= 0:
        raise ValueError(f"--tol must be > 0, got {args.tol}")
    family = build_mub_family(args.k)
    report = verify_unbiasedness(family, tol=args.tol)
    if args.export:
        export_family(family, args.export)
    _emit_json({"format_version": FORMAT_VERSION, **report.to_dict()}, args)
    return 0 if report.passed else 2


def cmd_bounds(args) -> int:
    report = bounds_report(args.d, args.m, oracle=args.oracle)
    _emit_json({"format_version": FORMAT_VERSION, **report.to_dict()}, args)
    return 0


def cmd_sweep(args) -> int:
    ds = _parse_int_list(args.d)
    lengths = _parse_grid(args.length_grid)
    profiles = [tok.strip() for tok in args.profile.split(",") if tok.strip()]
    rows = sweep(
        ds,
        lengths,
        profiles,
        alpha_db_per_km=args.alpha,
        bounds_source=args.bounds_source,
        jobs=args.jobs,
    )
    text = _config_line(args) + "\n" + sweep_rows_to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(_config_line(args), file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def _summary_core(transcript, detector, t, m_eff) -> dict:
    stats = detection_stats(t, detector, m_eff, mode="normalized")
    click_analytic = stats.p_click
    n_clicks = transcript.n_clicks
    return {
        "n_rounds": transcript.n_rounds,
        "n_clicks": n_clicks,
        "click_rate": transcript.click_rate,
        "click_rate_analytic": click_analytic,
        "z_click_rate": _zscore(transcript.click_rate, click_analytic, transcript.n_rounds),
        "p_c_empirical": _nan_to_none(transcript.p_c_empirical),
        "p_e_empirical": _nan_to_none(transcript.p_e_empirical),
        "p_c_analytic": stats.p_c,
        "p_e_analytic": stats.p_e,
        "z_p_c": _zscore(transcript.p_c_empirical, stats.p_c, n_clicks),
        "z_p_e": _zscore(transcript.p_e_empirical, stats.p_e, n_clicks),
    }


def _protocol_params(args) -> ProtocolParams:
    detector = _detector_from_args(args)
    channel = ChannelModel(alpha_db_per_km=args.alpha, length_km=args.length_km)
    return ProtocolParams(
        d=args.d,
        m=args.m,
        n_rounds=args.rounds,
        seed=args.seed,
        channel=channel,
        detector=detector,
        photon_statistics=args.photon_statistics,
        mu=args.mu,
        allow_insecure_mu=args.allow_insecure_mu,
    )


def cmd_simulate(args) -> int:
    params = _protocol_params(args)
    transcript = run_protocol(params)
    if args.out_transcript:
        with open(args.out_transcript, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(_config_line(args) + "\n")
            fh.write("round,x,r,theta,outcome\n")
            for i in range(transcript.n_rounds):
                fh.write(
                    f"{i},{transcript.x[i]},{transcript.r[i]},"
                    f"{transcript.theta[i]},{transcript.outcome[i]}\n"
                )
    m_eff = args.mu if args.photon_statistics == "poisson" else args.m
    summary = {
        "format_version": FORMAT_VERSION,
        "config": _config_items(args),
        **_summary_core(transcript, params.detector, params.channel.transmittance, m_eff),
    }
    _emit_json(summary, args, out_path=args.out_summary)
    return 0


def cmd_multiparty(args) -> int:
    params = _protocol_params(args)
    result = multiparty_run(params, args.parties)
    t = params.channel.transmittance
    parties = []
    for p, transcript in enumerate(result.transcripts):
        if args.out_transcript:
            transcript.to_csv(f"{args.out_transcript}.party{p}.csv")
        core = _summary_core(transcript, params.detector, t, result.copies_per_party)
        parties.append({"party": p, **core})
    out = {
        "format_version": FORMAT_VERSION,
        "config": _config_items(args),
        "n_parties": result.n_parties,
        "copies_per_party": result.copies_per_party,
        "parties": parties,
    }
    _emit_json(out, args, out_path=args.out_summary)
    return 0


def cmd_oracle(args) -> int:
    dim = Dimension.from_d(args.d)
    family = build_mub_family(dim.k)
    lam = lambda_numeric(family)
    hel = helstrom_numeric(family, args.m)
    detector = _detector_from_args(args)
    t = transmittance(args.length_km, args.alpha)
    stats = detection_stats(t, detector, args.m, mode="normalized")
    mc = mc_detection_stats(t, detector, args.m, args.samples, args.seed)
    out = {
        "format_version": FORMAT_VERSION,
        "config": _config_items(args),
        "lambda_numeric": lam,
        "lambda_paper": lambda_paper_bound(args.d),
        "helstrom_numeric": hel,
        "detection_analytic": {"t": t, "p_c": stats.p_c, "p_e": stats.p_e},
        "detection_mc": {
            "p_c": mc.p_c,
            "p_e": mc.p_e,
            "n_right": mc.n_right,
            "n_wrong": mc.n_wrong,
            "n_samples": mc.n_samples,
        },
    }
    _emit_json(out, args)
    return 0


def _add_common(parser: _Parser) -> None:
    parser.add_argument("--config", help="flat key = value config file; flags override it")
    parser.add_argument(
        "--format-version",
        type=int,
        default=FORMAT_VERSION,
        help=f"output schema version (this build: {FORMAT_VERSION})",
    )


def _add_detector_options(parser: _Parser) -> None:
    parser.add_argument(
        "--profile",
        default="snspd_lab",
        help=f"detector preset, one of {sorted(DETECTOR_PRESETS)}",
    )
    parser.add_argument("--eta", type=float, help="override detector efficiency")
    parser.add_argument("--visibility", type=float, help="override interference visibility")
    parser.add_argument("--p-dark", type=float, dest="p_dark", help="override dark-count probability")
    parser.add_argument("--alpha", type=float, default=0.2, help="fiber loss in dB/km")


def _add_simulation_options(parser: _Parser) -> None:
    parser.add_argument("--d", type=int, required=True, help="Hilbert space dimension (power of 2)")
    parser.add_argument("--m", type=int, default=1, help="signal copies per round")
    parser.add_argument("--L", type=float, default=0.0, dest="length_km", help="fiber length in km")
    parser.add_argument("--rounds", type=int, default=10000, help="protocol rounds to simulate")
    parser.add_argument("--seed", type=int, default=None, help=f"RNG seed (fallback: ${SEED_ENV_VAR})")
    parser.add_argument(
        "--photon-statistics",
        choices=("fixed", "poisson"),
        default="fixed",
        help="copy-count statistics of the source",
    )
    parser.add_argument("--mu", type=float, help="mean photon number for poisson statistics")
    parser.add_argument(
        "--allow-insecure-mu",
        action="store_true",
        help="bypass the mu + 4 sqrt(mu) <= sqrt(d) budget check",
    )
    _add_detector_options(parser)
    parser.add_argument("--out-transcript", help="write per-round CSV here")
    parser.add_argument("--out-summary", help="also write the summary JSON here")


def build_parser() -> _Parser:
    parser = _Parser(prog="mubqct", description=__doc__, add_help=True)
    parser.add_argument("--version", action="version", version=f"mubqct {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("mub-verify", help="build a basis family and verify unbiasedness")
    p.add_argument("--k", type=int, required=True, help="dimension exponent, d = 2^k")
    p.add_argument("--tol", type=float, default=1e-9, help="max allowed deviation")
    p.add_argument("--export", help="also write the family as a text matrix file")
    _add_common(p)
    p.set_defaults(func=cmd_mub_verify)

    p = sub.add_parser("bounds", help="adversary bounds for one (d, m) point")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--oracle", action="store_true", help="use the exhaustive lambda (d <= 16)")
    _add_common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("sweep", help="optimized key-rate table over (profile, d, L)")
    p.add_argument("--d", required=True, help="comma-separated dimensions")
    p.add_argument("--L", required=True, dest="length_grid", help="distance grid start:stop:step in km")
    p.add_argument("--profile", default="snspd_lab", help="comma-separated detector presets")
    p.add_argument("--alpha", type=float, default=0.2, help="fiber loss in dB/km")
    p.add_argument("--bounds-source", choices=("paper", "certified"), default="paper")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.add_argument("--out", help="write CSV here instead of stdout")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", help="Monte Carlo protocol run with transcript")
    _add_simulation_options(p)
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("multiparty", help="one encoding stream, several receivers")
    p.add_argument("--parties", type=int, required=True, help="number of receivers")
    _add_simulation_options(p)
    _add_common(p)
    p.set_defaults(func=cmd_multiparty)

    p = sub.add_parser("oracle", help="independent reference values for the test suite")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--L", type=float, default=50.0, dest="length_km")
    p.add_argument("--samples", type=int, default=200000)
    p.add_argument("--seed", type=int, default=None)
    _add_detector_options(p)
    _add_common(p)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv=None) -> int:
    raw = list(sys.argv[1:]) if argv is None else list(argv)
    try:
        resolved = _resolve_argv(raw)
        parser = build_parser()
        args = parser.parse_args(resolved)
        if args.format_version != FORMAT_VERSION:
            raise ValueError(
                f"unsupported --format-version {args.format_version}; "
                f"this build emits version {FORMAT_VERSION}"
            )
        if hasattr(args, "seed"):
            args.seed = _resolve_seed(args.seed)
        return args.func(args)
    except SystemExit as exc:
        code = exc.code
        if code is None:
            return 0
        return code if isinstance(code, int) else 1
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
