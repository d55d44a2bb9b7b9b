"""Command-line front end.

Exit codes: 0 success, 1 a verification failed, 2 invalid configuration,
3 enumeration guard exceeded.  Output is JSON lines unless --format csv.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from fractions import Fraction

from sympy import isprime, primerange

from .exceptions import PadicError, TooLarge
from .expectation import expected_flats, format_rational
from .jacobian import DegreeProfile, build_template
from .padic import rational_valuation
from .verify import SUITES, bounds_row, run_suite
from .volkenborn import convergence_valuations, cubic_det_integrand, volkenborn_partial

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    p: int | None = None
    precision: int | None = None
    n: int | None = None
    k: int | None = None
    degrees: tuple = ()
    method: str = "exact"
    samples: int = 200_000
    seed: int = 0
    guard: int | None = None
    workers: int | None = None
    fmt: str = "json"
    output: str | None = None
    suite: str = "all"
    primes: tuple = ()
    levels: tuple = (1, 2)

    def profile(self) -> DegreeProfile:
        if self.n is None or self.k is None or not self.degrees:
            raise ConfigError("--n, --k and --degrees are required")
        try:
            return DegreeProfile(self.n, self.k, self.degrees)
        except ValueError as e:
            raise ConfigError(str(e)) from e


def _parse_list(text: str, primes_only: bool) -> tuple:
    try:
        out = []
        for part in text.split(","):
            part = part.strip()
            if "-" in part[1:]:
                lo, hi = (int(x) for x in part.split("-", 1))
                out.extend(primerange(lo, hi + 1) if primes_only else range(lo, hi + 1))
            elif part:
                out.append(int(part))
        return tuple(int(x) for x in out)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _int_list(text: str) -> tuple:
    return _parse_list(text, False)


def _prime_list(text: str) -> tuple:
    """Explicit entries are kept as given; a range a-b means the primes in it."""
    return _parse_list(text, True)


def _check_prime(p):
    if p is None:
        raise ConfigError("--p is required")
    if not isprime(p):
        raise ConfigError(f"{p} is not prime")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padicflats", description="Expected numbers of p-adic flats.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--guard", type=int, default=None, help="enumeration size limit (env PADICFLATS_GUARD)")
        sp.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
        sp.add_argument("--output", default=None, help="write here instead of stdout")
        sp.add_argument("--workers", type=int, default=None, help="worker threads (default: logical cores)")

    def profile_args(sp):
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--degrees", type=_int_list, required=True, help="e.g. 3 or 2,2")

    ef = sub.add_parser("expected-flats", help="expected number of k-flats for a degree profile")
    ef.add_argument("--p", type=int, required=True)
    profile_args(ef)
    ef.add_argument("--method", choices=("exact", "mc"), default="exact")
    ef.add_argument("--precision", type=int, default=None)
    ef.add_argument("--samples", type=int, default=200_000)
    ef.add_argument("--seed", type=int, default=0)
    common(ef)

    vf = sub.add_parser("verify", help="brute-force identity suites")
    vf.add_argument("--suite", choices=SUITES + ("all",), default="all")
    vf.add_argument("--p", type=int, default=None, help="single prime (default 2, 3 and 5)")
    common(vf)

    sc = sub.add_parser("scan", help="closed forms and bounds across primes")
    sc.add_argument("--primes", type=_prime_list, default=tuple(primerange(2, 102)), help="e.g. 2,3,5 or 2-101")
    common(sc)
    sc.set_defaults(fmt="csv")

    vk = sub.add_parser("volkenborn", help="Riemann sums of the cubic determinant polynomial")
    vk.add_argument("--p", type=int, required=True)
    vk.add_argument("--levels", type=_int_list, default=(1, 2))
    common(vk)

    td = sub.add_parser("template-dump", help="symbolic Jacobian template as JSON")
    profile_args(td)
    common(td)
    return parser


def config_from_args(ns) -> RunConfig:
    fields = {f: getattr(ns, f) for f in RunConfig.__dataclass_fields__ if hasattr(ns, f)}
    return RunConfig(**fields)


def _json_lines(records) -> str:
    return "".join(json.dumps(r) + "\n" for r in records)


def _csv(records) -> str:
    buf = io.StringIO()
    flat = [{k: json.dumps(v) if isinstance(v, (dict, list)) else v for k, v in r.items()} for r in records]
    writer = csv.DictWriter(buf, fieldnames=list(flat[0]) if flat else [], lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)
    return buf.getvalue()


def cmd_expected_flats(cfg: RunConfig):
    _check_prime(cfg.p)
    profile = cfg.profile()
    build_template(profile)
    if cfg.method == "mc" and cfg.samples < 100:
        raise ConfigError("--samples must be at least 100")
    if cfg.precision is not None and cfg.precision < 1:
        raise ConfigError("--precision must be positive")
    result = expected_flats(
        profile,
        cfg.method,
        p=cfg.p,
        precision=cfg.precision,
        samples=cfg.samples,
        seed=cfg.seed,
        guard=cfg.guard,
        workers=cfg.workers,
    )
    return [result.to_record()], EXIT_OK


def cmd_verify(cfg: RunConfig):
    primes = (2, 3, 5) if cfg.p is None else (cfg.p,)
    for p in primes:
        _check_prime(p)
    records = list(run_suite(cfg.suite, primes, cfg.guard))
    ok = all(r["pass"] for r in records)
    return records, EXIT_OK if ok else EXIT_FAILED


def cmd_scan(cfg: RunConfig):
    if not cfg.primes:
        raise ConfigError("--primes is empty")
    for p in cfg.primes:
        _check_prime(p)
    rows = []
    for p in cfg.primes:
        row = bounds_row(p)
        out = {"p": p}
        for key in ("cubic", "quadrics", "cubic_lower", "limsup_bound"):
            out[key] = format_rational(row[key])
            out[key + "_decimal"] = f"{float(row[key]):.12g}"
        rows.append(out)
    return rows, EXIT_OK


def cmd_volkenborn(cfg: RunConfig):
    _check_prime(cfg.p)
    if not cfg.levels or min(cfg.levels) < 1:
        raise ConfigError("--levels must be positive integers")
    f = cubic_det_integrand()
    target = Fraction(-1, 9)
    partials = [volkenborn_partial(f, cfg.p, n, cfg.guard) for n in cfg.levels]
    vals = convergence_valuations(partials, target, cfg.p)
    slack = rational_valuation(Fraction(36), cfg.p)
    ok = all(v is None or v >= part.level - slack for v, part in zip(vals, partials))
    record = {
        "integrand": str(f),
        "p": cfg.p,
        "levels": list(cfg.levels),
        "partials": [format_rational(part.normalized_sum) for part in partials],
        "valuations": vals,
        "slack": slack,
        "target": format_rational(target),
        "pass": ok,
    }
    return [record], EXIT_OK if ok else EXIT_FAILED


def cmd_template_dump(cfg: RunConfig):
    t = build_template(cfg.profile())
    return [json.loads(t.to_json())], EXIT_OK


COMMANDS = {
    "expected-flats": cmd_expected_flats,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "volkenborn": cmd_volkenborn,
    "template-dump": cmd_template_dump,
}


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    try:
        records, code = COMMANDS[cfg.command](cfg)
    except TooLarge as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GUARD
    except (ConfigError, PadicError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    text = _csv(records) if cfg.fmt == "csv" else _json_lines(records)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
