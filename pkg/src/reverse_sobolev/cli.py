"""Command-line harness: verify, table, sweep, minimize, descent.

Exit codes: 0 success, 1 a check failed, 2 bad parameters, 3 output not writable.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import functional as fn
from .optimizer import INITS, MinimizeConfig, descent_csv, descent_curve, minimize_quotient
from .serialization import atomic_write, dumps, encode_ext, format_ext
from .special import Regime, SpectralParams, instability_case, sharp_constant
from .verification import run_battery

COMMANDS = ("verify", "sweep", "minimize", "table", "descent")
OUTPUTS = ("human", "json", "csv")
DEFAULT_EPS = (1e-1, 1e-2, 1e-3, 1e-4)

EXIT_OK, EXIT_CHECK, EXIT_PARAM, EXIT_IO = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    command: str
    n: tuple[int, ...]
    s: tuple[float, ...]
    L_max: int = 64
    quad_order: int | None = None
    tol: float = 1e-8
    output: str = "human"
    out_path: str | None = None
    seed: int = 42
    K: int | None = None
    eps: tuple[float, ...] = DEFAULT_EPS
    max_iters: int = 400
    init: str = "perturbed-constant"
    zeta: float = 0.0
    workers: int = 1
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def order(self) -> int:
        return self.L_max + 16 if self.quad_order is None else self.quad_order

    def to_dict(self) -> dict:
        d = asdict(self)
        del d["extra"]
        d["n"], d["s"], d["eps"] = list(self.n), list(self.s), list(self.eps)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        d["n"] = tuple(int(x) for x in d["n"])
        d["s"] = tuple(float(x) for x in d["s"])
        d["eps"] = tuple(float(x) for x in d.get("eps", DEFAULT_EPS))
        return cls(**d)

    def grid(self) -> list[tuple[int, float]]:
        return sorted((n, s) for n in set(self.n) for s in set(self.s))


def parse_values(items, cast, default_step=1.0) -> tuple:
    """Expand repeated values and inclusive ranges "a:b" or "a:b:step"."""
    out = []
    for item in items or ():
        for part in str(item).split(","):
            part = part.strip()
            if not part:
                continue
            if ":" not in part:
                out.append(cast(part))
                continue
            bits = part.split(":")
            if len(bits) not in (2, 3):
                raise CliError(EXIT_PARAM, f"bad range {part!r}")
            a, b = float(bits[0]), float(bits[1])
            step = float(bits[2]) if len(bits) == 3 else default_step
            if step <= 0:
                raise CliError(EXIT_PARAM, f"range step must be positive in {part!r}")
            count = math.floor((b - a) / step + 1e-9) + 1
            out.extend(cast(round(a + k * step, 12)) for k in range(max(count, 0)))
    return tuple(out)


def _int(x) -> int:
    v = float(x)
    if v != int(v):
        raise CliError(EXIT_PARAM, f"dimension must be an integer, got {x}")
    return int(v)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", action="append", required=True,
                        help="dimension; repeatable, comma lists and ranges a:b[:step] allowed")
    common.add_argument("--s", action="append", required=True,
                        help="order; repeatable, comma lists and ranges a:b:step allowed")
    common.add_argument("--lmax", type=int, default=64, help="spectral truncation degree")
    common.add_argument("--quad-order", type=int, default=None, help="Gauss nodes (default lmax+16)")
    common.add_argument("--tol", type=float, default=1e-8, help="tolerance for identity checks")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="output", action="store_const", const="json")
    fmt.add_argument("--csv", dest="output", action="store_const", const="csv")
    common.add_argument("--out", default=None, help="write output to this file")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--workers", type=int, default=1, help="processes for sweep")

    parser = argparse.ArgumentParser(prog="reverse-sobolev", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run the property battery")
    sub.add_parser("table", parents=[common], help="sharp constants, regimes, second variation")
    for name in ("sweep", "minimize"):
        sp = sub.add_parser(name, parents=[common], help="minimize the quotient" if name == "minimize"
                            else "minimize over a parameter grid")
        sp.add_argument("--max-iters", type=int, default=400)
        sp.add_argument("--init", choices=[i for i in INITS if i != "custom"], default="perturbed-constant")
        sp.add_argument("--zeta", type=float, default=0.0, help="parameter of the equality-profile init")
    dp = sub.add_parser("descent", parents=[common], help="quotient of u + eps for the instability test function")
    dp.add_argument("--K", type=int, default=None, help="test-function index (default: the one matching (n,s))")
    dp.add_argument("--eps", action="append", default=None, help="eps values, strictly decreasing")
    return parser


def config_from_args(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    eps = DEFAULT_EPS
    if getattr(args, "eps", None):
        eps = tuple(float(x) for item in args.eps for x in str(item).split(",") if x.strip())
    return RunConfig(
        command=args.command,
        n=parse_values(args.n, _int),
        s=parse_values(args.s, float, default_step=0.5),
        L_max=args.lmax,
        quad_order=args.quad_order,
        tol=args.tol,
        output=args.output or "human",
        out_path=args.out,
        seed=args.seed,
        K=getattr(args, "K", None),
        eps=eps,
        max_iters=getattr(args, "max_iters", 400),
        init=getattr(args, "init", "perturbed-constant"),
        zeta=getattr(args, "zeta", 0.0),
        workers=args.workers,
    )


def check_writable(path: str | None) -> None:
    if path is None:
        return
    directory = os.path.dirname(os.path.abspath(path))
    if os.path.isdir(path) or not os.path.isdir(directory) or not os.access(directory, os.W_OK):
        raise CliError(EXIT_IO, f"cannot write output file {path}")


def validate(cfg: RunConfig) -> list[SpectralParams]:
    """Checks numerical settings and returns the (n, s) points to run."""
    if cfg.L_max < 1 or cfg.order < cfg.L_max + 1 or not cfg.tol > 0 or cfg.workers < 1:
        raise CliError(EXIT_PARAM, "parameter out of range: need lmax >= 1, quad-order > lmax, tol > 0")
    if cfg.command in ("table", "sweep"):
        points = [SpectralParams(n, s) for n, s in cfg.grid() if n >= 1 and s > n / 2]
        if not points:
            raise CliError(EXIT_PARAM, "empty parameter grid")
        return points
    grid = cfg.grid()
    if not grid:
        raise CliError(EXIT_PARAM, "empty parameter grid")
    for n, s in grid:
        if n < 1 or not s > n / 2:
            raise CliError(EXIT_PARAM, f"parameter out of range: need n >= 1 and s > n/2, got n={n}, s={s}")
    if cfg.command in ("minimize", "descent") and len(grid) != 1:
        raise CliError(EXIT_PARAM, f"{cfg.command} takes a single (n, s) point")
    return [SpectralParams(n, s) for n, s in grid]


def _sign(x: float) -> str:
    return "+" if x > 0 else "-" if x < 0 else "0"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows([[format_ext(c) if isinstance(c, float) else c for c in r] for r in rows])
    return buf.getvalue()


def _num(x) -> str:
    # human output: shortest round-tripping repr, same infinity vocabulary as JSON
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else format_ext(x)
    return str(x)


def _human_table(header, rows) -> str:
    cells = [list(map(str, header))] + [[_num(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells) + "\n"


def cmd_verify(cfg: RunConfig, points) -> tuple[int, str]:
    results = []
    failures = []
    for p in points:
        checks = run_battery(p, cfg.L_max, cfg.order, cfg.tol, cfg.seed)
        results.append((p, checks))
        failures += [(p, c) for c in checks if not c.passed]
    if cfg.output == "json":
        text = dumps({
            "config": cfg.to_dict(),
            "points": [{"n": p.n, "s": p.s, "regime": p.regime.value,
                        "checks": [c.to_dict() for c in checks],
                        "passed": all(c.passed for c in checks)} for p, checks in results],
            "passed": not failures,
        })
    elif cfg.output == "csv":
        text = _csv(["n", "s", "check", "passed", "detail"],
                    [[p.n, p.s, c.name, c.passed, c.detail] for p, checks in results for c in checks])
    else:
        lines = []
        for p, checks in results:
            lines.append(f"n={p.n} s={p.s} regime={p.regime.value}")
            lines += [f"  [{'PASS' if c.passed else 'FAIL'}] {c.name}: {c.detail}" for c in checks]
        lines.append("all checks passed" if not failures else f"{len(failures)} check(s) failed")
        text = "\n".join(lines) + "\n"
    for p, c in failures:
        print(f"check failed at n={p.n} s={p.s}: {c.name} ({c.detail})", file=sys.stderr)
    return (EXIT_CHECK if failures else EXIT_OK), text


def table_row(p: SpectralParams) -> dict:
    S = sharp_constant(p)
    h2, h3 = fn.second_variation(p, 2), fn.second_variation(p, 3)
    return {"n": p.n, "s": p.s, "regime": p.regime.value, "sharp_constant": S,
            "H2": h2, "H3": h3, "signs": f"S:{_sign(S)} H2:{_sign(h2)} H3:{_sign(h3)}"}


def cmd_table(cfg: RunConfig, points) -> tuple[int, str]:
    rows = [table_row(p) for p in points]
    header = ["n", "s", "regime", "sharp_constant", "H2", "H3", "signs"]
    if cfg.output == "json":
        text = dumps({"config": cfg.to_dict(), "rows": [
            {**r, "sharp_constant": encode_ext(r["sharp_constant"]), "H2": encode_ext(r["H2"]),
             "H3": encode_ext(r["H3"])} for r in rows]})
    elif cfg.output == "csv":
        text = _csv(header, [[r[h] for h in header] for r in rows])
    else:
        text = _human_table(header, [[r[h] for h in header] for r in rows])
    return EXIT_OK, text


def _minimize_config(cfg: RunConfig) -> MinimizeConfig:
    return MinimizeConfig(L_max=cfg.L_max, grid_order=max(cfg.order, cfg.L_max + 8), max_iters=cfg.max_iters,
                          seed=cfg.seed, init=cfg.init, zeta=cfg.zeta)


def _sweep_point(args) -> dict:
    p, mcfg = args
    S = sharp_constant(p)
    row = {"n": p.n, "s": p.s, "regime": p.regime.value, "sharp_constant": S}
    if p.regime is Regime.INTEGER_FAMILY:
        return {**row, "status": "skipped", "best_quotient": None, "converged": False, "iterations": 0}
    trace = minimize_quotient(p, mcfg)
    return {**row, "status": "ok", "best_quotient": trace.best.quotient, "converged": trace.converged,
            "iterations": len(trace.iterates) - 1}


def cmd_sweep(cfg: RunConfig, points) -> tuple[int, str]:
    mcfg = _minimize_config(cfg)
    jobs = [(p, mcfg) for p in points]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_sweep_point, jobs))
    else:
        rows = [_sweep_point(j) for j in jobs]
    header = ["n", "s", "regime", "sharp_constant", "status", "best_quotient", "converged", "iterations"]
    if cfg.output == "json":
        text = dumps({"config": cfg.to_dict(), "rows": [
            {**r, "sharp_constant": encode_ext(r["sharp_constant"]),
             "best_quotient": None if r["best_quotient"] is None else encode_ext(r["best_quotient"])}
            for r in rows]})
    else:
        table = [["" if r[h] is None else r[h] for h in header] for r in rows]
        text = _csv(header, table) if cfg.output == "csv" else _human_table(header, table)
    return EXIT_OK, text


def cmd_minimize(cfg: RunConfig, points) -> tuple[int, str]:
    p = points[0]
    trace = minimize_quotient(p, _minimize_config(cfg))
    S = sharp_constant(p)
    if cfg.output == "json":
        text = dumps({"config": cfg.to_dict(), "regime": p.regime.value, "sharp_constant": encode_ext(S),
                      "trace": trace.to_dict()})
    elif cfg.output == "csv":
        text = trace.to_csv()
    else:
        best = trace.best
        text = (f"n={p.n} s={p.s} regime={p.regime.value}\n"
                f"sharp constant   {format_ext(S)}\n"
                f"start quotient   {format_ext(trace.iterates[0].quotient)}\n"
                f"best quotient    {format_ext(best.quotient)}\n"
                f"a_2s             {format_ext(best.a_value)}\n"
                f"integral         {format_ext(best.integral)}\n"
                f"sweeps           {len(trace.iterates) - 1}\n"
                f"converged        {trace.converged}\n")
    return EXIT_OK, text


def cmd_descent(cfg: RunConfig, points) -> tuple[int, str]:
    p = points[0]
    if p.regime is not Regime.NOT_ATTAINED:
        raise CliError(EXIT_PARAM, f"descent needs the not-attained regime, got {p.regime.value}")
    parity, K_expected = instability_case(p)
    K = K_expected if cfg.K is None else cfg.K
    rows = descent_curve(p, K, cfg.eps)
    qs = [q for _, q in rows]
    decreasing = all(b < a for a, b in zip(qs, qs[1:]))
    if cfg.output == "json":
        text = dumps({"config": cfg.to_dict(), "parity": parity, "K": K,
                      "curve": [{"eps": e, "quotient": encode_ext(q)} for e, q in rows],
                      "strictly_decreasing": decreasing})
    elif cfg.output == "csv":
        text = descent_csv(rows)
    else:
        text = _human_table(["eps", "quotient"], [[e, q] for e, q in rows])
        text += f"test function: {parity}, K={K}; strictly decreasing: {decreasing}\n"
    # n = 1 is exploratory: the curve asserts nothing there
    if p.n >= 2 and not decreasing:
        print("check failed: descent curve is not strictly decreasing", file=sys.stderr)
        return EXIT_CHECK, text
    return EXIT_OK, text


HANDLERS = {"verify": cmd_verify, "table": cmd_table, "sweep": cmd_sweep,
            "minimize": cmd_minimize, "descent": cmd_descent}


def run(cfg: RunConfig) -> int:
    try:
        check_writable(cfg.out_path)
        points = validate(cfg)
        try:
            code, text = HANDLERS[cfg.command](cfg, points)
        except ValueError as exc:
            raise CliError(EXIT_PARAM, str(exc)) from exc
        except ArithmeticError as exc:
            raise CliError(EXIT_CHECK, f"numerical failure: {exc}") from exc
        if cfg.out_path is None:
            sys.stdout.write(text)
        else:
            try:
                atomic_write(cfg.out_path, text)
            except OSError as exc:
                raise CliError(EXIT_IO, f"cannot write output file {cfg.out_path}: {exc}") from exc
        return code
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


def main(argv=None) -> int:
    try:
        cfg = config_from_args(argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
