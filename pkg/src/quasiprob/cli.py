"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 bad arguments or expression,
3 the engine rejected the input.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import corpus
from .errors import ExpressionError, QuasiProbError
from .expr import parse
from .grid import GridDomain, make_domain
from .integral import Expectation, cdf, integrate
from .measures import (
    MEASURES, check_additivity, check_monotone_convergence, check_regularity, make_measure,
    saturating_schedule,
)
from .observables import Observable, ScalarField, evaluate, regularized_sequence, staircase, urysohn
from .qspace import brute_force_quasi_probabilities, load_qspace, to_elements, validate_qspace
from .representation import recover_probability
from .serialize import field_to_csv, field_to_pgm, mask_to_pgm, mask_to_rle

DEFAULT_GRID = 513
DEFAULT_TOL = 1e-3
DEFAULT_SEED = 0

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_ENGINE = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    measure: str = "aarnes"
    expr: str | None = None
    grid: int = DEFAULT_GRID
    tol: float = DEFAULT_TOL
    fmt: str = "json"
    dump_mask: str | None = None
    dump_field: str | None = None
    seed: int = DEFAULT_SEED

    def validate(self) -> None:
        if self.grid % 2 == 0 or self.grid < 3:
            raise UsageError(f"--grid must be an odd integer >= 3, got {self.grid}")
        if not self.tol > 0:
            raise UsageError(f"--tol must be positive, got {self.tol}")


class UsageError(Exception):
    pass


def _emit(payload) -> None:
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _dump_field(path: str, field: ScalarField) -> None:
    p = Path(path)
    if p.suffix == ".pgm":
        p.write_bytes(field_to_pgm(field))
    else:
        p.write_text(field_to_csv(field))


def _dump_mask(path: str, mask) -> None:
    p = Path(path)
    if p.suffix == ".pgm":
        p.write_bytes(mask_to_pgm(mask))
    else:
        p.write_text(mask_to_rle(mask))


def _config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        measure=getattr(args, "measure", "aarnes"),
        expr=getattr(args, "expr", None),
        grid=getattr(args, "grid", DEFAULT_GRID),
        tol=getattr(args, "tol", DEFAULT_TOL),
        fmt=getattr(args, "format", "json"),
        dump_mask=getattr(args, "dump_mask", None),
        dump_field=getattr(args, "dump_field", None),
        seed=getattr(args, "seed", DEFAULT_SEED),
    )
    cfg.validate()
    return cfg


def _field(cfg: RunConfig, domain: GridDomain) -> tuple[Observable, ScalarField]:
    if cfg.expr is None:
        raise UsageError("--expr is required")
    obs = parse(cfg.expr)
    return obs, evaluate(obs, domain)


def cmd_integrate(cfg: RunConfig) -> int:
    domain = make_domain(cfg.grid)
    _, field = _field(cfg, domain)
    P = make_measure(cfg.measure, domain)
    res = integrate(P, field, cfg.tol)
    if cfg.dump_field:
        _dump_field(cfg.dump_field, field)
    _emit({"value": res.value, "method": res.method, "evaluations": res.evaluations,
           "grid": cfg.grid, "tol": cfg.tol, "measure": cfg.measure, "expr": cfg.expr})
    return EXIT_OK


def cmd_cdf(cfg: RunConfig, points: int) -> int:
    domain = make_domain(cfg.grid)
    _, field = _field(cfg, domain)
    P = make_measure(cfg.measure, domain)
    F = cdf(P, field, np.linspace(field.min, field.max, points))
    if cfg.fmt == "json":
        _emit({"t": F.ts.tolist(), "F": F.fs.tolist(), "jumps": list(F.jumps), "grid": cfg.grid,
               "measure": cfg.measure, "expr": cfg.expr})
    else:
        sys.stdout.write(F.to_csv())
    return EXIT_OK


def cmd_demo_nonlinearity(cfg: RunConfig) -> int:
    domain = make_domain(cfg.grid)
    E = Expectation(make_measure(cfg.measure, domain), cfg.tol)
    e_x2 = E(parse("x^2"))
    e_y2 = E(parse("y^2"))
    e_sum = E(parse("x^2 + y^2"))
    gap = e_sum - e_x2 - e_y2
    payload = {"measure": cfg.measure, "grid": cfg.grid, "tol": cfg.tol,
               "e_x2": e_x2, "e_y2": e_y2, "e_sum": e_sum, "gap": gap}
    status = EXIT_OK
    if cfg.measure == "aarnes":
        # Cell centers stop 1/n short of the border, so the grid gap is (1 - 1/n)^2.
        ok = gap > 0 and abs(gap - 1.0) <= 2.0 / cfg.grid + cfg.tol
        payload["expected_gap"] = 1.0
        payload["passed"] = ok
        status = EXIT_OK if ok else EXIT_FAILED
    _emit(payload)
    return status


def _check_axioms(cfg: RunConfig, count: int) -> list:
    domain = make_domain(cfg.grid)
    P = make_measure(cfg.measure, domain)
    rng = np.random.default_rng(cfg.seed)
    reports = []
    full, empty = domain.full(), domain.empty()
    norm_ok = P.measure_open(full) == 1.0 and P.measure_open(empty) == 0.0
    reports.append({"check": "normalization", "passed": norm_ok,
                    "p_full": P.measure_open(full), "p_empty": P.measure_open(empty)})
    for kind in ("open", "closed"):
        pairs = corpus.disjoint_pairs(rng, domain, count, kind)
        reports.append(check_additivity(P, pairs).to_dict())
    for f, t in corpus.level_set_corpus(rng, domain, max(1, count // 5)):
        chain = regularized_sequence(f, t, indices=saturating_schedule(f, t)) + [f.superlevel(t)]
        reports.append(check_monotone_convergence(P, chain).to_dict())
    for f, t in corpus.level_set_corpus(rng, domain, max(1, 2 * count // 5)):
        reports.append(check_regularity(P, f, t).to_dict())
    return reports


def _check_staircase(cfg: RunConfig, n: int, delta: float, count: int) -> list:
    domain = make_domain(cfg.grid)
    rng = np.random.default_rng(cfg.seed)
    reports = []
    for idx, (x, y) in enumerate(corpus.staircase_pairs(rng, domain, count, n, delta)):
        dec = staircase(x, y, n, delta)
        r = dec.residuals(x, y)
        ok = r["sum_x"] <= 1e-9 and r["sum_y"] <= 1e-9 and r["domination"] <= 1e-9
        reports.append({"check": "staircase", "index": idx, "n": n, "delta": delta, **r, "passed": ok})
    return reports


def _check_urysohn(cfg: RunConfig, count: int) -> list:
    domain = make_domain(cfg.grid)
    rng = np.random.default_rng(cfg.seed)
    reports = []
    for idx, (y_obs, z_obs) in enumerate(corpus.urysohn_inputs(rng, domain, count)):
        xt = evaluate(urysohn(y_obs, z_obs, domain), domain).values
        yv, zv = evaluate(y_obs, domain).values, evaluate(z_obs, domain).values
        ones = bool(np.all(xt[yv == 0] == 1.0))
        zeros = bool(np.all(xt[zv == 0] == 0.0))
        between = bool(np.all((xt >= 0) & (xt <= 1)))
        reports.append({"check": "urysohn", "index": idx, "one_on_F": ones, "zero_off_U": zeros,
                        "in_unit_interval": between, "passed": ones and zeros and between})
    return reports


def _check_qspace(path: str, enumerate_: bool) -> list:
    space = load_qspace(path)
    report = validate_qspace(space).to_dict()
    if enumerate_:
        probs = brute_force_quasi_probabilities(space)
        report["probabilities"] = [{",".join(map(str, to_elements(s))) or "-": str(v) for s, v in p.items()}
                                   for p in probs]
    return [report]


def cmd_check(cfg: RunConfig, args: argparse.Namespace) -> int:
    which = args.what
    if which == "axioms":
        reports = _check_axioms(cfg, args.count)
    elif which == "recover":
        reports = [cmd_recover_payload(cfg, args.t, args.steps)]
    elif which == "staircase":
        reports = _check_staircase(cfg, args.n, args.delta, args.count)
    elif which == "urysohn":
        reports = _check_urysohn(cfg, args.count)
    else:
        if not args.file:
            raise UsageError("check qspace needs --file")
        reports = _check_qspace(args.file, args.enumerate)
    passed = all(r["passed"] for r in reports)
    _emit({"check": which, "seed": cfg.seed, "grid": cfg.grid, "measure": cfg.measure,
           "passed": passed, "reports": reports})
    return EXIT_OK if passed else EXIT_FAILED


def cmd_recover_payload(cfg: RunConfig, t: float, steps: int) -> dict:
    domain = make_domain(cfg.grid)
    _, field = _field(cfg, domain)
    P = make_measure(cfg.measure, domain)
    res = recover_probability(Expectation(P, cfg.tol), field, t, steps)
    if cfg.dump_mask:
        _dump_mask(cfg.dump_mask, res.mask)
    err = abs(res.recovered - res.reference)
    ok = err == 0.0 if P.zero_one else err <= 2.0 / cfg.grid + cfg.tol
    return {"check": "recover", "measure": cfg.measure, "grid": cfg.grid, "expr": cfg.expr, "t": t,
            **res.to_dict(), "error": err, "passed": ok}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quasiprob", description="Quasi-measures and quasi-integrals on [-1,1]^2.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, expr=True, measure=True):
        if measure:
            p.add_argument("--measure", choices=sorted(MEASURES), default="aarnes")
        if expr:
            p.add_argument("--expr", help='observable, e.g. "2*x^2 + 3*y^2"')
        p.add_argument("--grid", type=int, default=DEFAULT_GRID, help="odd cells per axis")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--seed", type=int, default=DEFAULT_SEED)

    p = sub.add_parser("integrate", help="quasi-integral of an expression")
    common(p)
    p.add_argument("--dump-field", help="write the sampled field (.csv or .pgm)")

    p = sub.add_parser("cdf", help="distribution function of an expression")
    common(p)
    p.add_argument("--points", type=int, default=129)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("demo", help="nonlinearity demo: E[x^2], E[y^2], E[x^2+y^2]")
    common(p, expr=False)

    p = sub.add_parser("recover", help="recover P({expr > t}) from the integral")
    common(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--steps", type=int, default=32)
    p.add_argument("--dump-mask", help="write the level set (.rle or .pgm)")

    p = sub.add_parser("check", help="property checks")
    p.add_argument("what", choices=["axioms", "recover", "staircase", "urysohn", "qspace"])
    common(p)
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--steps", type=int, default=32)
    p.add_argument("--n", type=int, default=8, help="staircase layers")
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--file", help="qspace JSON document")
    p.add_argument("--enumerate", action="store_true", help="also list brute-force probabilities")
    p.add_argument("--dump-mask")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "integrate":
            return cmd_integrate(cfg)
        if args.command == "cdf":
            return cmd_cdf(cfg, args.points)
        if args.command == "demo":
            return cmd_demo_nonlinearity(cfg)
        if args.command == "recover":
            payload = cmd_recover_payload(cfg, args.t, args.steps)
            _emit(payload)
            return EXIT_OK if payload["passed"] else EXIT_FAILED
        return cmd_check(cfg, args)
    except (UsageError, ExpressionError) as exc:
        print(f"quasiprob: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuasiProbError, ValueError, OSError, KeyError) as exc:
        print(f"quasiprob: engine error: {exc}", file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
