"""Command-line harness: ``pbca-lab {simulate,exact,verify,fd,gkz}``.

Exit codes: 0 success, 2 parameter error, 3 tolerance or verification
failure, 4 ergodicity error.
"""
from __future__ import annotations

import argparse
import json
import os
import random
import sys
import tempfile
from fractions import Fraction

import numpy as np

from .conjecture import verify_conjecture
from .errors import ErgodicityError, ParameterError, PBCAError
from .flux import fd_closed_form, fd_csv, fd_limit, fd_monte_carlo, flux_limit_pbca, flux_pbca
from .gkz import gkz_check_identities, gkz_limit
from .markov import build_matrix, lump_by_rotation, stationary
from .ring import SPECIES, RingConfig, enumerate_binary, enumerate_species_reachable
from .rules import ModelParams
from .simulate import make_rng, random_ring, random_species_ring, run

EXIT_OK, EXIT_PARAM, EXIT_TOLERANCE, EXIT_ERGODICITY = 0, 2, 3, 4

REFERENCE_SPECIES_SEEDS = ("AABAAB00", "AABA000")
# (alpha, beta) used when the flags are omitted
DEFAULT_RATES = {"pbca": ("0.5", None), "epbca1": ("0.8", "0.1"), "epbca2": ("0.3", "0.6")}


class VerificationFailed(PBCAError):
    pass


def _write(path, text):
    """Write ``text`` to ``path`` atomically, or to stdout for ``None``/``-``."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _note(msg):
    print(f"note: {msg}", file=sys.stderr)


def _prob(text, rational):
    if rational:
        return Fraction(text)
    return float(Fraction(text)) if "/" in text else float(text)


def _params(args) -> ModelParams:
    a_text, b_text = args.alpha, args.beta
    if a_text is None and b_text is None:
        a_text, b_text = DEFAULT_RATES[args.model]
        if b_text is not None:
            _note(f"using default alpha={a_text}, beta={b_text}")
    elif a_text is None:
        a_text = DEFAULT_RATES[args.model][0]
    alpha = _prob(a_text, args.rational)
    beta = None if b_text is None else _prob(b_text, args.rational)
    return ModelParams(args.model, alpha, beta)


def _initial(args, params) -> RingConfig:
    if args.init:
        return RingConfig.parse(args.init, SPECIES if params.model == "epbca2" else None)
    rng = make_rng(args.seed if args.seed is not None else 0, stream=1)
    if params.model == "epbca2":
        if args.L is None or args.mA is None or args.mB is None:
            raise ParameterError("epbca2 needs --init or -L with --mA and --mB")
        return random_species_ring(args.L, args.mA, args.mB, rng)
    if args.L is None or args.m is None:
        raise ParameterError(f"{params.model} needs --init or -L with -m")
    return random_ring(args.L, args.m, rng)


def cmd_simulate(args):
    if args.seed is None:
        raise ParameterError("simulate needs an explicit --seed")
    params = _params(args)
    x0 = _initial(args, params)
    space = None
    if params.model != "epbca2" and x0.L <= 16:
        space = enumerate_binary(x0.L, x0.count(1))
    stats = run(x0, params, args.steps, args.burn_in, args.seed, space=space,
                from_zero=args.from_zero, histogram=args.histogram is not None)
    if args.histogram is not None:
        if stats.histogram is None:
            raise ParameterError("ring too long for an exact histogram")
        hist = stats.histogram
        if space is not None:
            hist = {str(space.configs[i]): c for i, c in hist.items()}
        stats.histogram = hist
        _write(args.histogram, stats.histogram_csv())
    _write(args.out, stats.to_json() + "\n")


def _space(args, params):
    if params.model == "epbca2":
        if not args.init:
            raise ParameterError("exact --model epbca2 needs --init")
        return enumerate_species_reachable(RingConfig.parse(args.init, SPECIES))
    if args.init:
        x = RingConfig.parse(args.init)
        return enumerate_binary(x.L, x.count(1))
    if args.L is None or args.m is None:
        raise ParameterError("exact needs -L and -m (or --init)")
    return enumerate_binary(args.L, args.m)


def cmd_exact(args):
    params = _params(args)
    space = _space(args, params)
    mat = build_matrix(space, params)
    if args.matrix:
        _write(args.matrix, mat.coo_csv())
    if args.lump:
        lumped = lump_by_rotation(mat)
        pi = stationary(lumped).probabilities
        if args.format == "json":
            text = json.dumps([
                {"representative": str(r), "class_size": len(c), "probability": str(p)}
                for r, c, p in zip(space.representatives, space.classes, pi)], indent=2) + "\n"
        else:
            lines = ["representative,class_size,probability"]
            lines += [f"{r},{len(c)},{p}" for r, c, p in zip(space.representatives, space.classes, pi)]
            text = "\n".join(lines) + "\n"
    else:
        dist = stationary(mat)
        if args.format == "json":
            text = json.dumps({"residual": dist.residual, "states": [
                {"state": str(x), "probability": str(p)}
                for x, p in zip(space.configs, dist.probabilities)]}, indent=2) + "\n"
        else:
            text = dist.csv(space)
    _write(args.out, text)


def _verify_instances(args):
    model = args.model
    if model == "pbca":
        pairs = [(a, None) for a in (args.alpha.split(",") if args.alpha else ["0.2", "0.5", "0.8"])]
    else:
        alphas = args.alpha.split(",") if args.alpha else ["0.8", "0.4"]
        betas = args.beta.split(",") if args.beta else ["0.1", "0.8"]
        if len(alphas) != len(betas):
            raise ParameterError("--alpha and --beta lists must have equal length")
        pairs = list(zip(alphas, betas))
    if model == "epbca2":
        inits = list(REFERENCE_SPECIES_SEEDS)
        rng = random.Random(args.seed if args.seed is not None else 0)
        while len(inits) < len(REFERENCE_SPECIES_SEEDS) + args.random:
            L = rng.randint(3, args.max_L)
            word = "".join(rng.choice("0AB") for _ in range(L))
            if set(word) != {"0"}:
                inits.append(word)
        for word in inits:
            space = enumerate_species_reachable(RingConfig.parse(word, SPECIES))
            for a, b in pairs:
                yield space, ModelParams(model, _prob(a, args.rational), _prob(b, args.rational))
        return
    low = 3 if model == "epbca1" else 2
    for L in range(low, args.max_L + 1):
        _note(f"L={L}: skipping degenerate m=0 and m={L}")
        for m in range(1, L):
            space = enumerate_binary(L, m)
            for a, b in pairs:
                beta = None if b is None else _prob(b, args.rational)
                yield space, ModelParams(model, _prob(a, args.rational), beta)


def cmd_verify(args):
    reports = [verify_conjecture(space, params) for space, params in _verify_instances(args)]
    worst = max(r.max_rel_dev for r in reports)
    passed = worst <= args.tol
    doc = {
        "model": args.model,
        "tolerance": args.tol,
        "max_rel_dev": worst,
        "passed": passed,
        "instances": [json.loads(r.to_json()) for r in reports],
    }
    _write(args.out, json.dumps(doc, indent=2) + "\n")
    if not passed:
        raise VerificationFailed(f"max relative deviation {worst:.3e} exceeds {args.tol:.1e}")


def cmd_fd(args):
    if args.limit:
        if args.model != "pbca":
            raise ParameterError("--limit is available for pbca only")
        rhos = np.linspace(0, 1, args.points)
        points = fd_limit(float(_params(args).alpha), rhos)
    else:
        if args.L is None:
            raise ParameterError("fd needs -L (or --limit)")
        params = _params(args)
        alpha = float(params.alpha)
        beta = None if args.model == "pbca" else float(params.beta)
        rho_b = None
        if args.model == "epbca2":
            if args.grid == "rhoA,rhoB":
                rho_b = None
            elif args.rhoB is not None:
                rho_b = args.rhoB
            else:
                raise ParameterError("epbca2 needs --grid rhoA,rhoB or --rhoB")
        points = fd_closed_form(args.model, args.L, alpha, beta, rho_b=rho_b)
        if args.mc_overlay:
            seed = 0 if args.seed is None else args.seed
            mc = fd_monte_carlo(args.model, args.L, alpha, beta, steps=args.steps, seed=seed,
                                rho_b=rho_b, burn_in=args.burn_in)
            points = points + mc
    if args.format == "json":
        rows = [dict(zip(("model", "L", "alpha", "beta", "rho", "rhoA", "rhoB", "flux",
                          "provenance", "stderr"), p.row())) for p in points]
        _write(args.out, json.dumps(rows, indent=2) + "\n")
    else:
        _write(args.out, fd_csv(points))


def cmd_gkz(args):
    doc = {"tolerance": args.tol}
    worst = 0.0
    if args.limit:
        alpha, rho = float(args.alpha), float(args.rho)
        via_g1 = gkz_limit(rho, alpha).flux
        closed = flux_limit_pbca(rho, alpha).flux
        doc["limit"] = {"alpha": alpha, "rho": rho, "gkz": via_g1, "closed_form": closed}
        worst = abs(via_g1 - closed)
        if args.finite_L:
            m = round(rho * args.finite_L)
            doc["limit"]["finite_L"] = args.finite_L
            doc["limit"]["finite_flux"] = flux_pbca(args.finite_L, m, alpha).flux
    else:
        records = []
        for lam in args.lam:
            if lam == 1:
                _note("lam=1: skipping the derivative relation (pole at lam=1)")
            for L in range(2, args.max_L + 1):
                for m in range(1, L):
                    r = gkz_check_identities(L, m, lam)
                    worst = max(worst, r.max_residual())
                    records.append(r)
        doc["instances"] = len(records)
        doc["max"] = {
            key: max((getattr(r, key) for r in records if getattr(r, key) is not None), default=None)
            for key in ("ode", "neighbor", "neighbordel", "flux")
        }
    doc["max_residual"] = worst
    doc["passed"] = worst <= args.tol
    _write(args.out, json.dumps(doc, indent=2) + "\n")
    if not doc["passed"]:
        raise VerificationFailed(f"residual {worst:.3e} exceeds {args.tol:.1e}")


def _common(p):
    p.add_argument("--model", choices=("pbca", "epbca1", "epbca2"), default="pbca")
    p.add_argument("-L", type=int, dest="L")
    p.add_argument("-m", type=int, dest="m")
    p.add_argument("--mA", type=int)
    p.add_argument("--mB", type=int)
    p.add_argument("--init", help="initial configuration literal, e.g. 00AABAAB")
    p.add_argument("--alpha", help="hop probability; default depends on --model")
    p.add_argument("--beta")
    p.add_argument("--seed", type=int)
    p.add_argument("--steps", type=int, default=50_000)
    p.add_argument("--burn-in", type=int, dest="burn_in")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--rational", action="store_true", help="exact rational arithmetic")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pbca-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--run-file", help="key = value file with default flags")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="seeded Monte Carlo run")
    _common(p)
    p.add_argument("--from-zero", action="store_true", help="average from the first update")
    p.add_argument("--histogram", help="write a state,count CSV here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("exact", help="exact stationary distribution")
    _common(p)
    p.add_argument("--lump", action="store_true", help="report rotation-class masses")
    p.add_argument("--matrix", help="write the transition matrix as row,col,prob CSV")
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("verify", help="check closed-form weights against the exact chain")
    _common(p)
    p.set_defaults(alpha=None)
    p.add_argument("--max-L", type=int, dest="max_L", default=8)
    p.add_argument("--random", type=int, default=0, help="extra random epbca2 initial rings")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("fd", help="fundamental diagram sweep")
    _common(p)
    p.add_argument("--mc-overlay", action="store_true")
    p.add_argument("--limit", action="store_true", help="infinite-size pbca curve")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--grid", choices=("rhoA,rhoB",))
    p.add_argument("--rhoB", type=float)
    p.set_defaults(func=cmd_fd)

    p = sub.add_parser("gkz", help="audit the GKZ series identities and limit")
    p.add_argument("--max-L", type=int, dest="max_L", default=40)
    p.add_argument("--lam", type=float, nargs="+", default=[1.5, 5.0])
    p.add_argument("--limit", action="store_true")
    p.add_argument("--alpha", default="0.8")
    p.add_argument("--rho", default="0.5")
    p.add_argument("--finite-L", type=int, dest="finite_L")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gkz)
    return parser


def _expand_run_file(argv):
    if "--run-file" not in argv:
        return argv
    i = argv.index("--run-file")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2:]
    extra = []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            flag = f"-{key}" if len(key) == 1 else f"--{key.replace('_', '-')}"
            extra.append(flag)
            if value.lower() not in ("", "true"):
                extra.append(value)
    # the subcommand comes first; run-file flags go before the user's own
    return rest[:1] + extra + rest[1:]


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _expand_run_file(argv)
    except (OSError, IndexError) as exc:
        print(f"error: bad --run-file: {exc}", file=sys.stderr)
        return EXIT_PARAM
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARAM if exc.code else EXIT_OK
    try:
        args.func(args)
    except ErgodicityError as exc:
        print(f"ergodicity error: {exc}", file=sys.stderr)
        return EXIT_ERGODICITY
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (ParameterError, ValueError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAM
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
