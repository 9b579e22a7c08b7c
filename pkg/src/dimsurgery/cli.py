"""Command-line front end: generate sequences, emit bound curves, verify the
finitely-checkable lemmas, and run surgery experiments to CSV.

    dimsurgery gen      --kind coin --n 1000000 --seed 1 --out x.bits
    dimsurgery curves   --grid 0.05 --out curves.csv
    dimsurgery verify   harper --n 8 --trials 10000
    dimsurgery surgery  --in x.bits --strategy raise --s 0.5 --t 0.8 --out run.csv

Exit codes: 0 ok, 1 verification failure, 2 usage error, 3 I/O error.
Every command is deterministic given (config, seed); CSV uses '.' decimals.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import bitseq
from .bitseq import BitSequence
from .dimension import ChunkSchedule, chunk_boundary
from .entropy import (
    bound_curves,
    buffer_schedule,
    case_select,
    entropy,
    entropy_inv,
    raise_profile,
    verify_concavity_lemma,
    verify_convexity_lemma,
)
from .estimators import parse_estimator
from .hamming import (
    best_subcode,
    delsarte_piret_bound,
    greedy_cover,
    harper_far_count,
    verify_harper,
)
from .duplication import duplication_decode, duplication_encode
from .surgery import (
    apply_plan,
    lower_cover_provider,
    plan_lower,
    plan_raise,
    plan_randomize,
    plan_weak_srandom,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3


def _fmt(x: float) -> str:
    return f"{x:.6f}"


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    if args.kind == "bernoulli":
        seq = bitseq.gen_bernoulli(args.p, args.n, args.seed)
    elif args.kind == "coin":
        seq = bitseq.gen_coin(args.n, args.seed)
    elif args.kind == "join_dup":
        seq = bitseq.gen_join_dup(args.n, args.seed)
    elif args.kind == "zero_padded":
        seq = bitseq.gen_zero_padded(args.stride, args.n, args.seed)
    else:
        raise argparse.ArgumentTypeError(f"unknown kind {args.kind}")
    seq.to_file(args.out)
    print(f"wrote {args.n} bits to {args.out}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

def _case_label(s: float, t: float) -> str:
    if s == t:
        return "equal"
    if t == 1.0:
        return "randomize"
    return case_select(s, t)


def cmd_curves(args) -> int:
    if args.grid <= 0:
        raise argparse.ArgumentTypeError("grid step must be positive")
    steps = round(1.0 / args.grid)
    grid = [min(1.0, i * args.grid) for i in range(steps + 1)]
    if grid[-1] != 1.0:
        grid.append(1.0)
    lines = ["s,t,naive,raise,lower,case"]
    for s in grid:
        for t in grid:
            if t < s:
                continue
            bc = bound_curves(s, t)
            lines.append(",".join([
                _fmt(s), _fmt(t), _fmt(bc.naive), _fmt(bc.raise_),
                _fmt(bc.lower), _case_label(s, t)]))
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_harper(args, emit) -> int:
    failures = 0
    for n in range(1, args.n + 1):
        rep = verify_harper(n, trials=args.trials, seed=args.seed + n)
        ok = rep.ok
        failures += 0 if ok else 1
        emit(f"{'PASS' if ok else 'FAIL'} harper n={n} checked={rep.checked} "
             f"tightest_gap={rep.tightest_gap} sizes={rep.tightest_sizes}")
    return failures


def _verify_corollary(args, emit) -> int:
    failures = 0
    rng = np.random.default_rng(args.seed)
    for n in (10, 12, min(args.n, 14)):
        for eps in (0.1, 0.2):
            q = float(entropy(0.5 - eps / 2.0))
            size = min(1 << n, math.ceil(2.0 ** (n * q)))
            bound = 2.0 ** (n * q + 2)
            worst = -1
            for _ in range(args.trials):
                words = rng.choice(1 << n, size=size, replace=False)
                far = harper_far_count(n, words, eps)
                worst = max(worst, far)
            ok = worst <= bound
            failures += 0 if ok else 1
            emit(f"{'PASS' if ok else 'FAIL'} corollary n={n} eps={eps} "
                 f"|A|={size} worst_far={worst} bound={bound:.1f}")
    return failures


def _verify_cover(args, emit) -> int:
    failures = 0
    for n in range(4, args.n + 1):
        for ratio in (0.1, 0.2, 0.3, 0.4):
            r = max(1, int(ratio * n + 0.5))
            book = greedy_cover(n, r)
            bound = delsarte_piret_bound(n, r)
            ok = len(book.words) < bound and book.coverage_fraction == 1.0
            failures += 0 if ok else 1
            emit(f"{'PASS' if ok else 'FAIL'} cover n={n} r={r} "
                 f"|C|={len(book.words)} bound={bound:.1f}")
            if n == args.n and r == max(1, int(0.2 * n + 0.5)):
                m = max(1, len(book.words) // 8)
                sub = best_subcode(book, m)
                frac = sub.coverage_fraction
                floor = m / len(book.words)
                note = "ok" if frac >= floor else "below-existential-floor"
                emit(f"INFO subcode n={n} r={r} m={m} coverage={frac:.4f} "
                     f"m/|C|={floor:.4f} {note}")
    return failures


def _verify_convexity(args, emit) -> int:
    failures = 0
    deltas = [args.delta] if args.delta else [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45]
    for delta in deltas:
        rep = verify_convexity_lemma(delta, grid_step=args.grid)
        ok = rep.sign_pattern_ok
        failures += 0 if ok else 1
        emit(f"{'PASS' if ok else 'FAIL'} convexity delta={delta} "
             f"inflection={rep.inflection} worst={rep.worst_violation:.3g}")
    return failures


def _verify_concavity(args, emit) -> int:
    rep = verify_concavity_lemma(grid_step=args.grid)
    ok = rep.sign_pattern_ok
    emit(f"{'PASS' if ok else 'FAIL'} concavity worst={rep.worst_violation:.3g}")
    return 0 if ok else 1


def _buffer_families(horizon: int):
    yield "constant", [0.5] * horizon
    yield "alternating", [0.2 if i % 2 else 0.8 for i in range(horizon)]
    yield "drifting", [0.3 + 0.3 * i / horizon for i in range(horizon)]


def _verify_buffer(args, emit) -> int:
    from .entropy import tail_average_floor

    failures = 0
    for name, s_seq in _buffer_families(args.horizon):
        eps, b = buffer_schedule(args.c, s_seq, args.horizon)
        s_sur = tail_average_floor(s_seq)
        ok = True
        lhs_min = float("inf")
        prefix = 0.0
        for j in range(1, args.horizon + 1):
            prefix += float(raise_profile(s_seq[j - 1], eps[j - 1])) * j * j
            lhs = prefix - args.c * j * j - (s_sur * chunk_boundary(j) - b)
            lhs_min = min(lhs_min, lhs)
            if lhs <= 0:
                ok = False
        failures += 0 if ok else 1
        emit(f"{'PASS' if ok else 'FAIL'} buffer family={name} "
             f"s={s_sur:.4f} b={b:.1f} min_margin={lhs_min:.3g}")
    return failures


def _verify_duplication(args, emit) -> int:
    rng = np.random.default_rng(args.seed)
    n = args.n - (args.n % 2)
    radius = float(entropy_inv(0.5))
    bound = n + radius * n + n / 4.0 + 2.0 * math.log2(n) + 16.0
    failures = 0
    worst = 0
    for _ in range(args.trials):
        y = bitseq.gen_join_dup(n, int(rng.integers(1 << 30)))
        x = BitSequence(y.bits.copy())
        flips = rng.choice(n, size=int(radius * n), replace=False)
        x.bits[flips] ^= 1
        desc = duplication_encode(x, y)
        if duplication_decode(desc) != y:
            failures += 1
            emit(f"FAIL duplication round-trip n={n}")
            continue
        worst = max(worst, desc.total_length_bits)
        if desc.total_length_bits > bound:
            failures += 1
            emit(f"FAIL duplication length {desc.total_length_bits} > {bound:.1f}")
    if failures == 0:
        emit(f"PASS duplication n={n} trials={args.trials} "
             f"worst_len={worst} bound={bound:.1f}")
    return failures


_VERIFY_TARGETS = {
    "harper": _verify_harper,
    "corollary": _verify_corollary,
    "cover": _verify_cover,
    "convexity": _verify_convexity,
    "concavity": _verify_concavity,
    "buffer": _verify_buffer,
    "duplication": _verify_duplication,
}


def cmd_verify(args) -> int:
    lines: list[str] = []

    def emit(line: str) -> None:
        lines.append(line)
        print(line)

    failures = _VERIFY_TARGETS[args.target](args, emit)
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write("result,detail\n")
            for line in lines:
                head, _, rest = line.partition(" ")
                fh.write(f"{head},{rest}\n")
    return EXIT_OK if failures == 0 else EXIT_VERIFY_FAIL


# ---------------------------------------------------------------------------
# surgery
# ---------------------------------------------------------------------------

def _measure_chunk_dims(x: BitSequence, est) -> list[float]:
    sched = ChunkSchedule.for_length(len(x))
    out = []
    for j in range(1, sched.count + 1):
        lo, hi = sched.span(j)
        out.append(est.estimate(x.bits[lo:hi], x.bits[:lo]))
    return out


def _surgery_bound(args, report) -> float:
    if args.strategy == "randomize":
        return 0.5 - float(entropy_inv(report.dim_before))
    if args.strategy == "raise":
        return float(entropy_inv(args.t) - entropy_inv(args.s))
    if args.strategy == "lower":
        return float(entropy_inv(1.0 - args.s))
    deltas = report.plan.deltas()
    js = np.arange(1, len(deltas) + 1, dtype=np.float64)
    series = np.cumsum(deltas * js ** 2) / (js * (js + 1) * (2 * js + 1) / 6.0)
    return float(series[len(series) // 2:].max())


def _run_surgery_once(args, seed: int, out_path: str | None) -> None:
    x = BitSequence.from_file(args.infile)
    est = parse_estimator(args.estimator)
    sched = ChunkSchedule.for_length(len(x))
    if sched.count < 2:
        raise ValueError("input too short for even two chunks")
    cover_provider = None
    if args.strategy == "randomize":
        plan = plan_randomize(_measure_chunk_dims(x, est), seed=seed)
    elif args.strategy == "weak":
        plan = plan_weak_srandom(_measure_chunk_dims(x, est), c=args.c, seed=seed)
    elif args.strategy == "raise":
        s_seq = _measure_chunk_dims(x, est)
        if args.t <= args.s:
            raise argparse.ArgumentTypeError("raise needs s < t")
        plan = plan_raise(s_seq, args.s, args.t, seed=seed)
    elif args.strategy == "lower":
        cover_provider = lower_cover_provider(args.s)
        plan = plan_lower(sched.count, args.s, cover_provider, seed=seed)
    else:
        raise argparse.ArgumentTypeError(f"unknown strategy {args.strategy}")

    y, report = apply_plan(x, plan, est, searcher=args.searcher,
                           cover_provider=cover_provider)
    bound = _surgery_bound(args, report)
    lines = ["j,s_j,delta_planned,delta_achieved,t_planned,t_achieved"]
    for oc in report.outcomes:
        lines.append(",".join([
            str(oc.j), _fmt(oc.s_j), _fmt(oc.delta_planned),
            _fmt(oc.delta_achieved), _fmt(oc.t_planned), _fmt(oc.t_achieved)]))
    lines.append("")
    lines.append("dim_before,dim_after,distance,bound,slack")
    lines.append(",".join([
        _fmt(report.dim_before), _fmt(report.dim_after), _fmt(report.distance),
        _fmt(bound), _fmt(bound - report.distance)]))
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    print(f"seed={seed} dim_before={_fmt(report.dim_before)} "
          f"dim_after={_fmt(report.dim_after)} distance={_fmt(report.distance)} "
          f"bound={_fmt(bound)}")
    if report.distance > bound + args.tolerance:
        print(f"WARN measured distance exceeds the bound by more than "
              f"--tolerance {args.tolerance}")
    if args.save_y:
        y.to_file(args.save_y)


def cmd_surgery(args) -> int:
    seeds = [args.seed] if not args.seeds else [int(v) for v in args.seeds.split(",")]
    for seed in seeds:
        if args.out and len(seeds) > 1:
            out_path = f"{args.out}.seed{seed}.csv"
        else:
            out_path = args.out
        _run_surgery_once(args, seed, out_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser / entry
# ---------------------------------------------------------------------------

def _auto_type(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value


def load_config(path: str) -> dict:
    """Flat key=value lines; '#' starts a comment."""
    out = {}
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line {raw!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = _auto_type(value.strip())
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dimsurgery",
        description="bound curves, lemma verification, and bit-sequence dimension surgery")
    parser.add_argument("--config", help="key=value defaults file (flags override)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a test sequence")
    p.add_argument("--kind", required=True,
                   choices=["bernoulli", "coin", "join_dup", "zero_padded"])
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--stride", type=int, default=2)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("curves", help="emit the bound-curve CSV over a grid")
    p.add_argument("--grid", type=float, default=0.05)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("verify", help="run a verification target")
    p.add_argument("target", choices=sorted(_VERIFY_TARGETS))
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--grid", type=float, default=1e-3)
    p.add_argument("--c", type=float, default=10.0)
    p.add_argument("--horizon", type=int, default=10_000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("surgery", help="plan and apply a surgery, emit CSV")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--strategy", required=True,
                   choices=["randomize", "weak", "raise", "lower"])
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--c", type=float, default=10.0)
    p.add_argument("--estimator", default="bernoulli")
    p.add_argument("--searcher", default="greedy",
                   choices=["greedy", "random_fill", "steepest"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--seeds", default=None,
                   help="comma list; multiple seeds write one CSV per seed")
    p.add_argument("--out", default=None)
    p.add_argument("--save-y", dest="save_y", default=None,
                   help="also write the modified sequence here")
    p.add_argument("--tolerance", type=float, default=0.05)
    p.set_defaults(func=cmd_surgery)
    return parser


_CONFIG_DEST = {"in": "infile", "save-y": "save_y"}


def _apply_config(args, cfg: dict, argv: list) -> None:
    # config supplies defaults; flags explicitly present in argv win
    for key, value in cfg.items():
        dest = _CONFIG_DEST.get(key, key.replace("-", "_"))
        if f"--{key}" in argv or f"--{key.replace('_', '-')}" in argv:
            continue
        if hasattr(args, dest):
            setattr(args, dest, value)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    cfg = {}
    if "--config" in argv:
        try:
            cfg_path = argv[argv.index("--config") + 1]
        except IndexError:
            parser.error("--config needs a path")
        try:
            cfg = load_config(cfg_path)
        except OSError as exc:
            print(f"dimsurgery: {exc}", file=sys.stderr)
            return EXIT_IO
    args = parser.parse_args(argv)
    _apply_config(args, cfg, argv)
    try:
        return args.func(args)
    except OSError as exc:
        print(f"dimsurgery: {exc}", file=sys.stderr)
        return EXIT_IO
    except (argparse.ArgumentTypeError, ValueError) as exc:
        print(f"dimsurgery: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
