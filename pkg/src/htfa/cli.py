"""Command-line experiment runner.

Subcommands: verify (invariant suites against a baseline), range (exact
membership verdicts), scan-norm (operator norm-ratio ladders), decompose
(stopping-time dump), leibniz (ratio scans), signal-io (format
conversion).  Exit codes: 0 ok, 1 identity failure, 2 baseline drift,
3 usage, 4 I/O.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

DEFAULT_BASELINE = Path(__file__).parent / "data" / "baselines.json"


def _write_out(text: str, out):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    from . import verify

    verify.OPTIONS["chi_exp"] = args.chi_exp
    verify.OPTIONS["epsilon"] = args.epsilon
    results = verify.run_suites(args.seed, workers=args.workers)
    report = verify.format_report(results, args.format)
    try:
        _write_out(report, args.out)
    except OSError as err:
        print(f"cannot write report: {err}", file=sys.stderr)
        return 4

    identity_failures = [r for r in results if not r.passed]
    baseline_path = Path(args.baseline) if args.baseline else DEFAULT_BASELINE
    if args.init:
        baseline = verify.baseline_from_results(results)
        try:
            baseline_path.parent.mkdir(parents=True, exist_ok=True)
            baseline_path.write_text(json.dumps(baseline, indent=2, sort_keys=True) + "\n")
        except OSError as err:
            print(f"cannot write baseline: {err}", file=sys.stderr)
            return 4
        print(f"baseline written to {baseline_path}", file=sys.stderr)
        return 0 if not identity_failures else 1

    drifted = []
    if baseline_path.exists():
        try:
            baseline = json.loads(baseline_path.read_text())
        except OSError as err:
            print(f"cannot read baseline: {err}", file=sys.stderr)
            return 4
        drifted = verify.compare_baseline(results, baseline)
    else:
        print(
            f"no baseline at {baseline_path}; run with --init to create one",
            file=sys.stderr,
        )

    for r in identity_failures:
        print(f"identity failure: {r.name} {r.detail}", file=sys.stderr)
    for name, base, val in drifted:
        print(f"drift: {name} baseline {base:.6g} now {val:.6g}", file=sys.stderr)
    if identity_failures:
        return 1
    if drifted:
        return 2
    return 0


# ---------------------------------------------------------------------------
# range


def _parse_fraction(text: str) -> Fraction:
    t = text.strip().lower()
    if t in ("inf", "oo"):
        return Fraction(0)
    return Fraction(t)


def cmd_range(args) -> int:
    from .vector_valued import (
        ChainError,
        CoverageError,
        RangePoint,
        TupleR,
        range_D_iterated,
        range_Tr,
        range_bht,
        range_verdict,
    )

    try:
        inv_p, inv_q = _parse_fraction(args.inv_p), _parse_fraction(args.inv_q)
        pt = RangePoint.from_pq(inv_p, inv_q)
        if args.which == "bht":
            verdict = "in" if range_bht(pt) else "out"
        elif args.which == "tr":
            verdict = "in" if range_Tr(_parse_fraction_r(args.r), pt) else "out"
        elif args.which == "d":
            verdict = range_verdict(
                _parse_fraction(args.inv_r1), _parse_fraction(args.inv_r2), pt
            )
        else:  # chain
            tuples = []
            for pair in args.tuples:
                a, b = pair.split(",")
                tuples.append(TupleR(_parse_fraction(a), _parse_fraction(b)))
            try:
                region = range_D_iterated(tuples)
                verdict = "in" if region.contains(pt) else "out"
            except ChainError as err:
                verdict = f"chain-failure-at-{err.index}"
    except CoverageError:
        verdict = "outside-coverage"
    except (ValueError, ZeroDivisionError) as err:
        print(f"bad arguments: {err}", file=sys.stderr)
        return 3
    print(verdict)
    return 0


def _parse_fraction_r(text: str) -> Fraction:
    t = text.strip().lower()
    if t in ("inf", "oo"):
        raise ValueError("r must be finite")
    return Fraction(t)


# ---------------------------------------------------------------------------
# scan-norm


def _band_limited(rng, grid, limit):
    from .grid import Signal1D

    n = grid.size
    spec = np.zeros(n, dtype=complex)
    for k in range(-limit, limit + 1):
        spec[k % n] = rng.normal() + 1j * rng.normal()
    return Signal1D(grid, np.fft.ifft(spec))


def _restricted_pair(rng, grid):
    from .grid import Signal1D

    n = grid.size
    masks = []
    for _ in range(2):
        m = (rng.random(n) < rng.uniform(0.05, 0.5)).astype(float)
        if not m.any():
            m[int(rng.integers(n))] = 1.0
        phase = np.exp(2j * np.pi * rng.random(n))
        masks.append(Signal1D(grid, m * phase))
    return masks


def _scan_operators(seed):
    from .dyadic import canonical_tileset
    from .grid import lp_norm
    from .operators import ParaproductSpec, bht_direct, bht_model, paraproduct
    from .vector_valued import IntervalFamily, t_r

    def op_product(f, g, grid):
        return f * g

    def op_bht(f, g, grid):
        return bht_direct(f, g)

    model_cache = {}

    def op_model(f, g, grid):
        fam = model_cache.get(grid.log_size)
        if fam is None:
            fam = canonical_tileset(grid.log_size, range(2, grid.log_size - 2))
            model_cache[grid.log_size] = fam
        return bht_model(f, g, fam)

    def pp(kind):
        def run(f, g, grid):
            return paraproduct(f, g, ParaproductSpec(kind))

        return run

    def tr(r):
        def run(f, g, grid):
            n = grid.size
            step = n // 16
            fam = IntervalFamily(
                [
                    (-6 * step, -4 * step),
                    (-2 * step, step),
                    (2 * step, 3 * step),
                    (4 * step, 6 * step),
                    (7 * step, 8 * step),
                ]
            )
            return t_r(f, g, fam, r)

        return run

    return {
        "product": op_product,
        "bht": op_bht,
        "bht-model": op_model,
        "pp-i": pp("I"),
        "pp-ii": pp("II"),
        "pp-iii": pp("III"),
        "tr-1": tr(1),
        "tr-3/2": tr(1.5),
        "tr-2": tr(2),
    }


def scan_norm_rows(seed, sizes, trials, operators, exponents):
    """Max empirical ratio per (operator, N, exponent triple)."""
    from .grid import GridSpec, lp_norm

    ops = _scan_operators(seed)
    rows = []
    for name in operators:
        if name not in ops and name != "pp-tensor":
            raise ValueError(f"unknown operator {name}")
    for op_idx, name in enumerate(sorted(operators)):
        for log_size in sizes:
            grid = GridSpec(log_size)
            for p, q, s in exponents:
                worst = 0.0
                for trial in range(trials):
                    rng = np.random.default_rng([seed, op_idx, log_size, trial])
                    if name == "product":
                        from .grid import Signal1D

                        n = grid.size
                        m = (rng.random(n) < 0.3).astype(float)
                        if not m.any():
                            m[0] = 1.0
                        f = g = Signal1D(grid, m)
                    elif trial % 2 == 0:
                        f = _band_limited(rng, grid, grid.size // 4)
                        g = _band_limited(rng, grid, grid.size // 4)
                    else:
                        f, g = _restricted_pair(rng, grid)
                    if name == "pp-tensor":
                        out_ratio = _tensor_ratio(rng, grid, f, g, p, q, s)
                    else:
                        out = ops[name](f, g, grid)
                        denom = lp_norm(f, p) * lp_norm(g, q)
                        out_ratio = 0.0 if denom == 0 else lp_norm(out, s) / denom
                    worst = max(worst, out_ratio)
                rows.append((grid.size, name, f"{p},{q},{s}", worst))
    return rows


def _tensor_ratio(rng, grid, a, c, p, q, s):
    """Separable-input two-parameter paraproduct ratio via the 1-D factors.

    On f = a(x)b(y), g = c(x)d(y) the two-parameter operator factors
    exactly (verified against the full 2-D evaluation in the tests), so
    norms multiply axiswise.
    """
    from .grid import lp_norm
    from .operators import ParaproductSpec, paraproduct

    b = _band_limited(rng, grid, grid.size // 4)
    d = _band_limited(rng, grid, grid.size // 4)
    px = paraproduct(a, c, ParaproductSpec("II"))
    py = paraproduct(b, d, ParaproductSpec("I"))
    denom = lp_norm(a, p) * lp_norm(b, p) * lp_norm(c, q) * lp_norm(d, q)
    if denom == 0:
        return 0.0
    return lp_norm(px, s) * lp_norm(py, s) / denom


def cmd_scan_norm(args) -> int:
    sizes = [int(math.log2(n)) for n in args.sizes]
    exponents = []
    for trip in args.exponents:
        p, q, s = trip.split(",")
        exponents.append((Fraction(p), Fraction(q), Fraction(s)))
    rows = scan_norm_rows(args.seed, sizes, args.trials, args.operators, exponents)
    if args.format == "json":
        payload = [
            {"N": n, "operator": op, "exponents": e, "ratio": float(f"{r:.12e}")}
            for n, op, e, r in rows
        ]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        lines = ["N,operator,exponents,ratio"]
        for n, op, e, r in rows:
            lines.append(f'{n},{op},"{e}",{r:.12e}')
        text = "\n".join(lines) + "\n"
    try:
        _write_out(text, args.out)
    except OSError as err:
        print(f"cannot write scan: {err}", file=sys.stderr)
        return 4
    return 0


# ---------------------------------------------------------------------------
# decompose


def cmd_decompose(args) -> int:
    from .dyadic import canonical_tileset
    from .grid import GridSpec, Signal1D
    from .stopping import stopping_time_select

    log_size = int(math.log2(args.n))
    if 1 << log_size != args.n:
        print("grid size must be a power of two", file=sys.stderr)
        return 3
    grid = GridSpec(log_size)
    scales = args.scales or list(range(2, max(3, log_size - 2)))
    fam = canonical_tileset(log_size, scales, certify=False)
    rng = np.random.default_rng(args.seed)
    mask = (rng.random(grid.size) < args.density).astype(float)
    if not mask.any():
        mask[0] = 1.0
    dec = stopping_time_select(fam, Signal1D(grid, mask), m_exp=args.chi_exp)
    text = json.dumps(dec.to_json(), indent=2) + "\n"
    try:
        _write_out(text, args.out)
    except OSError as err:
        print(f"cannot write decomposition: {err}", file=sys.stderr)
        return 4
    return 0


# ---------------------------------------------------------------------------
# leibniz


def cmd_leibniz(args) -> int:
    from .grid import GridSpec, Signal2D
    from .leibniz import InadmissibleExponents, LeibnizInstance, leibniz_ratio_1d, leibniz_ratio_mixed

    log_size = int(math.log2(args.n))
    if 1 << log_size != args.n:
        print("grid size must be a power of two", file=sys.stderr)
        return 3
    parts = [x.strip() for x in args.exponents.split(",")]
    rows = []
    try:
        if args.beta is None:
            grid = GridSpec(log_size)
            s, p1, q1, p2, q2 = parts
            pairs = [(Fraction(p1), Fraction(q1)), (Fraction(p2), Fraction(q2))]
            worst = 0.0
            for trial in range(args.trials):
                rng = np.random.default_rng([args.seed, trial])
                f = _band_limited(rng, grid, grid.size // 4)
                g = _band_limited(rng, grid, grid.size // 4)
                inst = LeibnizInstance(f, g, args.alpha, pairs, Fraction(s))
                worst = max(worst, leibniz_ratio_1d(inst))
            rows.append((args.exponents, worst, args.trials, args.n))
        else:
            grid = GridSpec(log_size, axes=2)
            s1, s2, po, pi, qo, qi = parts
            pairs = [((Fraction(po), Fraction(pi)), (Fraction(qo), Fraction(qi)))] * 4
            worst = 0.0
            for trial in range(args.trials):
                rng = np.random.default_rng([args.seed, trial])
                n = grid.size
                spec = np.zeros((n, n), dtype=complex)
                lim = max(2, n // 8)
                for kx in range(-lim, lim + 1):
                    for ky in range(-lim, lim + 1):
                        spec[kx % n, ky % n] = rng.normal() + 1j * rng.normal()
                f = Signal2D(grid, np.fft.ifft2(spec))
                spec2 = np.zeros((n, n), dtype=complex)
                for kx in range(-lim, lim + 1):
                    for ky in range(-lim, lim + 1):
                        spec2[kx % n, ky % n] = rng.normal() + 1j * rng.normal()
                g = Signal2D(grid, np.fft.ifft2(spec2))
                inst = LeibnizInstance(
                    f, g, args.alpha, pairs, (Fraction(s1), Fraction(s2)), beta=args.beta
                )
                worst = max(worst, leibniz_ratio_mixed(inst))
            rows.append((args.exponents, worst, args.trials, args.n))
    except InadmissibleExponents as err:
        print(f"inadmissible exponents: {err}", file=sys.stderr)
        return 3
    lines = ["cell,max_ratio,trials,N"]
    for cell, ratio, trials, n in rows:
        lines.append(f'"{cell}",{ratio:.12e},{trials},{n}')
    try:
        _write_out("\n".join(lines) + "\n", args.out)
    except OSError as err:
        print(f"cannot write: {err}", file=sys.stderr)
        return 4
    return 0


# ---------------------------------------------------------------------------
# signal-io


def cmd_signal_io(args) -> int:
    from . import signal_io

    src, dst = Path(args.src), Path(args.dst)
    try:
        sig = signal_io.read_csv(src) if src.suffix == ".csv" else signal_io.read_binary(src)
        if dst.suffix == ".csv":
            signal_io.write_csv(dst, sig)
        else:
            signal_io.write_binary(dst, sig)
    except FileNotFoundError as err:
        print(f"cannot read: {err}", file=sys.stderr)
        return 4
    except ValueError as err:
        print(f"bad signal file: {err}", file=sys.stderr)
        return 4
    return 0


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="htfa")
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run the invariant suites")
    pv.add_argument("--seed", type=int, default=20260810)
    pv.add_argument("--workers", type=int, default=1)
    pv.add_argument("--format", choices=("csv", "json"), default="csv")
    pv.add_argument("--out", default="-")
    pv.add_argument("--baseline", default=None)
    pv.add_argument("--init", action="store_true")
    pv.add_argument("--chi-exp", type=int, default=20, dest="chi_exp")
    pv.add_argument("--epsilon", type=float, default=0.05)
    pv.set_defaults(fn=cmd_verify)

    pr = sub.add_parser("range", help="exact range-membership verdicts")
    rsub = pr.add_subparsers(dest="which", required=True)
    rb = rsub.add_parser("bht")
    rb.add_argument("inv_p")
    rb.add_argument("inv_q")
    rt = rsub.add_parser("tr")
    rt.add_argument("r")
    rt.add_argument("inv_p")
    rt.add_argument("inv_q")
    rd = rsub.add_parser("d")
    rd.add_argument("inv_r1")
    rd.add_argument("inv_r2")
    rd.add_argument("inv_p")
    rd.add_argument("inv_q")
    rc = rsub.add_parser("chain")
    rc.add_argument("--tuple", dest="tuples", action="append", required=True,
                    help="reciprocal pair 1/r1,1/r2; outermost first")
    rc.add_argument("inv_p")
    rc.add_argument("inv_q")
    for sp in (rb, rt, rd, rc):
        sp.set_defaults(fn=cmd_range)

    ps = sub.add_parser("scan-norm", help="operator norm-ratio ladder")
    ps.add_argument("--seed", type=int, default=20260810)
    ps.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024, 2048])
    ps.add_argument("--trials", type=int, default=6)
    ps.add_argument(
        "--operators",
        nargs="+",
        default=["product", "bht", "pp-i", "tr-2"],
    )
    ps.add_argument("--exponents", nargs="+", default=["2,2,1", "4,4,2"],
                    help="exponent triples p,q,s")
    ps.add_argument("--format", choices=("csv", "json"), default="csv")
    ps.add_argument("--out", default="-")
    ps.set_defaults(fn=cmd_scan_norm)

    pd = sub.add_parser("decompose", help="stopping-time decomposition dump")
    pd.add_argument("--seed", type=int, default=20260810)
    pd.add_argument("--n", type=int, default=128)
    pd.add_argument("--scales", type=int, nargs="*", default=None)
    pd.add_argument("--density", type=float, default=0.3)
    pd.add_argument("--chi-exp", type=int, default=20, dest="chi_exp")
    pd.add_argument("--out", default="-")
    pd.set_defaults(fn=cmd_decompose)

    pl = sub.add_parser("leibniz", help="derivative-of-product ratio scan")
    pl.add_argument("--alpha", type=float, required=True)
    pl.add_argument("--beta", type=float, default=None)
    pl.add_argument("--exponents", required=True,
                    help="1D: s,p1,q1,p2,q2; mixed: s1,s2,po,pi,qo,qi")
    pl.add_argument("--trials", type=int, default=10)
    pl.add_argument("--N", type=int, default=256, dest="n")
    pl.add_argument("--seed", type=int, default=20260810)
    pl.add_argument("--out", default="-")
    pl.set_defaults(fn=cmd_leibniz)

    pio = sub.add_parser("signal-io", help="convert between csv and binary")
    pio.add_argument("src")
    pio.add_argument("dst")
    pio.set_defaults(fn=cmd_signal_io)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 3 if exc.code not in (0, None) else 0
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
