"""Command-line surface.

Exit codes form the scripting contract: 0 success, 2 invalid input,
3 numerical failure, 4 non-regular data (the non-uniqueness regime).
All outputs embed the run configuration, and identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .circle import CircleFunction, CircleGrid, read_circle_csv, write_circle_csv
from .classify import classify, jacobi_verblunsky, widom_det
from .errors import NumericalError, RegularityError
from .hankel import regularity_test
from .inverse import glm_factorization_residual, glm_matrix, recover_verblunsky
from .opuc import VerblunskySeq
from .scatter import forward_scatter

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3
EXIT_NONREGULAR = 4


def _load_seq(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
        return VerblunskySeq.from_json(obj)
    except (OSError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read Verblunsky JSON from {path}: {exc}") from exc


def _load_scattering_csv(path):
    s, config = read_circle_csv(path)
    if np.max(np.abs(np.abs(s.samples) - 1.0)) > 1e-6:
        raise ValueError(f"{path} is not unimodular; not a scattering function")
    return s, config


def _config_dict(args, **extra):
    cfg = {"grid": args.grid}
    for key in ("trunc", "order", "radius"):
        if getattr(args, key, None) is not None:
            cfg[key] = getattr(args, key)
    cfg.update(extra)
    return cfg


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"not JSON serializable: {type(x)!r}")


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=_jsonable)
        fh.write("\n")


def _validate(args):
    n = args.grid
    if n < 16 or n & (n - 1):
        raise ValueError(f"--grid must be a power of two >= 16, got {n}")
    trunc = getattr(args, "trunc", None)
    if isinstance(trunc, int):
        if trunc > n // 4:
            raise ValueError(f"--trunc {trunc} exceeds grid/4 = {n // 4}")
        order = getattr(args, "order", None)
        if order is not None and order > trunc // 4:
            raise ValueError(f"--order {order} exceeds trunc/4 = {trunc // 4}")


def _out_prefix(args, fallback):
    if args.out:
        return Path(args.out)
    if getattr(args, "input", None):
        return Path(Path(args.input).stem)
    return Path(fallback)


def cmd_forward(args):
    seq = _load_seq(args.input)
    grid = CircleGrid(args.grid)
    data = forward_scatter(seq, grid)
    cfg = _config_dict(args, command="forward", input=str(args.input))
    prefix = _out_prefix(args, "forward")
    s_path = prefix.with_suffix(".s.csv")
    write_circle_csv(s_path, data.s, cfg)
    _write_json(prefix.with_suffix(".meta.json"), {
        "a_minus1": [data.a_minus1.real, data.a_minus1.imag],
        "D0": data.d0,
        "clamped_nodes": int(data.clamped.sum()),
        "config": cfg,
    })
    if args.weight:
        write_circle_csv(prefix.with_suffix(".w.csv"), data.w, cfg)
    print(f"forward: wrote {s_path} (D0 = {data.d0:.12g}, "
          f"{int(data.clamped.sum())} clamped nodes)")
    return EXIT_OK


def cmd_inverse(args):
    s, _ = _load_scattering_csv(args.input)
    report = recover_verblunsky(s, n_max=args.order, M=args.trunc)
    cfg = _config_dict(args, command="inverse", input=str(args.input))
    prefix = _out_prefix(args, "inverse")
    _write_json(prefix.with_suffix(".recovery.json"), report.to_json(cfg))
    print(f"inverse: residual {report.residual:.3e}, regular={report.regular}, "
          f"a_minus1 = {report.a_minus1:.9g}")
    if args.strict and not report.regular:
        return EXIT_NONREGULAR
    return EXIT_OK


def cmd_roundtrip(args):
    seq = _load_seq(args.input)
    grid = CircleGrid(args.grid)
    data = forward_scatter(seq, grid)
    report = recover_verblunsky(data.s, n_max=args.order, M=args.trunc)
    n = min(len(seq.a), len(report.a))
    coeff_err = float(np.max(np.abs(np.asarray(seq.a[:n]) - report.a[:n]))) if n else 0.0
    tail_err = float(np.max(np.abs(report.a[n:]))) if len(report.a) > n else 0.0
    am1_err = abs(report.a_minus1 - seq.a_minus1)
    cfg = _config_dict(args, command="roundtrip", input=str(args.input))
    prefix = _out_prefix(args, "roundtrip")
    _write_json(prefix.with_suffix(".roundtrip.json"), {
        "coefficient_error": coeff_err,
        "tail_error": tail_err,
        "a_minus1_error": am1_err,
        "recovery": report.to_json(),
        "config": cfg,
    })
    print(f"roundtrip: max coefficient error {max(coeff_err, tail_err):.3e}, "
          f"a_minus1 error {am1_err:.3e}")
    if args.strict and not report.regular:
        return EXIT_NONREGULAR
    return EXIT_OK


def cmd_widom(args):
    seq = _load_seq(args.input)
    grid = CircleGrid(args.grid)
    m_list = args.trunc
    rows = widom_det(seq, m_list, grid)
    cfg = _config_dict(args, command="widom", input=str(args.input))
    prefix = _out_prefix(args, "widom")
    path = prefix.with_suffix(".widom.csv")
    lines = ["# config: " + ",".join(f"{k}={cfg[k]}" for k in sorted(cfg)),
             "M,det,product,gap"]
    for m, det, product, gap in rows:
        lines.append(f"{m},{det!r},{product!r},{gap!r}")
    Path(path).write_text("\n".join(lines) + "\n")
    last = rows[-1]
    print(f"widom: at M={last[0]} det={last[1]:.9g} product={last[2]:.9g} "
          f"gap={last[3]:.3e}")
    return EXIT_OK


def cmd_classify(args):
    grid = CircleGrid(args.grid)
    if str(args.input).endswith(".json"):
        seq = _load_seq(args.input)
        report = classify(seq=seq, grid=grid, M=args.trunc, r=args.radius)
    else:
        s, _ = _load_scattering_csv(args.input)
        report = classify(s=s, M=args.trunc, r=args.radius)
    cfg = _config_dict(args, command="classify", input=str(args.input))
    prefix = _out_prefix(args, "classify")
    _write_json(prefix.with_suffix(".classify.json"), report.to_json(cfg))
    print(f"classify: index={report.index} regular={report.regular} "
          f"hs={report.hs_member} gi={report.gi_member}")
    return EXIT_OK


def cmd_glm(args):
    seq = _load_seq(args.input)
    grid = CircleGrid(args.grid)
    glm = glm_matrix(seq, args.order, args.trunc, grid=grid)
    residual = glm_factorization_residual(seq, args.order, args.trunc, grid=grid)
    cfg = _config_dict(args, command="glm", input=str(args.input))
    prefix = _out_prefix(args, "glm")
    _write_json(prefix.with_suffix(".glm.json"), {
        "factorization_residual": residual,
        "diagonal": [[d.real, d.imag] for d in glm.diag],
        "config": cfg,
    })
    print(f"glm: factorization residual {residual:.3e}")
    return EXIT_OK


def cmd_demo_nonunique(args):
    grid = CircleGrid(args.grid)
    truncs = args.trunc
    cfg = _config_dict(args, command="demo-nonunique")
    sup_diffs = {}
    away_diffs = {}
    away = np.abs(np.angle(grid.nodes)) > 0.3
    away &= np.abs(np.angle(-grid.nodes)) > 0.3
    for m in truncs:
        seq_a = jacobi_verblunsky(2.0, 0.0, m)
        seq_b = jacobi_verblunsky(0.0, 2.0, m)
        da = forward_scatter(seq_a, grid)
        db = forward_scatter(seq_b, grid)
        keep = np.ones(grid.size, dtype=bool)
        keep[da.excluded_nodes()] = False
        keep[db.excluded_nodes()] = False
        diff = np.abs(da.s.samples - db.s.samples)
        sup_diffs[m] = float(np.max(diff[keep]))
        away_diffs[m] = float(np.max(diff[keep & away]))
        print(f"demo-nonunique: truncation {m}: sup |s_1 - s_2| = {sup_diffs[m]:.6g} "
              f"(away from t = +-1: {away_diffs[m]:.6g})")
    t2 = CircleFunction(grid, grid.nodes ** 2)
    rep = regularity_test(s=t2, d0=1.0 / np.sqrt(6.0), M=min(truncs[-1], grid.size // 4))
    print(f"demo-nonunique: common s = t^2 regularity: lhs={rep.lhs:.6g} "
          f"rhs={rep.rhs:.6g} regular={rep.regular}")
    prefix = _out_prefix(args, "demo_nonunique")
    _write_json(prefix.with_suffix(".demo.json"), {
        "sup_differences": {str(k): v for k, v in sup_diffs.items()},
        "sup_differences_away_from_singularities": {
            str(k): v for k, v in away_diffs.items()},
        "common_s_regularity": {
            "lhs": rep.lhs, "rhs": rep.rhs, "regular": rep.regular,
            "sigma_max": rep.sigma_max,
        },
        "config": cfg,
    })
    return EXIT_OK


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cmvscatter",
        description="Forward and inverse scattering for CMV matrices")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True, trunc_default=256, trunc_list=False):
        if needs_input:
            p.add_argument("--input", required=True, help="input file")
        p.add_argument("--out", default=None, help="output path prefix")
        p.add_argument("--grid", type=int, default=4096, help="grid size (power of two)")
        if trunc_list:
            p.add_argument("--trunc", type=_int_list, default=trunc_default,
                           help="comma-separated truncation orders")
        else:
            p.add_argument("--trunc", type=int, default=trunc_default,
                           help="Hankel truncation order")

    p = sub.add_parser("forward", help="Verblunsky JSON -> scattering CSV")
    common(p)
    p.add_argument("--weight", action="store_true", help="also write the density CSV")
    p.set_defaults(func=cmd_forward)

    p = sub.add_parser("inverse", help="scattering CSV -> recovery JSON")
    common(p)
    p.add_argument("--order", type=int, default=12, help="highest coefficient to recover")
    p.add_argument("--strict", action="store_true",
                   help="exit 4 when the data is not in the one-to-one regime")
    p.set_defaults(func=cmd_inverse)

    p = sub.add_parser("roundtrip", help="forward then inverse, report the gap")
    common(p)
    p.add_argument("--order", type=int, default=12)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_roundtrip)

    p = sub.add_parser("widom", help="determinant identity table")
    common(p, trunc_default=[64, 128, 256], trunc_list=True)
    p.set_defaults(func=cmd_widom)

    p = sub.add_parser("classify", help="class membership report")
    common(p)
    p.add_argument("--radius", type=float, default=0.95, help="winding-number radius")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("glm", help="GLM factorization residual")
    common(p, trunc_default=128)
    p.add_argument("--order", type=int, default=8, help="GLM block order")
    p.set_defaults(func=cmd_glm)

    p = sub.add_parser("demo-nonunique", help="two sequences, one scattering function")
    common(p, needs_input=False, trunc_default=[100, 400], trunc_list=True)
    p.set_defaults(func=cmd_demo_nonunique)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except RegularityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONREGULAR
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
