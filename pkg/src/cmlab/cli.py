"""Command-line interface.

Subcommands:

  norm          compute one function-space norm of a field file
  symbol-check  multiplier-class report for a built-in bilinear symbol
  paraproduct   evaluate pi / pi1 / pi2 / product-b1 / product-b2
  carleson      Carleson-measure checks (bmo | weighted | embedding)
  verify        ratio estimation / resolution sweeps for an inequality id

Fields travel as JSON documents {"n", "N", "L", "values": [[re, im], ...]}.
Weights travel as {"kind": "log"|"loglog"|"const", ...}.  A config file may
supply {"grid", "weight", "lpfamily_q", "tgrid", "families"}.
"""

import argparse
import json
import sys

import numpy as np

from .carleson import (
    band_tent,
    bmo_carleson_ratio,
    carleson_embedding_ratio,
    carleson_norm,
    weighted_band_carleson,
)
from .grid import load_field, save_field
from .harness import INEQUALITY_IDS, emit, estimate_ratio, resolution_sweep
from .multipliers import BUILTIN_SYMBOLS, builtin_symbol, cm_report, standard_family
from .paraproducts import ParaproductSpec, pi, pi1, pi2, product_decompose
from .spaces import (
    BMO_norm,
    H1_norm,
    bmo_norm,
    h1_norm,
    jw_norm,
    lp_norm,
    refined_sobolev_norm,
    triebel_norm,
    xw_norm,
)
from .timegrid import TimeGrid
from .weights import make_log_weight, regularize, weight_from_spec


def _tgrid_from_config(grid, cfg):
    tcfg = (cfg or {}).get("tgrid", {})
    return TimeGrid.for_grid(
        grid,
        q=int(tcfg.get("q", 8)),
        t_min=tcfg.get("t_min"),
        t_max=tcfg.get("t_max"),
    )


def _weight_from_args(args, cfg):
    if args.weight:
        return weight_from_spec(json.loads(args.weight))
    if cfg and "weight" in cfg:
        return weight_from_spec(cfg["weight"])
    return make_log_weight(1.0)


def _load_config(args):
    if getattr(args, "config", None):
        with open(args.config) as fh:
            return json.load(fh)
    return None


def _cmd_norm(args):
    cfg = _load_config(args)
    f = load_field(args.infile)
    w = _weight_from_args(args, cfg)
    rw = regularize(w)
    tgrid = _tgrid_from_config(f.grid, cfg)
    space = args.space
    if space.startswith("lp:"):
        value = lp_norm(f, float(space[3:]))
    elif space == "h1":
        value = h1_norm(f, tgrid)
    elif space == "H1":
        value = H1_norm(f, tgrid)
    elif space == "bmo":
        value = bmo_norm(f)
    elif space == "BMO":
        value = BMO_norm(f)
    elif space == "xw":
        value = xw_norm(f, rw, tgrid)
    elif space.startswith("jw:"):
        value = jw_norm(f, rw, space[3:], tgrid)
    elif space.startswith("fpw:"):
        value = triebel_norm(f, rw, float(space[4:]))
    elif space.startswith("hphi:"):
        value = refined_sobolev_norm(f, float(space[5:]))
    else:
        raise SystemExit(f"unknown space {space!r}")
    print(json.dumps({"norm": value}))


def _cmd_symbol_check(args):
    sigma = builtin_symbol(args.symbol)
    levels = cm_report(sigma, args.n, max_order=args.max_order)
    print(
        json.dumps(
            {
                "symbol": args.symbol,
                "n": args.n,
                "constants_by_order": {str(k): v for k, v in levels.items()},
            }
        )
    )


def _cmd_paraproduct(args):
    cfg = None
    with open(args.spec) as fh:
        cfg = json.load(fh)
    f = load_field(args.f)
    g = load_field(args.g)
    tgrid = _tgrid_from_config(f.grid, cfg)
    spec = ParaproductSpec(standard_family(), cfg.get("m", "one"), tgrid)
    if args.out == "pi":
        result = pi(spec, f, g)
    elif args.out == "pi1":
        result = pi1(spec, f, g)
    elif args.out == "pi2":
        result = pi2(spec, f, g)
    elif args.out in ("product-b1", "product-b2"):
        b1, b2 = product_decompose(spec, f, g)
        result = b1 if args.out == "product-b1" else b2
    else:
        raise SystemExit(f"unknown output {args.out!r}")
    doc = {
        "n": result.grid.n,
        "N": result.grid.N,
        "L": result.grid.L,
        "values": [[float(z.real), float(z.imag)] for z in result.values.ravel()],
    }
    print(json.dumps(doc))


def _cmd_carleson(args):
    cfg = _load_config(args)
    fam = standard_family()
    if args.check == "bmo":
        g = load_field(args.infile)
        tgrid = _tgrid_from_config(g.grid, cfg)
        ratio = bmo_carleson_ratio(g, fam, tgrid)
        norm, witness = carleson_norm(band_tent(g, fam, tgrid, "psi1"))
        print(json.dumps({"constant": ratio, "witness": witness}))
    elif args.check == "weighted":
        h = load_field(args.infile)
        tgrid = _tgrid_from_config(h.grid, cfg)
        rw = regularize(_weight_from_args(args, cfg))
        cq, ratio = weighted_band_carleson(h, rw, fam, tgrid)
        print(json.dumps({"constant": ratio, "quadratic_constant": cq, "witness": None}))
    elif args.check == "embedding":
        g = load_field(args.infile)
        tgrid = _tgrid_from_config(g.grid, cfg)
        G = band_tent(g, fam, tgrid, "psi1")
        import numpy as np

        from .carleson import TentFunction

        F = TentFunction(g.grid, tgrid, np.ones((len(tgrid),) + g.grid.shape))
        ratio = carleson_embedding_ratio(F, G, args.p)
        norm, witness = carleson_norm(G)
        print(json.dumps({"constant": ratio, "witness": witness}))
    else:
        raise SystemExit(f"unknown check {args.check!r}")


def _cmd_verify(args):
    ids = list(INEQUALITY_IDS) if args.all else [args.id]
    if not all(ids):
        raise SystemExit("need --id or --all")
    Ns = [int(s) for s in args.N.split(",")] if args.N else [256, 512, 1024]
    reports = []
    for iid in ids:
        params = {}
        if args.p is not None:
            params["p"] = args.p
        if args.s is not None:
            params["s"] = args.s
        if args.symbol is not None:
            params["symbol"] = args.symbol
        rep = resolution_sweep(
            iid, Ns, trials=args.trials, seed=args.seed, params=params or None
        )
        reports.append(rep)
        sys.stderr.write(
            f"{iid}: max per N {rep.maxima} skipped {rep.skipped}\n"
        )
    if args.out:
        payload = (
            reports[0].to_json()
            if len(reports) == 1
            else json.dumps([json.loads(r.to_json()) for r in reports])
        )
        with open(args.out, "w") as fh:
            fh.write(payload)
    else:
        for rep in reports:
            sys.stdout.write(emit(rep, args.format).decode())
            sys.stdout.write("\n")


def build_parser():
    ap = argparse.ArgumentParser(prog="cmlab")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", help="compute a function-space norm")
    p.add_argument("--space", required=True,
                   help="lp:p | h1 | H1 | bmo | BMO | xw | jw:<space> | fpw:p | hphi:b")
    p.add_argument("--weight", help="weight spec JSON string")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--config")
    p.set_defaults(func=_cmd_norm)

    p = sub.add_parser("symbol-check", help="multiplier-class constants")
    p.add_argument("--symbol", required=True, choices=BUILTIN_SYMBOLS + ("abs-xi",))
    p.add_argument("--n", type=int, default=1, choices=(1, 2))
    p.add_argument("--max-order", type=int, default=None)
    p.set_defaults(func=_cmd_symbol_check)

    p = sub.add_parser("paraproduct", help="evaluate a paraproduct")
    p.add_argument("--spec", required=True, help="spec JSON file (m, tgrid)")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--out", required=True,
                   choices=("pi", "pi1", "pi2", "product-b1", "product-b2"))
    p.set_defaults(func=_cmd_paraproduct)

    p = sub.add_parser("carleson", help="Carleson measure checks")
    p.add_argument("--check", required=True, choices=("bmo", "weighted", "embedding"))
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--weight")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--config")
    p.set_defaults(func=_cmd_carleson)

    p = sub.add_parser("verify", help="ratio estimation for an inequality id")
    p.add_argument("--id", choices=INEQUALITY_IDS)
    p.add_argument("--all", action="store_true")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--N", help="comma-separated resolutions, default 256,512,1024")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--s", type=float, default=None)
    p.add_argument("--symbol", default=None)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=_cmd_verify)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
