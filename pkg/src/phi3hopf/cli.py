"""Batch command line interface.

Every capability is exposed as a subcommand group with machine-readable
output (JSON by default; DOT and plain text where they make sense).  Output
is deterministic for fixed arguments and seed.  Exit codes: 0 success,
1 argument/validation error, 2 computation failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .graphs import (
    FeynmanGraph,
    divergent_subgraph_families,
    generate_graphs,
    named_graph,
    stats,
    sym_factor,
)
from .hopf import (
    antipode,
    check_hopf_axioms,
    coproduct,
    get_instance,
)
from .integrand import pretty
from .ring import parse_poly
from .series import (
    TruncatedSeries,
    diff_compose,
    diff_inverse,
    dyson_transform,
    parse_series,
    series_mul,
    series_recip,
)


def _emit(args, payload) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True, default=str)
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _graph_from_args(spec: str) -> FeynmanGraph:
    if spec.startswith("{"):
        return FeynmanGraph.from_json(spec)
    return named_graph(spec)


# -- series ------------------------------------------------------------------


def cmd_series(args) -> int:
    order = args.order
    if args.action == "mul":
        f = parse_series(args.f, order, "inv")
        g = parse_series(args.g, order, "inv")
        result = series_mul(f, g)
    elif args.action == "recip":
        result = series_recip(parse_series(args.f, order, "inv"))
    elif args.action == "compose":
        f = parse_series(args.f, order, "diff")
        g = parse_series(args.g, order, "diff")
        result = diff_compose(f, g)
    elif args.action == "invert":
        result = diff_inverse(parse_series(args.f, order, "diff"))
    else:  # dyson
        g_bare = parse_series(args.f, order, "inv")
        z3 = parse_series(args.z3, order, "inv")
        zm = parse_series(args.zm, order, "inv")
        z1 = parse_series(args.z1, order, "inv")
        result = dyson_transform(g_bare, z3, zm, z1, k=args.k)
    _emit(args, json.loads(result.to_json()))
    return 0


# -- hopf ----------------------------------------------------------------------


def cmd_hopf(args) -> int:
    inst = get_instance(args.instance)
    if args.action == "axioms":
        report = check_hopf_axioms(inst, args.grade)
        _emit(args, report)
        return 0
    token = ("x", args.n) if args.instance not in ("sl2", "gl2") else args.generator
    x = inst.gen(token)
    if args.action == "coproduct":
        _emit(args, {"instance": inst.name, "generator": str(token), "coproduct": str(coproduct(x))})
    elif args.action == "antipode":
        _emit(args, {"instance": inst.name, "generator": str(token), "antipode": str(antipode(x))})
    elif args.action == "convolve":
        from .hopf import Character, convolve

        alpha = Character.from_values(
            inst, {("x", k): parse_poly(v) for k, v in json.loads(args.alpha).items()}, "alpha"
        )
        beta = Character.from_values(
            inst, {("x", k): parse_poly(v) for k, v in json.loads(args.beta).items()}, "beta"
        )
        conv = convolve(alpha, beta)
        values = {f"x{k}": str(conv.on_token(("x", k))) for k in range(1, args.grade + 1)}
        _emit(args, {"instance": inst.name, "convolution": values})
    return 0


# -- graphs -----------------------------------------------------------------------


def cmd_graphs(args) -> int:
    if args.action == "enumerate":
        gs = generate_graphs(args.k, args.max_vertices, args.graph_class, args.sources)
        if args.format == "dot":
            _emit(args, [g.to_dot() for g in gs])
        else:
            _emit(
                args,
                [
                    {
                        "encoding": g.encoding(),
                        "vertices": g.n_vertices3,
                        "loops": g.n_loops,
                        "sym": sym_factor(g),
                    }
                    for g in gs
                ],
            )
        return 0
    g = _graph_from_args(args.graph)
    if args.action == "stats":
        s = stats(g, args.D)
        _emit(args, {"encoding": g.encoding(), "E": s.E, "I": s.I, "V": s.V, "L": s.L, "omega": s.omega})
    elif args.action == "sym":
        _emit(args, {"encoding": g.encoding(), "sym": sym_factor(g)})
    elif args.action == "dot":
        print(g.to_dot())
    elif args.action == "families":
        fams = divergent_subgraph_families(g, args.D)
        _emit(
            args,
            [
                {
                    "members": [sorted(m.edge_indices) for m in f.members],
                    "labels": list(f.labels),
                    "externals": [m.n_external for m in f.members],
                }
                for f in fams
            ],
        )
    return 0


# -- ck ---------------------------------------------------------------------------


def cmd_ck(args) -> int:
    from .ckhopf import (
        bare_coupling_graph_series,
        ck_antipode,
        ck_coproduct,
        counterterm_character,
        hd_to_hck,
        project_pi,
        z_factor_series,
    )

    if args.action == "coproduct":
        g = _graph_from_args(args.graph)
        _emit(args, {"graph": g.encoding(), "coproduct": str(ck_coproduct(g, args.label))})
    elif args.action == "antipode":
        g = _graph_from_args(args.graph)
        _emit(args, {"graph": g.encoding(), "antipode": str(ck_antipode(g, args.label))})
    elif args.action == "zfactors":
        z1, z3, zm = z_factor_series(args.max_loops)
        render = lambda s: {" * ".join(f"{t[0]}(r{t[1]})" for t in m) or "1": str(c) for m, c in s.entries.items()}
        _emit(args, {"Z1": render(z1), "Z3": render(z3), "Zm": render(zm)})
    elif args.action == "inclusion":
        _emit(args, {"n": args.n, "image": str(hd_to_hck(args.n, args.max_loops))})
    else:  # project
        from .numerics.quadrature import RegulatorConfig

        cfg = RegulatorConfig(cutoff=args.cutoff, dimension=6, method="sphere")
        lam_b = bare_coupling_graph_series(args.max_loops)
        series = project_pi(lam_b, args.order, counterterm_character(cfg))
        _emit(args, json.loads(series.to_json()))
    return 0


# -- bphz ---------------------------------------------------------------------------


def cmd_bphz(args) -> int:
    from .bphz import (
        bare_node,
        check_ar_equals_a_star_c,
        counterterm,
        cutoff_ladder,
        renormalized_node,
        rota_baxter_check,
        routed,
        tail_profile,
    )
    from .numerics.quadrature import RegulatorConfig

    if args.action == "rotabaxter":
        report = {
            model: rota_baxter_check(model, args.trials, args.seed)
            for model in ("eval-at-zero", "pole-part")
        }
        _emit(args, report)
        return 0

    g = _graph_from_args(args.graph)
    if args.action == "integrand":
        rg = routed(g, args.D)
        names = rg.routing.basis_names()
        _emit(
            args,
            {
                "graph": g.encoding(),
                "basis": names,
                "bare": pretty(bare_node(rg), names),
                "renormalized": pretty(renormalized_node(rg), names),
            },
        )
        return 0
    if args.action == "counterterm":
        cfg = RegulatorConfig(cutoff=args.cutoff, dimension=args.D, method=args.method, samples=args.samples, seed=args.seed)
        ct = counterterm(g, args.label, cfg)
        _emit(args, {"graph": ct.encoding, "label": ct.label, "value": ct.value})
        return 0
    if args.action == "renormalize":
        ladder = [float(x) for x in args.lambda_ladder.split(",")]
        cfg = RegulatorConfig(cutoff=max(ladder), dimension=args.D, method="mc", samples=args.samples, seed=args.seed)
        report = cutoff_ladder(g, args.p, cfg, ladder)
        tail = tail_profile(g, args.D, args.p, list(np.geomspace(10, 1000, 12)))
        report["tail"] = tail
        _emit(args, report)
        return 0
    # astarc
    cfg = RegulatorConfig(cutoff=args.cutoff, dimension=args.D, method="mc", samples=args.samples, seed=args.seed)
    _emit(args, check_ar_equals_a_star_c(g, args.p, cfg))
    return 0


# -- greens ---------------------------------------------------------------------------


def cmd_greens(args) -> int:
    from .greens import connected_to_full, ds_expansion, el_tree_expansion

    if args.action == "trees":
        terms = el_tree_expansion(args.max_order)
        _emit(args, [t.render() for t in terms])
    elif args.action == "ds":
        terms = ds_expansion(args.k, args.sources, args.max_order)
        _emit(args, [t.render() for t in terms])
    else:  # partitions
        _emit(args, [t.render() for t in connected_to_full(args.k)])
    return 0


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="phi3hopf",
        description="Combinatorics and numerics of perturbative renormalization "
        "for the cubic scalar theory.",
    )
    p.add_argument("--version", action="version", version=f"phi3hopf {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("series", help="truncated series groups and the Dyson transform")
    s.add_argument("action", choices=["mul", "recip", "compose", "invert", "dyson"],
                   help="mul/recip: invertible series under the Cauchy product; "
                   "compose/invert: formal diffeomorphisms; dyson: Dyson's "
                   "renormalization formula G_ren = Z3^(-k/2) G_bare(m_b, lambda_b)")
    s.add_argument("--f", required=True, help="series expression, e.g. 'z+z^2'")
    s.add_argument("--g", help="second series for mul/compose")
    s.add_argument("--z1", default="1", help="vertex renormalization factor Z1")
    s.add_argument("--z3", default="1", help="wave-function factor Z3")
    s.add_argument("--zm", default="1", help="mass factor Zm")
    s.add_argument("--k", type=int, default=2, help="external leg count for Z3^(-k/2)")
    s.add_argument("--order", type=int, default=6)
    s.add_argument("--output")
    s.set_defaults(func=cmd_series)

    h = sub.add_parser("hopf", help="Hopf algebra structure maps and axioms")
    h.add_argument("action", choices=["coproduct", "antipode", "axioms", "convolve"],
                   help="coproduct/antipode of a generator; five-term and "
                   "coassociativity axiom suite; convolution product of characters")
    h.add_argument("--instance", default="faa-di-bruno",
                   choices=["unshuffle", "symmetric-functions", "faa-di-bruno", "sl2", "gl2"])
    h.add_argument("--n", type=int, default=2, help="generator index x_n")
    h.add_argument("--generator", default="a", help="generator name for sl2/gl2")
    h.add_argument("--grade", type=int, default=6)
    h.add_argument("--alpha", help="JSON {n: coefficient} character values")
    h.add_argument("--beta", help="JSON {n: coefficient} character values")
    h.add_argument("--output")
    h.set_defaults(func=cmd_hopf)

    g = sub.add_parser("graphs", help="graph enumeration, power counting, symmetry")
    g.add_argument("action", choices=["enumerate", "stats", "sym", "dot", "families"],
                   help="enumerate isomorphism classes; superficial degree "
                   "omega = D L - 2 I; half-edge symmetry factor; DOT export; "
                   "divergent subgraph families of the subtraction scheme")
    g.add_argument("--k", type=int, default=2, help="external leg count")
    g.add_argument("--max-vertices", type=int, default=4)
    g.add_argument("--class", dest="graph_class", default="connected",
                   choices=["trees", "connected", "onePI"])
    g.add_argument("--sources", default="none", choices=["none", "J-leaves"])
    g.add_argument("--graph", default="oneloop-se",
                   help="named graph (oneloop-se, triangle, nested2loop, threeloop-b, "
                   "sixvertex-se, tadpole) or JSON literal")
    g.add_argument("--D", type=int, default=6, choices=[4, 6])
    g.add_argument("--format", default="json", choices=["json", "dot", "text"])
    g.add_argument("--output")
    g.set_defaults(func=cmd_graphs)

    c = sub.add_parser("ck", help="graph Hopf algebra of renormalization")
    c.add_argument("action", choices=["coproduct", "antipode", "zfactors", "inclusion", "project"],
                   help="coproduct over divergent subgraph families; recursive "
                   "antipode; renormalization factor series Z1/Z3/Zm; inclusion "
                   "of diffeomorphism coordinates via lambda_b = lambda Z1 Z3^(-3/2); "
                   "projection onto ordinary series by loop counting")
    c.add_argument("--graph", default="nested2loop")
    c.add_argument("--label", type=int, default=0, choices=[0, 2])
    c.add_argument("--max-loops", type=int, default=1)
    c.add_argument("--n", type=int, default=1, help="diffeomorphism coordinate index")
    c.add_argument("--order", type=int, default=3)
    c.add_argument("--cutoff", type=float, default=20.0)
    c.add_argument("--output")
    c.set_defaults(func=cmd_ck)

    b = sub.add_parser("bphz", help="subtraction engine and cutoff numerics")
    b.add_argument("action", choices=["integrand", "counterterm", "renormalize", "astarc", "rotabaxter"],
                   help="routed (prepared/subtracted) integrands; Taylor "
                   "counterterms; renormalized amplitude over a cutoff ladder "
                   "(Bogoliubov/BPHZ subtraction); the convolution identity "
                   "renormalized = bare * counterterm; Rota-Baxter identity checks")
    b.add_argument("--graph", default="oneloop-se")
    b.add_argument("--D", type=int, default=4, choices=[4, 6])
    b.add_argument("--p", type=float, default=1.0, help="external momentum in mass units")
    b.add_argument("--label", type=int, default=0)
    b.add_argument("--cutoff", type=float, default=10.0)
    b.add_argument("--lambda-ladder", default="10,20,40,80")
    b.add_argument("--method", default="sphere", choices=["mc", "sphere"])
    b.add_argument("--samples", type=int, default=200_000)
    b.add_argument("--seed", type=int, default=42)
    b.add_argument("--trials", type=int, default=200)
    b.add_argument("--output")
    b.set_defaults(func=cmd_bphz)

    gr = sub.add_parser("greens", help="perturbative expansions")
    gr.add_argument("action", choices=["trees", "ds", "partitions"],
                    help="classical tree expansion with source leaves; connected "
                    "k-point expansion with hbar^L lambda^V / Sym weights; full "
                    "Green's functions as set partitions of connected ones")
    gr.add_argument("--k", type=int, default=2)
    gr.add_argument("--sources", default="J0", choices=["J0", "Jext"])
    gr.add_argument("--max-order", type=int, default=4)
    gr.add_argument("--output")
    gr.set_defaults(func=cmd_greens)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # computation failure
        print(f"computation failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
