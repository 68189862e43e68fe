"""Command-line front end.

Subcommands parse functor expressions, orchestrate the computational
modules, and render results as text or JSON (same numbers in both).  The
structure-constant cache is loaded before and persisted after every run.

Exit codes: 0 success, 2 parse/usage error, 3 guard refusal, 4 invariant
failure (a check suite went red), 5 internal inconsistency (an oracle
mismatch, which is always a bug).
"""

from __future__ import annotations

import json
import sys

import click

from . import expr as ex
from .cache import cache_path, default_cache_dir, load_store, save_store
from .combinat import divided_power_dim
from .complexes import Complex
from .coresolution import coresolve, ext_table, symmetrization_map
from .formality import formality_verify_p2r1
from .functors import (
    GuardError,
    _ALGEBRAS,
    build_module,
    evaluate,
    hom_space,
    kuhn_dual,
    parametrize_sub,
    parametrize_sup,
    set_algebra_store_loader,
    submodule_generated,
    twist_module,
)
from .spectral import hyper_ext_ss, total_homology

EXIT_PARSE = 2
EXIT_GUARD = 3
EXIT_INVARIANT = 4
EXIT_INCONSISTENT = 5

DEFAULT_SEED = 20240801


class _Config:
    def __init__(self, p, n, imax, guard_dim, cache_dir, as_json, seed):
        self.p = p
        self.n = n
        self.imax = imax
        self.guard_dim = guard_dim
        self.cache_dir = cache_dir if cache_dir is not None else default_cache_dir()
        self.as_json = as_json
        self.seed = seed

    def base_report(self, command):
        return {
            "command": command,
            "p": self.p,
            "n": self.n,
            "seed": self.seed,
        }


def _install_cache(cfg):
    def loader(p, n, d):
        try:
            return load_store(
                cache_path(p, n, d, cfg.cache_dir),
                p,
                n,
                d,
                divided_power_dim(n * n, d),
            )
        except ValueError:
            return {}

    set_algebra_store_loader(loader)


def _persist_cache(cfg):
    for (p, n, d), alg in _ALGEBRAS.items():
        if alg._rows:
            save_store(
                cache_path(p, n, d, cfg.cache_dir), p, n, d, alg.dim, alg._rows
            )


def _emit(cfg, report, text_lines):
    if cfg.as_json:
        click.echo(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            click.echo(line)
        click.echo(f"seed: {cfg.seed}")


def _parse_expr(text):
    try:
        return ex.parse(text)
    except ex.ExprError as err:
        click.echo(f"parse error: {err}", err=True)
        sys.exit(EXIT_PARSE)


def _run(cfg, fn):
    try:
        fn()
    except GuardError as err:
        click.echo(f"guard refusal: {err}", err=True)
        sys.exit(EXIT_GUARD)
    except AssertionError as err:
        click.echo(f"internal inconsistency: {err}", err=True)
        sys.exit(EXIT_INCONSISTENT)
    finally:
        _persist_cache(cfg)


@click.group()
@click.option("--p", default=2, type=int, show_default=True, help="prime field order")
@click.option("--n", default=2, type=int, show_default=True, help="ambient dimension")
@click.option("--imax", default=4, type=int, show_default=True, help="top degree")
@click.option(
    "--guard-dim",
    default=20000,
    type=int,
    show_default=True,
    help="refuse computations whose ambient dimension exceeds this",
)
@click.option(
    "--cache-dir",
    default=None,
    type=click.Path(),
    help="structure-constant cache directory (env SPF_CACHE_DIR)",
)
@click.option("--json", "as_json", is_flag=True, help="emit JSON instead of text")
@click.option("--seed", default=DEFAULT_SEED, type=int, show_default=True)
@click.pass_context
def main(ctx, p, n, imax, guard_dim, cache_dir, as_json, seed):
    """Exact computations with strict polynomial functors over F_p."""
    if p not in (2, 3, 5, 7):
        click.echo(f"unsupported prime {p}", err=True)
        sys.exit(EXIT_PARSE)
    ctx.obj = _Config(p, n, imax, guard_dim, cache_dir, as_json, seed)
    _install_cache(ctx.obj)


@main.command("parse")
@click.argument("expression")
@click.pass_obj
def cmd_parse(cfg, expression):
    """Parse an expression; print its canonical form and degree."""
    tree = _parse_expr(expression)
    report = cfg.base_report("parse")
    report.update({"input": expression, "canonical": str(tree), "degree": tree.degree(cfg.p)})
    _emit(cfg, report, [f"canonical: {tree}", f"degree: {tree.degree(cfg.p)}"])


@main.command("ext")
@click.argument("f_expr")
@click.argument("g_expr")
@click.pass_obj
def cmd_ext(cfg, f_expr, g_expr):
    """Ext^i(F, G) for 0 <= i <= imax."""
    ftree = _parse_expr(f_expr)
    gtree = _parse_expr(g_expr)
    if ftree.degree(cfg.p) != gtree.degree(cfg.p):
        click.echo("ext requires functors of equal degree", err=True)
        sys.exit(EXIT_PARSE)

    def job():
        f = build_module(ftree, cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        g = build_module(gtree, cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        table = ext_table(f, g, cfg.imax)
        report = cfg.base_report("ext")
        report.update({"F": f_expr, "G": g_expr, "i_max": cfg.imax, "dims": table.dims})
        lines = [f"Ext^i({ftree}, {gtree}) over F_{cfg.p}, n = {cfg.n}"]
        lines += [f"  i = {i}: dim {dim}" for i, dim in enumerate(table.dims)]
        _emit(cfg, report, lines)

    _run(cfg, job)


@main.command("coresolve")
@click.argument("f_expr")
@click.pass_obj
def cmd_coresolve(cfg, f_expr):
    """Injective coresolution term dimensions and homology of F."""
    ftree = _parse_expr(f_expr)

    def job():
        f = build_module(ftree, cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        cx, aug = coresolve(f, cfg.imax)
        if aug.rank() != f.dim:
            raise AssertionError("augmentation is not injective")
        terms = [cx.dim(i) for i in range(cfg.imax + 1)]
        homology = [cx.homology_dim(i) for i in range(cfg.imax + 1)]
        if homology[0] != f.dim or any(homology[1:]):
            raise AssertionError(
                f"coresolution homology {homology} does not match the module"
            )
        report = cfg.base_report("coresolve")
        report.update(
            {"F": f_expr, "i_max": cfg.imax, "terms": terms, "homology": homology}
        )
        _emit(
            cfg,
            report,
            [
                f"coresolution of {ftree} over F_{cfg.p}, n = {cfg.n}",
                f"  term dimensions: {terms}",
                f"  homology: {homology}",
            ],
        )

    _run(cfg, job)


@main.command("formality")
@click.argument("g_expr")
@click.pass_obj
def cmd_formality(cfg, g_expr):
    """Even-concentration formality verification for G at p = 2, r = 1."""
    gtree = _parse_expr(g_expr)
    if cfg.p != 2:
        click.echo("formality verification is specific to p = 2", err=True)
        sys.exit(EXIT_PARSE)

    def job():
        n = max(cfg.n, 2 * gtree.degree(cfg.p))
        rep = formality_verify_p2r1(gtree, n=n, p=cfg.p)
        report = cfg.base_report("formality")
        report.update(rep)
        nonzero = [e["i"] for e in rep["degrees"] if e["hom_dim"]]
        lines = [f"formality of {gtree} at p = 2, r = 1 (n = {n})"]
        lines += [
            f"  degree {e['i']}: hom dim {e['hom_dim']} vs bigraded {e['bigraded_dim']}"
            for e in rep["degrees"]
        ]
        lines.append(f"  nonzero degrees: {nonzero}")
        lines.append(f"  verdict: {rep['verdict']}")
        if rep["verdict"] != "even-concentration":
            raise AssertionError("formality verification failed")
        _emit(cfg, report, lines)

    _run(cfg, job)


@main.command("hyperext")
@click.argument("c_src")
@click.argument("c_dst")
@click.argument("d_expr")
@click.option(
    "--map",
    "map_kind",
    type=click.Choice(["auto", "alpha", "zero"]),
    default="auto",
    show_default=True,
    help="differential of the two-term complex C = (C_SRC -> C_DST)",
)
@click.pass_obj
def cmd_hyperext(cfg, c_src, c_dst, d_expr, map_kind):
    """Hyper-Ext spectral sequence of C = (C_SRC -> C_DST) against D."""
    strees = _parse_expr(c_src), _parse_expr(c_dst)
    dtree = _parse_expr(d_expr)
    if strees[0].degree(cfg.p) != strees[1].degree(cfg.p):
        click.echo("complex terms must have equal degree", err=True)
        sys.exit(EXIT_PARSE)

    def job():
        fs = [build_module(t, cfg.p, cfg.n, guard_dim=cfg.guard_dim) for t in strees]
        dmod = build_module(dtree, cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        if map_kind == "zero":
            diff = None
        elif map_kind == "alpha":
            diff = symmetrization_map(cfg.p, cfg.n).matrix
        else:
            homs = hom_space(fs[0], fs[1])
            if len(homs) == 0:
                diff = None
            elif len(homs) == 1:
                diff = homs[0].matrix
            else:
                click.echo(
                    f"hom space has dimension {len(homs)}; pass --map explicitly",
                    err=True,
                )
                sys.exit(EXIT_PARSE)
        diffs = {} if diff is None else {-1: diff}
        c = Complex({-1: fs[0], 0: fs[1]}, diffs, cfg.p)
        c.check()
        ss = hyper_ext_ss(c, dmod, cfg.imax)
        tot = total_homology(ss.bic)
        e2 = {f"({s},{t})": dim for (s, t), dim in sorted(ss.page(2).items()) if dim}
        einf = ss.einf_antidiagonal_sums()
        for m, dim in tot.items():
            if einf.get(m, 0) != dim:
                raise AssertionError("E_infinity does not match total homology")
        report = cfg.base_report("hyperext")
        report.update(
            {
                "C": [c_src, c_dst],
                "map": map_kind,
                "D": d_expr,
                "i_max": cfg.imax,
                "page2": e2,
                "pages": [ss.to_json(r) for r in sorted(ss.entries)],
                "total_homology": {str(k): v for k, v in sorted(tot.items()) if v},
                "collapsed_from_2": ss.is_collapsed_from(2),
            }
        )
        lines = [f"hyper-Ext of ({strees[0]} -> {strees[1]}) against {dtree}"]
        lines.append(f"  E_2: {e2}")
        lines.append(f"  collapsed from page 2: {ss.is_collapsed_from(2)}")
        lines.append(
            "  total homology: "
            + str({k: v for k, v in sorted(tot.items()) if v})
        )
        _emit(cfg, report, lines)

    _run(cfg, job)


# ---------------------------------------------------------------------------
# invariant suites


def _suite_yoneda(cfg):
    import random

    rng = random.Random(cfg.seed)
    results = []
    recipes = ["S^2", "G^2", "T^2", "S^3"]
    rng.shuffle(recipes)
    for text in recipes:
        tree = ex.parse(text)
        d = tree.degree(cfg.p)
        f = build_module(tree, cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        gamma = build_module(ex.Div(d), cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        for v in (1, 2):
            got = len(hom_space(parametrize_sup(gamma, v), f))
            want = evaluate(f, v, guard_dim=cfg.guard_dim).dim
            results.append(
                {
                    "check": f"dim Hom(G^{{{d}V}}, {text}) = dim {text}(k^{v})",
                    "got": got,
                    "expected": want,
                    "ok": got == want,
                }
            )
    return results


def _suite_injective_pairing(cfg):
    results = []
    for text in ("S^2", "G^2", "T^2"):
        tree = ex.parse(text)
        d = tree.degree(cfg.p)
        f = build_module(tree, cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        sym = build_module(ex.Sym(d), cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        for v in (1, 2):
            got = len(hom_space(f, parametrize_sub(sym, v)))
            want = evaluate(kuhn_dual(f), v, guard_dim=cfg.guard_dim).dim
            results.append(
                {
                    "check": f"dim Hom({text}, S^{d}_V) = dim {text}#(k^{v})",
                    "got": got,
                    "expected": want,
                    "ok": got == want,
                }
            )
    return results


def _suite_adjunction(cfg):
    results = []
    pairs = [("S^2", "G^2"), ("G^2", "S^2"), ("T^2", "T^2")]
    for ftext, gtext in pairs:
        f = build_module(ex.parse(ftext), cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        g = build_module(ex.parse(gtext), cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        for v in (1, 2):
            lhs = len(hom_space(parametrize_sub(f, v), g))
            rhs = len(hom_space(f, parametrize_sup(g, v)))
            results.append(
                {
                    "check": f"Hom({ftext}_V, {gtext}) = Hom({ftext}, {gtext}^V), v={v}",
                    "got": lhs,
                    "expected": rhs,
                    "ok": lhs == rhs,
                }
            )
    return results


def _suite_untwist_of_hom(cfg):
    results = []
    pairs = [("S^2", "S^2"), ("S^2", "G^2"), ("G^2", "G^2")]
    for ftext, gtext in pairs:
        f = build_module(ex.parse(ftext), cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        g = build_module(ex.parse(gtext), cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        homs = hom_space(f, g)
        tf, tg = twist_module(f), twist_module(g)
        thoms = hom_space(tf, tg)
        ok = len(homs) == len(thoms)
        # each untwisted map must reappear (same matrix) among the twisted
        for h in homs:
            from .functors import ModuleMap

            ok = ok and ModuleMap(tf, tg, h.matrix).is_equivariant()
        results.append(
            {
                "check": f"Hom({ftext}, {gtext}) = Hom of twists",
                "got": len(thoms),
                "expected": len(homs),
                "ok": ok,
            }
        )
    return results


def _suite_exponential(cfg):
    results = []
    for d in (2, 3):
        for n1 in (1, 2):
            for n2 in (1, 2):
                total = build_module(ex.Sym(d), cfg.p, n1 + n2).dim
                # dim S^a(k^m) = dim G^a(k^m) = C(m + a - 1, a)
                split = sum(
                    divided_power_dim(n1, a) * divided_power_dim(n2, d - a)
                    for a in range(d + 1)
                )
                results.append(
                    {
                        "check": f"dim S^{d}(k^{n1} (+) k^{n2}) splits",
                        "got": total,
                        "expected": split,
                        "ok": total == split,
                    }
                )
                gtotal = build_module(ex.Div(d), cfg.p, n1 + n2).dim
                gsplit = sum(
                    divided_power_dim(n1, a) * divided_power_dim(n2, d - a)
                    for a in range(d + 1)
                )
                results.append(
                    {
                        "check": f"dim G^{d}(k^{n1} (+) k^{n2}) splits",
                        "got": gtotal,
                        "expected": gsplit,
                        "ok": gtotal == gsplit,
                    }
                )
    return results


def _suite_polarization(cfg):
    import numpy as np

    results = []
    for n in (2, 3):
        for d in (2, 3):
            g = build_module(ex.Div(d), 2, n)
            ones = np.ones(g.dim, dtype=np.uint8)
            span = submodule_generated(g, [ones])
            results.append(
                {
                    "check": f"S({n},{d}) . v^(x{d}) spans G^{d}(k^{n}) over F_2",
                    "got": span.cols,
                    "expected": g.dim,
                    "ok": span.cols == g.dim,
                }
            )
    return results


def _suite_ext_homotopy_invariance(cfg):
    from .coresolution import ext_dims

    results = []
    pairs = [("S^2", "G^2"), ("frob(1)", "frob(1)")]
    for ftext, gtext in pairs:
        f = build_module(ex.parse(ftext), cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        g = build_module(ex.parse(gtext), cfg.p, cfg.n, guard_dim=cfg.guard_dim)
        a = ext_dims(f, g, 2)
        b = ext_dims(f, g, 2, weight_order=sorted(f.by_weight))
        results.append(
            {
                "check": f"Ext({ftext}, {gtext}) independent of resolution",
                "got": b,
                "expected": a,
                "ok": a == b,
            }
        )
    return results


SUITES = {
    "yoneda": _suite_yoneda,
    "injective-pairing": _suite_injective_pairing,
    "adjunction": _suite_adjunction,
    "untwist-of-hom": _suite_untwist_of_hom,
    "exponential": _suite_exponential,
    "polarization": _suite_polarization,
    "ext-homotopy-invariance": _suite_ext_homotopy_invariance,
}


@main.command("check")
@click.argument("suite", type=click.Choice(sorted(SUITES) + ["all"]))
@click.pass_obj
def cmd_check(cfg, suite):
    """Run a named invariant suite; exit 4 on any failure."""
    names = sorted(SUITES) if suite == "all" else [suite]

    def job():
        all_results = {}
        for name in names:
            all_results[name] = SUITES[name](cfg)
        ok = all(r["ok"] for rs in all_results.values() for r in rs)
        report = cfg.base_report("check")
        report.update({"suites": all_results, "ok": ok})
        lines = []
        for name, rs in all_results.items():
            lines.append(f"suite {name}:")
            for r in rs:
                status = "pass" if r["ok"] else "FAIL"
                lines.append(
                    f"  [{status}] {r['check']}: got {r['got']}, expected {r['expected']}"
                )
        lines.append("all checks passed" if ok else "FAILURES present")
        _emit(cfg, report, lines)
        if not ok:
            sys.exit(EXIT_INVARIANT)

    _run(cfg, job)


if __name__ == "__main__":
    main()
