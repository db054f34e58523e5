"""Command-line front end.

    commclass count --quantity c --n 2 --q 2 --k 2 --method chain
    commclass graph --n 3 --q 2 --format dot --out g.dot
    commclass table --n 2,3,4 --q 2 --k-max 3
    commclass asymptotics --n 2 --q 2 --k-max 20
    commclass witness --n 4 --q 2

Exit codes: 0 success, 2 usage error, 3 scale-guard refusal, 4 internal
consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
from decimal import Context, Decimal
from fractions import Fraction

from . import branch, counting
from .algebra import is_commutative, max_commutative_dim
from .errors import ConsistencyError, ScaleGuardError
from .field import FieldError, FqContext, fq_make, is_prime, prime_power
from .grp import unit_group
from .witness import witness_tuple

EXIT_USAGE = 2
EXIT_GUARD = 3
EXIT_CONSISTENCY = 4


class UsageError(Exception):
    pass


def parse_q(text: str, modulus: str | None = None) -> FqContext:
    m = re.fullmatch(r"\s*(\d+)\s*(?:\^\s*(\d+))?\s*", text)
    if not m:
        raise UsageError(f"cannot parse q = {text!r}; use p or p^e")
    if m.group(2) is not None:
        p, e = int(m.group(1)), int(m.group(2))
        if not is_prime(p):
            raise UsageError(f"{p} is not prime")
    else:
        try:
            p, e = prime_power(int(m.group(1)))
        except FieldError as err:
            raise UsageError(str(err)) from None
    mod = None
    if modulus:
        mod = [int(c) for c in modulus.split(",")]
    try:
        return fq_make(p, e, mod)
    except FieldError as err:
        raise UsageError(str(err)) from None


def fixed(x: Fraction, digits: int = 12) -> str:
    """Fixed-point decimal rendering; never scientific notation."""
    x = Fraction(x)
    whole = len(str(abs(x.numerator) // x.denominator))
    ctx = Context(prec=whole + digits + 5)
    d = ctx.divide(Decimal(x.numerator), Decimal(x.denominator))
    return format(d.quantize(Decimal(1).scaleb(-digits), context=ctx), "f")


def _emit(text: str, out: str | None) -> None:
    if out:
        try:
            with open(out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as err:
            raise UsageError(f"cannot write {out}: {err}") from None
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# commands ----------------------------------------------------------------


def compute_count(quantity: str, method: str, n: int, ctx: FqContext, k: int, workers: int = 1, force: bool = False) -> int:
    if k == 0:
        return 1
    if quantity == "a":
        if method != "burnside":
            raise UsageError("quantity a is only available with --method burnside")
        return counting.burnside_count(n, ctx, k, workers, force)
    if method == "partition":
        if quantity != "c" or k != 1:
            raise UsageError("--method partition computes c with k = 1 only")
        return counting.classes_by_partition(n, ctx.q)
    if method == "burnside":
        raise UsageError("--method burnside computes quantity a only")
    if method == "brute":
        if quantity == "c":
            return counting.brute_simclasses_commuting(n, ctx, k, workers, force)
        return counting.brute_commuting_tuples(n, ctx, k, force)
    if method == "chain":
        g = branch.build_branch_graph(n, ctx, workers, force)
        if quantity == "c":
            return branch.walk_count_classes(g, k)
        return branch.walk_count_tuples(g, k)
    raise UsageError(f"unknown method {method}")


def cmd_count(args) -> None:
    ctx = parse_q(args.q, args.modulus)
    value = compute_count(args.quantity, args.method, args.n, ctx, args.k, args.workers, args.force)
    if args.format == "json":
        rec = {
            "n": args.n,
            "q": ctx.q,
            "k": args.k,
            "quantity": args.quantity,
            "method": args.method,
            "value": str(value),
        }
        _emit(_dumps(rec), args.out)
    else:
        _emit(f"{value}\n", args.out)


def cmd_graph(args) -> None:
    ctx = parse_q(args.q, args.modulus)
    g = branch.build_branch_graph(args.n, ctx, args.workers, args.force)
    if args.format == "dot":
        _emit(g.to_dot(), args.out)
    else:
        _emit(_dumps(g.to_json()), args.out)


def table_rows(ns, qs, k_max, method="auto", brute_limit=1024, workers=1, force=False, modulus=None):
    """Rows (n, q, k, c_value, method, note) for every requested cell."""
    graphs: dict = {}
    rows = []
    for n in ns:
        for qtext in qs:
            ctx = parse_q(str(qtext), modulus)
            for k in range(1, k_max + 1):
                use = method
                if use == "auto":
                    use = "brute" if ctx.q ** (n * n * k) <= brute_limit else "chain"
                try:
                    if use == "brute":
                        value = counting.brute_simclasses_commuting(n, ctx, k, workers, force)
                    else:
                        key = (n, ctx.q)
                        if key not in graphs:
                            graphs[key] = branch.build_branch_graph(n, ctx, workers, force)
                        g = graphs[key]
                        if isinstance(g, Exception):
                            raise g
                        value = branch.walk_count_classes(g, k)
                    rows.append((n, ctx.q, k, str(value), use, ""))
                except ScaleGuardError as err:
                    if use == "chain":
                        graphs[(n, ctx.q)] = err
                    rows.append((n, ctx.q, k, "", use, f"scale guard: {err}"))
    return rows


def cmd_table(args) -> None:
    ns = [int(x) for x in str(args.n).split(",")]
    qs = [x for x in str(args.q).split(",")]
    rows = table_rows(ns, qs, args.k_max, args.method, args.brute_limit, args.workers, args.force, args.modulus)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "q", "k", "c_value", "method", "note"])
    w.writerows(rows)
    _emit(buf.getvalue(), args.out)


def render_report(rep: branch.AsymptoticReport) -> str:
    lines = [f"n={rep.n} q={rep.q} m(n)={rep.m} q^m={rep.q_m}", ""]
    lines.append("k\tc\tC\tc/q^(mk)\tC/q^(mk)\tc(k+1)/c(k)")
    for r in rep.rows:
        ratio = "-" if r.ratio is None else fixed(r.ratio)
        lines.append(f"{r.k}\t{r.c}\t{r.C}\t{fixed(r.c_norm)}\t{fixed(r.C_norm)}\t{ratio}")
    lines.append("")
    lines.append(f"limit c/q^(mk) = {rep.c_limit} = {fixed(rep.c_limit)}")
    lines.append(f"limit C/q^(mk) = {rep.C_limit} = {fixed(rep.C_limit)}")
    if rep.witness_c1 is not None:
        lines.append(f"witness-chain lower constants: C1 = {rep.witness_c1}, D1 = {rep.witness_d1}")
    lines.append(
        f"upper series with node count {rep.node_count} as surrogate for the number of subalgebras: "
        f"{fixed(rep.c2_surrogate, 3)}"
    )
    lines.append(
        f"m(n)={rep.m} q^m(n)={rep.q_m} "
        f"C1,C2=[{fixed(rep.c1_emp)}, {fixed(rep.c2_emp)}] "
        f"D1,D2=[{fixed(rep.d1_emp)}, {fixed(rep.d2_emp)}]"
    )
    return "\n".join(lines) + "\n"


def cmd_asymptotics(args) -> None:
    if args.k_max < 2:
        raise UsageError("--k-max must be >= 2")
    ctx = parse_q(args.q, args.modulus)
    g = branch.build_branch_graph(args.n, ctx, args.workers, args.force)
    rep = branch.asymptotic_report(g, args.k_max)
    if args.format == "json":
        _emit(_dumps(rep.to_json()), args.out)
    else:
        _emit(render_report(rep), args.out)


def cmd_witness(args) -> None:
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    ctx = parse_q(args.q, args.modulus)
    w = witness_tuple(args.n, ctx)
    z = w.centralizer()
    m = max_commutative_dim(args.n)
    out = []
    for i, a in enumerate(w.mats, 1):
        out.append(f"A_{i} =")
        out.append(a.pretty())
        out.append("")
    out.append(f"pairwise commuting: {'yes' if w.pairwise_commuting() else 'no'}")
    rel = "=" if z.dim == m else "!="
    out.append(
        f"centralizer dim {z.dim} {rel} m({args.n}), commutative: {'yes' if is_commutative(z) else 'no'}"
    )
    out.append(f"m({args.n}) = {m}")
    if ctx.q**z.dim <= 2**20:
        out.append(f"unit group order {unit_group(z).order}")
    _emit("\n".join(out) + "\n", args.out)


# argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--q", default="2", help="field size as p or p^e")
    shared.add_argument("--modulus", help="comma-separated coefficients, lowest degree first")
    shared.add_argument("--out", help="write output to this path")
    shared.add_argument("--workers", type=int, default=1)
    shared.add_argument("--force", action="store_true", help="bypass scale guards")

    parser = argparse.ArgumentParser(prog="commclass", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", parents=[shared], help="count a(n,k,q), c(n,k,q) or C(n,k,q)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--quantity", choices=["a", "c", "C"], default="c")
    p.add_argument("--method", choices=["partition", "burnside", "brute", "chain"], default="chain")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("graph", parents=[shared], help="build and export the branching graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=["json", "dot"], default="json")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("table", parents=[shared], help="CSV table of c(n,k,q)")
    p.add_argument("--n", default="2,3,4", help="comma-separated list")
    p.add_argument("--k-max", type=int, default=3)
    p.add_argument("--method", choices=["auto", "brute", "chain"], default="auto")
    p.add_argument(
        "--brute-limit",
        type=int,
        default=1024,
        help="auto mode uses brute force when q^(n^2 k) is at most this",
    )
    p.add_argument("--format", choices=["csv"], default="csv")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("asymptotics", parents=[shared], help="growth of c and C against q^(m(n) k)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k-max", type=int, default=20)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_asymptotics)

    p = sub.add_parser("witness", parents=[shared], help="print the maximal commutative witness tuple")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=["text"], default="text")
    p.set_defaults(func=cmd_witness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "n", 1) is not None and isinstance(args.n, int) and args.n < 1:
        parser.error("--n must be >= 1")
    if getattr(args, "k", 0) < 0:
        parser.error("--k must be >= 0")
    if args.force:
        print("warning: scale guards disabled", file=sys.stderr)
    try:
        args.func(args)
    except UsageError as err:
        print(f"commclass: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except ScaleGuardError as err:
        print(f"commclass: refused: {err}", file=sys.stderr)
        return EXIT_GUARD
    except ConsistencyError as err:
        print(f"commclass: consistency failure: {err}", file=sys.stderr)
        return EXIT_CONSISTENCY
    return 0


if __name__ == "__main__":
    sys.exit(main())
