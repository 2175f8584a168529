"""etacong command line.

Every subcommand writes newline-delimited JSON records (schema 1) to stdout
or --out.  --format table prints the same records as aligned text instead.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from importlib.metadata import PackageNotFoundError, version

from .conditionc import ConditionCError, check_condition_c
from .congruence import (INTEGRAL_EXPONENT_CLASSICAL, INTEGRAL_EXPONENT_FULL, CongruenceError,
                         candidates, index_mu, is_interesting, search_parameters,
                         verify_congruence)
from .cyclotomic import CyclotomicElement
from .etaquotient import (Cusp, EtaQuotientError, InternalConsistencyError, cusp_representatives,
                          expand_at_cusp, expand_at_infinity, invariants, ord_at_cusp,
                          parse_eta_quotient, total_order)
from .families import FAMILIES, OracleError, eta_oracle, get_family
from .qseries import IntegerRing, ResidueRing
from .subprocess_oracle import SubprocessOracle, partition_index_map

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_ORACLE, EXIT_INTERNAL = 0, 2, 3, 4

log = logging.getLogger("etacong")


class UsageError(Exception):
    pass


def toolchain_version() -> str:
    try:
        return version("artifact")
    except PackageNotFoundError:
        return "dev"


# --------------------------------------------------------------------------
# output
# --------------------------------------------------------------------------

def jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, CyclotomicElement):
        return {"conductor": x.M, "powers": [[t, jsonable(c)] for t, c in x.to_powers()]}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "item"):       # numpy scalars
        return x.item()
    return x


def dumps(record: dict) -> str:
    return json.dumps(jsonable(record), sort_keys=True, separators=(",", ":"))


class Writer:
    """Single sink for all records."""

    def __init__(self, path: str | None, fmt: str):
        self.fmt = fmt
        self.fh = open(path, "w") if path else sys.stdout

    def emit(self, kind: str, body: dict) -> None:
        rec = {"schema": SCHEMA, "kind": kind, "version": toolchain_version(), **body}
        if self.fmt == "table":
            self.fh.write(format_table(rec) + "\n")
        else:
            self.fh.write(dumps(rec) + "\n")
        self.fh.flush()

    def close(self):
        if self.fh is not sys.stdout:
            self.fh.close()


def format_table(rec: dict) -> str:
    rec = jsonable(rec)
    lines = []
    rows = None
    for k, v in rec.items():
        if k in ("schema", "version"):
            continue
        if isinstance(v, list) and v and isinstance(v[0], dict):
            rows = (k, v)
            continue
        lines.append(f"{k:>22}: {json.dumps(v) if isinstance(v, (dict, list)) else v}")
    if rows:
        name, items = rows
        cols = list(items[0])
        table = [cols] + [[json.dumps(it.get(c)) if isinstance(it.get(c), (dict, list))
                           else str(it.get(c)) for c in cols] for it in items]
        widths = [max(len(r[i]) for r in table) for i in range(len(cols))]
        lines.append(f"{name}:")
        for r in table:
            lines.append("  " + "  ".join(x.rjust(w) for x, w in zip(r, widths)))
    return "\n".join(lines)


# --------------------------------------------------------------------------
# argument helpers
# --------------------------------------------------------------------------

def resolve_eta(args):
    fam = getattr(args, "family", None)
    if fam:
        try:
            family = get_family(fam)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if args.eta and parse_eta_quotient(args.eta).notation() != family.quotient.notation():
            raise UsageError(f"--family {fam} conflicts with {args.eta}")
        return family.quotient, family
    if not args.eta:
        raise UsageError("give an eta quotient like 1:-2,2:1 or --family NAME")
    return parse_eta_quotient(args.eta), None


def parse_cusp(text: str, N: int) -> Cusp:
    text = text.strip()
    if text in ("oo", "inf", "infinity", "1/0"):
        return Cusp(1, 0, N)
    try:
        a, c = (int(x) for x in text.split("/"))
    except ValueError:
        raise UsageError(f"bad cusp {text!r}; use a/c or oo") from None
    if c <= 0 or N % c:
        raise UsageError(f"cusp denominator must be a positive divisor of {N}")
    if c == N:
        return Cusp(1, 0, N)
    for s in cusp_representatives(N):
        if s.c == c and (a - s.a) % math.gcd(c, N // c) == 0:
            return s
    raise UsageError(f"{text} is not a cusp of Gamma0({N})")


def int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers, got {text!r}") from None


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_info(args, out: Writer) -> int:
    X, _ = resolve_eta(args)
    inv = invariants(X)
    N = inv.level
    cusps = []
    for s in cusp_representatives(N):
        cusps.append({"cusp": s.label(), "width": s.width, "order": ord_at_cusp(X, s)})
    out.emit("info", {
        "eta": X.notation(), "weight": inv.weight, "level": N, "level4": inv.level4,
        "character_squareclass": inv.character_squareclass,
        "character_order": inv.character_order, "half_integral": inv.half_integral,
        "cusp_count": len(cusps), "total_order": total_order(X),
        "index": index_mu(N), "cusps": cusps})
    return EXIT_OK


def cmd_expand(args, out: Writer) -> int:
    X, _ = resolve_eta(args)
    prec = Fraction(args.prec if args.prec is not None else 20)
    ring = ResidueRing(args.mod) if args.mod else IntegerRing()
    f = expand_at_infinity(X, prec, ring)
    terms = [[e, c] for e, c in sorted(f.terms().items())]
    out.emit("expansion", {"eta": X.notation(), "cusp": "oo", "precision": prec,
                           "modulus": args.mod, "terms": terms})
    return EXIT_OK


def cmd_cusp_expand(args, out: Writer) -> int:
    X, _ = resolve_eta(args)
    N = invariants(X).level
    cusps = [parse_cusp(args.cusp, N)] if args.cusp else cusp_representatives(N)
    T = args.terms if args.terms is not None else 5
    for s in cusps:
        E = expand_at_cusp(X, s, T)
        out.emit("cusp-expansion", {
            "eta": X.notation(), "cusp": s.label(), "width": s.width, "order": E.order,
            "r_s": E.r_s, "scalar_squared": E.scalar_squared, "conductor": E.conductor,
            "terms": [[e, c] for e, c in sorted(E.series.terms().items())]})
    return EXIT_OK


def cmd_condition_c(args, out: Writer) -> int:
    X, _ = resolve_eta(args)
    for ell in args.ell:
        res = check_condition_c(X, ell)
        out.emit("condition-c", {"eta": X.notation(), **res.to_json()})
    return EXIT_OK


def _params(args, X, ell):
    return search_parameters(X, ell, args.j, args.epsilon,
                             integral_exponent=args.integral_exponent,
                             plus_one=args.sturm_plus_one, strict_beta=args.strict_beta)


def cmd_params(args, out: Writer) -> int:
    X, _ = resolve_eta(args)
    for ell in args.ell:
        p = _params(args, X, ell)
        out.emit("params", {**p.to_json(), "candidate_modulus": p.candidate_modulus})
    return EXIT_OK


def make_oracle(args, X, family, modulus: int):
    if args.oracle:
        imap = partition_index_map if family is not None and family.name == "partition" else None
        return SubprocessOracle(args.oracle, modulus, index_map=imap, cache_dir=args.cache_dir,
                                batch_size=args.batch_size, timeout=args.timeout)
    return eta_oracle(X, modulus, 0, mode=args.mode)


def load_checkpoint(path: str, params: dict) -> dict[int, dict]:
    done = {}
    if not path or not os.path.exists(path):
        return done
    with open(path) as fh:
        for line in fh:
            try:
                rec = json.loads(line)
            except json.JSONDecodeError:
                break           # torn final line from an interrupted run
            if rec.get("kind") == "search" and rec.get("params") != params:
                raise UsageError(f"{path} was written with different search parameters")
            if rec.get("kind") == "candidate":
                done[rec["Q"]] = rec
    return done


def cmd_search(args, out_path: str | None, fmt: str) -> int:
    X, family = resolve_eta(args)
    if len(args.ell) != 1:
        raise UsageError("search takes a single --ell")
    p = _params(args, X, args.ell[0])
    if args.q is not None:
        Qs = [Q for Q in args.q if Q in candidates(p, Q, Q)]
        skipped = sorted(set(args.q) - set(Qs))
        if skipped:
            raise UsageError(f"not candidates (need prime Q = -1 mod {p.candidate_modulus}): {skipped}")
    else:
        if args.qmax is None:
            raise UsageError("search needs --qmax or --q")
        Qs = candidates(p, args.qmax, args.qmin)
    done = load_checkpoint(out_path, jsonable(p.to_json())) if args.resume else {}
    oracle = make_oracle(args, X, family, args.mod or p.modulus)
    if Qs:
        per = (lambda Q: Q * Q * p.sturm_n0) if p.half_integral else (lambda Q: Q * p.sturm_n0)
        oracle.reserve(max(per(Q) for Q in Qs if Q not in done) if set(Qs) - set(done) else 0)
    todo = [Q for Q in Qs if Q not in done]
    results: dict[int, dict] = {Q: done[Q] for Q in Qs if Q in done}

    def work(Q):
        t0 = time.perf_counter()
        rep = is_interesting(oracle, p, Q)
        log.info("Q=%d %s (%.1fs)", Q, rep.verdict, time.perf_counter() - t0)
        return Q, rep.to_json()

    writer = Writer(out_path, fmt)
    status = EXIT_OK
    try:
        writer.emit("search", {"eta": X.notation(), "params": p.to_json(),
                               "candidates": Qs, "oracle": args.oracle or "builtin"})
        # records go out in Q order as soon as the prefix is complete
        nxt = 0

        def flush():
            nonlocal nxt
            while nxt < len(Qs) and Qs[nxt] in results:
                rec = dict(results[Qs[nxt]])
                for k in ("schema", "kind", "version"):
                    rec.pop(k, None)
                writer.emit("candidate", rec)
                nxt += 1

        flush()
        jobs = max(1, args.jobs or os.cpu_count() or 1)
        if jobs == 1:
            for Q in todo:
                Q, rec = work(Q)
                results[Q] = rec
                flush()
        else:
            with ThreadPoolExecutor(jobs) as ex:
                futs = [ex.submit(work, Q) for Q in todo]
                for f in futs:
                    Q, rec = f.result()
                    results[Q] = rec
                    flush()
        summary = {v: sorted(Q for Q in Qs if results[Q]["verdict"] == v)
                   for v in ("interesting", "failed")}
        writer.emit("summary", {"eta": X.notation(), "ell": p.ell, "j": p.j, **summary})
    finally:
        writer.close()
    return status


def cmd_verify(args, out: Writer) -> int:
    X, family = resolve_eta(args)
    if len(args.ell) != 1 or not args.q or len(args.q) != 1:
        raise UsageError("verify takes a single --ell and a single --q")
    ell, Q = args.ell[0], args.q[0]
    eps = args.epsilon
    if eps is None:
        cc = check_condition_c(X, ell)
        if not cc.holds:
            raise UsageError(f"Condition C fails at ell={ell}")
        eps = cc.epsilon
    oracle = make_oracle(args, X, family, args.mod or ell**args.j)
    rep = verify_congruence(oracle, X, ell, args.j, eps, Q, args.nmax)
    out.emit("verify", rep.to_json())
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="etacong", description="Eta quotients, Condition C and "
                                 "interesting-prime searches.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, ell=False):
        p.add_argument("eta", nargs="?", help="eta quotient, e.g. 1:-2,2:1")
        p.add_argument("--family", choices=sorted(FAMILIES))
        p.add_argument("--out", help="write records here instead of stdout")
        p.add_argument("--format", choices=("json", "table"), default="json")
        if ell:
            p.add_argument("--ell", type=int_list, required=True, help="prime(s), comma separated")
            p.add_argument("--j", type=int, default=1)
            p.add_argument("--epsilon", type=int, choices=(-1, 0, 1))
            p.add_argument("--sturm-plus-one", action="store_true",
                           help="use floor(...) + 1 for the Sturm bound")
            p.add_argument("--strict-beta", action="store_true",
                           help="require ell^beta * ord > -v0 instead of >=")
            p.add_argument("--integral-exponent", default=INTEGRAL_EXPONENT_FULL,
                           choices=(INTEGRAL_EXPONENT_FULL, INTEGRAL_EXPONENT_CLASSICAL))

    def oracle_opts(p):
        p.add_argument("--mod", type=int, help="oracle modulus (default ell^j)")
        p.add_argument("--oracle", metavar="CMD", help="external coefficient backend")
        p.add_argument("--mode", choices=("auto", "dense", "sampled"), default="auto")
        p.add_argument("--cache-dir")
        p.add_argument("--batch-size", type=int, default=256)
        p.add_argument("--timeout", type=float, default=3600.0)

    p = sub.add_parser("info", help="invariants and cusp orders")
    common(p)
    p = sub.add_parser("expand", help="expansion at infinity")
    common(p)
    p.add_argument("--prec", type=Fraction, help="exponents below this (default 20)")
    p.add_argument("--mod", type=int)
    p = sub.add_parser("cusp-expand", help="expansion at one or all cusps")
    common(p)
    p.add_argument("--cusp", help="a/c or oo (default: every cusp)")
    p.add_argument("--terms", type=int)
    p = sub.add_parser("condition-c", help="decide Condition C")
    common(p, ell=True)
    p = sub.add_parser("params", help="beta, kappa and the Sturm bound")
    common(p, ell=True)
    p = sub.add_parser("search", help="test candidate primes Q")
    common(p, ell=True)
    oracle_opts(p)
    p.add_argument("--q", type=int_list, help="explicit candidate(s)")
    p.add_argument("--qmax", type=int)
    p.add_argument("--qmin", type=int, default=2)
    p.add_argument("--jobs", type=int, default=0, help="worker threads (default: all cores)")
    p.add_argument("--resume", action="store_true", help="keep finished candidates from --out")
    p = sub.add_parser("verify", help="check the congruences directly")
    common(p, ell=True)
    oracle_opts(p)
    p.add_argument("--q", type=int_list, required=True)
    p.add_argument("--nmax", type=int, default=10)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(asctime)s %(name)s %(message)s", stream=sys.stderr)
    handlers = {"info": cmd_info, "expand": cmd_expand, "cusp-expand": cmd_cusp_expand,
                "condition-c": cmd_condition_c, "params": cmd_params, "verify": cmd_verify}
    try:
        if args.command == "search":
            return cmd_search(args, args.out, args.format)
        out = Writer(args.out, args.format)
        try:
            return handlers[args.command](args, out)
        finally:
            out.close()
    except (UsageError, EtaQuotientError, ConditionCError, CongruenceError) as exc:
        print(f"etacong: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleError as exc:
        print(f"etacong: oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except (InternalConsistencyError, AssertionError) as exc:
        print(f"etacong: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
