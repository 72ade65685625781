"""Command-line interface.

Words use the grammar  TOKEN := ('a'|'A') DIGITS POW? | ('s'|'S') POW?  with
POW = '^' SIGNED_INT; uppercase means inverse, tokens are space-separated.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .words import WordError, format_word, free_reduce, parse_word, reduce_a_word
from .automorphism import BudgetError, apply_phi_power, letter_image_length
from .pieces import decompose, rank
from .group import HElem, h_equal, normal_form
from .free_conjugacy import conjugate_in_f
from .twisted import (
    BoundPolicy,
    solve_0_twisted,
    solve_h_twisted,
    solve_i_twisted,
)
from .engine import decide_conjugacy
from .hnn import collins_decide
from .oracle import oracle_conjugate
from . import bench

EXIT_OK = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_INCONCLUSIVE = 3


def _policy_from_args(args) -> BoundPolicy:
    fields = {}
    if getattr(args, "policy_file", None):
        for line in Path(args.policy_file).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            fields[key.strip()] = value.strip()
    mapping = {
        "k_multiplier": float,
        "r_slack": int,
        "qp_multiplier": float,
        "hard_cap": int,
    }
    kwargs = {}
    for key, conv in mapping.items():
        if key in fields:
            kwargs[key] = conv(fields[key])
        arg = getattr(args, key, None)
        if arg is not None:
            kwargs[key] = arg
    return BoundPolicy(**kwargs)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="hydra", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("phi", help="apply a power of the defining automorphism")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--power", type=int, required=True)
    p.add_argument("word")

    p = sub.add_parser("phi-growth", help="letter image lengths as CSV")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--max-power", type=int, required=True)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("pieces", help="rank-i piece decomposition")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--at", type=int, default=None)
    p.add_argument("word")

    p = sub.add_parser("nf", help="normal form u~ s^p")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.add_argument("word")

    p = sub.add_parser("eq", help="word problem: exit 0 iff equal in H")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("word1")
    p.add_argument("word2")

    p = sub.add_parser("fconj", help="conjugacy in the free group")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("word1")
    p.add_argument("word2")

    p = sub.add_parser("twisted", help="one twisted-conjugacy solver")
    p.add_argument("kind", choices=["zero", "i", "h"])
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("-p", type=int, default=0)
    p.add_argument("--k-mult", dest="k_multiplier", type=float, default=None)
    p.add_argument("--qp-mult", dest="qp_multiplier", type=float, default=None)
    p.add_argument("--r-slack", dest="r_slack", type=int, default=None)
    p.add_argument("--cap", dest="hard_cap", type=int, default=None)
    p.add_argument("u_tilde")
    p.add_argument("v_tilde")

    p = sub.add_parser("conj", help="conjugacy in H (exit 0/1/2/3)")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--method", choices=["steps", "hnn"], default="steps")
    p.add_argument("--policy-file", type=str, default=None)
    p.add_argument("--json", action="store_true")
    p.add_argument("--raw", action="store_true", help="also report the uncompressed witness")
    p.add_argument("--batch", type=Path, default=None, help="TSV file of word pairs")
    p.add_argument("--k-mult", dest="k_multiplier", type=float, default=None)
    p.add_argument("--qp-mult", dest="qp_multiplier", type=float, default=None)
    p.add_argument("--r-slack", dest="r_slack", type=int, default=None)
    p.add_argument("--cap", dest="hard_cap", type=int, default=None)
    p.add_argument("words", nargs="*")

    p = sub.add_parser("oracle", help="brute-force BFS conjugator search")
    p.add_argument("mode", choices=["conj"])
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--cap", type=int, required=True)
    p.add_argument("word1")
    p.add_argument("word2")

    p = sub.add_parser("growth", help="growth and distortion CSV (+ figure)")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--i-set", type=str, default=None, help="comma-separated subscripts")
    p.add_argument("--max-power", type=int, default=20)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--plot", action="store_true")

    p = sub.add_parser("cl-bench", help="conjugator length scaling (+ figure)")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--sizes", type=str, default="10,20,40,80")
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--plot", action="store_true")

    p = sub.add_parser("rt-bench", help="decision runtime scaling (+ figure)")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--sizes", type=str, default="8,16,32,64")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--plot", action="store_true")

    try:
        args = parser.parse_args(argv)
        return _dispatch(args)
    except (WordError, BudgetError, OverflowError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _dispatch(args) -> int:
    cmd = args.command
    if cmd == "phi":
        w = reduce_a_word(parse_word(args.word, args.rank, allow_s=False))
        print(format_word(apply_phi_power(w, args.power)))
        return EXIT_OK

    if cmd == "phi-growth":
        lines = ["i,r,exact_length,binomial_length"]
        for i in range(1, args.rank + 1):
            for r in range(-args.max_power, args.max_power + 1):
                exact = len(apply_phi_power((i,), r))
                lines.append(f"{i},{r},{exact},{letter_image_length(i, r)}")
        text = "\n".join(lines) + "\n"
        if args.out:
            args.out.write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    if cmd == "pieces":
        w = reduce_a_word(parse_word(args.word, args.rank, allow_s=False))
        at = args.at if args.at is not None else max(rank(w), 1)
        for piece in decompose(w, at).pieces:
            print(f"{piece.ptype.value:<6} rank {piece.rank}  {format_word(piece.word)}")
        return EXIT_OK

    if cmd == "nf":
        nf = normal_form(parse_word(args.word, args.rank))
        if args.json:
            print(json.dumps({"u_tilde": format_word(nf.u_tilde), "s_exp": nf.s_exp}))
        else:
            print(f"{format_word(nf.u_tilde)} | s^{nf.s_exp}")
        return EXIT_OK

    if cmd == "eq":
        a = normal_form(parse_word(args.word1, args.rank))
        b = normal_form(parse_word(args.word2, args.rank))
        return EXIT_OK if h_equal(a, b) else EXIT_NO

    if cmd == "fconj":
        u = reduce_a_word(parse_word(args.word1, args.rank, allow_s=False))
        v = reduce_a_word(parse_word(args.word2, args.rank, allow_s=False))
        w = conjugate_in_f(u, v)
        if w is None:
            print("not conjugate")
            return EXIT_NO
        print(format_word(w))
        return EXIT_OK

    if cmd == "twisted":
        policy = _policy_from_args(args)
        u = reduce_a_word(parse_word(args.u_tilde, args.rank, allow_s=False))
        v = reduce_a_word(parse_word(args.v_tilde, args.rank, allow_s=False))
        if args.kind == "zero":
            out = solve_0_twisted(u, v, args.rank, policy)
        elif args.kind == "i":
            out = solve_i_twisted(u, v, args.p, args.rank, policy)
        else:
            out = solve_h_twisted(u, v, args.p, args.rank, policy)
        sol = out.solution
        print(
            json.dumps(
                {
                    "found": out.found,
                    "r": sol.r if sol else None,
                    "w_tilde": format_word(sol.w_tilde) if sol else None,
                    "method": sol.method if sol else None,
                    "inconclusive": out.inconclusive,
                }
            )
        )
        return EXIT_OK if out.found else (EXIT_INCONCLUSIVE if out.inconclusive else EXIT_NO)

    if cmd == "conj":
        return _run_conj(args)

    if cmd == "oracle":
        u = normal_form(parse_word(args.word1, args.rank))
        v = normal_form(parse_word(args.word2, args.rank))
        w = oracle_conjugate(u, v, args.cap, args.rank)
        if w is None:
            print("not found within cap")
            return EXIT_NO
        print(format_word(w))
        return EXIT_OK

    if cmd == "growth":
        i_set = (
            [int(t) for t in args.i_set.split(",")]
            if args.i_set
            else list(range(1, args.rank + 1))
        )
        rows, distortion = bench.run_growth(args.rank, i_set, args.max_power)
        bench.write_csv(args.out, bench.GROWTH_HEADER, rows)
        dist_path = args.out.with_suffix(".distortion.csv")
        bench.write_csv(dist_path, bench.DISTORTION_HEADER, distortion)
        if args.plot:
            bench.plot_growth(rows, args.out.with_suffix(".png"))
        print(f"wrote {args.out} and {dist_path}")
        return EXIT_OK

    if cmd == "cl-bench":
        sizes = [int(t) for t in args.sizes.split(",")]
        rows, summary = bench.run_cl_experiment(args.rank, sizes, args.samples, args.seed)
        bench.write_csv(args.out, bench.CL_HEADER, rows)
        args.out.with_suffix(".summary.json").write_text(json.dumps(summary, indent=2))
        if args.plot:
            bench.plot_cl(rows, summary, args.out.with_suffix(".png"))
        print(json.dumps(summary))
        return EXIT_OK

    if cmd == "rt-bench":
        sizes = [int(t) for t in args.sizes.split(",")]
        rows, summary = bench.run_rt_experiment(args.rank, sizes, args.samples, args.seed)
        bench.write_csv(args.out, bench.RT_HEADER, rows)
        args.out.with_suffix(".summary.json").write_text(json.dumps(summary, indent=2))
        if args.plot:
            bench.plot_rt(rows, summary, args.out.with_suffix(".png"))
        print(json.dumps(summary))
        return EXIT_OK

    raise WordError(f"unknown command {cmd}")


def _run_conj(args) -> int:
    policy = _policy_from_args(args)

    def decide_pair(text1: str, text2: str) -> dict:
        w1 = parse_word(text1, args.rank)
        w2 = parse_word(text2, args.rank)
        if args.method == "hnn":
            cert = collins_decide(w1, w2, args.rank)
        else:
            cert = decide_conjugacy(w1, w2, args.rank, policy)
        payload = {
            "conjugate": cert.conjugate,
            "witness": format_word(cert.witness) if cert.witness is not None else None,
            "method": cert.method,
            "inconclusive": cert.inconclusive,
            "verified": cert.verified,
        }
        if args.raw and cert.raw_witness is not None:
            payload["raw_witness"] = format_word(cert.raw_witness)
        return payload

    if args.batch is not None:
        worst = EXIT_OK
        for line in args.batch.read_text().splitlines():
            if not line.strip():
                continue
            left, _, right = line.partition("\t")
            payload = decide_pair(left, right)
            print(json.dumps(payload))
            code = (
                EXIT_OK
                if payload["conjugate"]
                else (EXIT_INCONCLUSIVE if payload["inconclusive"] else EXIT_NO)
            )
            worst = max(worst, code)
        return worst

    if len(args.words) != 2:
        print("error: conj needs two words (or --batch)", file=sys.stderr)
        return EXIT_USAGE
    payload = decide_pair(args.words[0], args.words[1])
    if args.json:
        print(json.dumps(payload))
    else:
        if payload["conjugate"]:
            print(f"conjugate via {payload['witness']}  [{payload['method']}]")
        elif payload["inconclusive"]:
            print("inconclusive under the current policy bounds")
        else:
            print("not conjugate")
    if payload["conjugate"]:
        return EXIT_OK
    return EXIT_INCONCLUSIVE if payload["inconclusive"] else EXIT_NO


if __name__ == "__main__":
    sys.exit(main())
