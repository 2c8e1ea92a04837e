"""Command-line interface.

Exit codes: 0 when a command ran and reached a decision, 1 when a
verification or replay failed, 2 on usage or input errors, 3 when a
computation was refused as too large. JSON output encodes integers of
magnitude above 2^53 as decimal strings so consumers with binary64
parsers cannot silently corrupt them.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

from . import bundle
from .arith import alpha_digits, factorize, strong_density_bound
from .census import GCD_COLUMNS, census_row, format_count, gcd_counts
from .errors import (
    CapacityError,
    ConstructionError,
    DomainError,
    RangeError,
    ValidationError,
)
from .matcher import (
    HallWitness,
    MatchingCertificate,
    PrimePowerObstruction,
    decide_strong,
    is_matchable,
    match_via_partition,
    mp_matching,
    validate_matching,
)
from .replay import FEW_MAX, FEW_MIN, replay_few, verify_sqfr

JSON_INT_LIMIT = 1 << 53


# ---------------------------------------------------------------------------
# JSON plumbing


def encode_json(obj):
    """Recursive encoding with big integers as decimal strings."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, int):
        return obj if -JSON_INT_LIMIT <= obj <= JSON_INT_LIMIT else str(obj)
    if isinstance(obj, dict):
        return {str(k): encode_json(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode_json(v) for v in obj]
    return obj


def decode_int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise DomainError(f"expected an integer, got {v!r}")
    return int(v)


def certificate_to_json(cert: MatchingCertificate) -> dict:
    return {
        "kind": "coprime-matching",
        "domain": encode_json(cert.domain_descriptor),
        "codomain": encode_json(cert.codomain_descriptor),
        "pairs": encode_json(list(cert.pairs)),
    }


def _decode_descriptor(d: dict) -> dict:
    return {k: (v if k == "kind" else decode_int(v)) for k, v in d.items()}


def certificate_from_json(doc: dict) -> MatchingCertificate:
    if doc.get("kind") != "coprime-matching":
        raise DomainError("not a coprime-matching certificate")
    pairs = tuple(
        (decode_int(a), decode_int(b)) for a, b in doc["pairs"]
    )
    return MatchingCertificate(
        pairs=pairs,
        domain_descriptor=_decode_descriptor(doc["domain"]),
        codomain_descriptor=_decode_descriptor(doc["codomain"]),
    )


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


# ---------------------------------------------------------------------------
# shared input helpers


def _parse_ell_range(spec: str) -> range:
    lo, sep, hi = spec.partition("..")
    try:
        a = int(lo)
        b = int(hi) if sep else a
    except ValueError:
        raise DomainError(f"bad --ell value {spec!r}; use L or A..B")
    if b < a:
        raise DomainError(f"empty --ell range {spec!r}")
    return range(a, b + 1)


def _row_and_gcds(ell, mode, threads, recompute):
    if not recompute and bundle.has_row(ell, mode):
        return bundle.bundled_row(ell, mode), bundle.bundled_gcds(ell, mode)
    row = census_row(ell, mode, threads=threads)
    g = gcd_counts(ell, mode, bundle.BUNDLED_DS, threads=threads)
    return row, g


def _load_row(ell, mode, threads, recompute):
    if not recompute and bundle.has_row(ell, mode):
        return bundle.bundled_row(ell, mode)
    return census_row(ell, mode, threads=threads)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_matchable(args) -> int:
    res = is_matchable(args.n)
    ev = res["evidence"]
    if res["matchable"]:
        print(f"{args.n} is matchable ({len(ev.pairs)} coprime pairs)")
    elif isinstance(ev, PrimePowerObstruction):
        print(
            f"{args.n} is not matchable (prime-power obstruction: "
            f"p={ev.p}, tau={ev.tau}, r={ev.r})"
        )
    else:
        print(
            f"{args.n} is not matchable (Hall witness: |S|={len(ev.S)}, "
            f"neighborhood size {ev.neighborhood_size})"
        )
    return 0


def _cmd_match(args) -> int:
    if args.via_partition:
        built = match_via_partition(args.n, j=args.j)
        if isinstance(built, HallWitness):
            print(
                f"partition route failed on a block (Hall witness of size "
                f"{len(built.S)})",
                file=sys.stderr,
            )
            return 1
        cert = built
    else:
        res = is_matchable(args.n)
        if not res["matchable"]:
            print(f"{args.n} is not matchable", file=sys.stderr)
            return 1
        cert = res["evidence"]
    validate_matching(cert)
    _emit(json.dumps(certificate_to_json(cert), indent=2) + "\n", args.out)
    if args.out:
        print(f"wrote certificate for {args.n} to {args.out}")
    return 0


def _cmd_verify_cert(args) -> int:
    with open(args.file) as fh:
        doc = json.load(fh)
    cert = certificate_from_json(doc)
    try:
        validate_matching(cert)
    except ValidationError as exc:
        where = f" at pair {exc.witness}" if exc.witness else ""
        print(f"invalid certificate: {exc}{where}", file=sys.stderr)
        return 1
    print(
        f"valid coprime matching ({len(cert.pairs)} pairs, domain "
        f"{cert.domain_descriptor['kind']})"
    )
    return 0


def _cmd_mp(args) -> int:
    cert = mp_matching(args.p)
    if args.out:
        _emit(json.dumps(certificate_to_json(cert), indent=2) + "\n", args.out)
        print(f"wrote universal matching for p={args.p} to {args.out}")
    else:
        n = cert.domain_descriptor["n"]
        print(f"m_{args.p} = {n} with {len(cert.pairs)} pairs")
        for d, t in sorted(cert.pairs, key=lambda pair: pair[1]):
            print(f"psi({t}) = {d}")
    return 0


def _cmd_census(args) -> int:
    sig = 3 if args.rounded else None
    lines = [["ell", "omega_max"] + [f"c_{i}" for i in range(7)] + ["c_ge7"]]
    for ell in _parse_ell_range(args.ell):
        row = _load_row(ell, args.mode, args.threads, args.recompute)
        cells = [str(row.ell), str(row.omega_max)]
        for i in range(7):
            cells.append(format_count(row.c[i], sig) if i <= row.omega_max else "")
        cells.append(format_count(row.at_least(7), sig) if row.omega_max >= 7 else "")
        lines.append(cells)
    _write_csv(lines, args.out)
    return 0


def _gcd_table_cells(ell, mode, threads, recompute, sig):
    row, g = _row_and_gcds(ell, mode, threads, recompute)
    if ell <= FEW_MAX:
        used = replay_few(ell, mode, row, g).used_entries()
    else:
        used = set(bundle.BUNDLED_DS) | {"x3"}
    cells = [str(ell)]
    for col in GCD_COLUMNS:
        if col == "x3":
            cells.append(format_count(g.x3, sig) if "x3" in used else "")
        else:
            cells.append(format_count(g.entries[col], sig) if col in used else "")
    return cells


def _cmd_gcds(args) -> int:
    ells = _parse_ell_range(args.ell)
    sig = 3 if args.rounded else None
    if args.d:
        ds = tuple(int(tok) for tok in args.d.split(","))
        out = []
        for ell in ells:
            if not args.recompute and bundle.has_row(ell, args.mode) and set(
                ds
            ) <= set(bundle.BUNDLED_DS):
                g = bundle.bundled_gcds(ell, args.mode)
            else:
                g = gcd_counts(ell, args.mode, ds, threads=args.threads)
            rec = {"ell": ell, "mode": args.mode, "x3": g.x3}
            rec.update({f"gcd_{d}": g.entries[d] for d in ds})
            out.append(rec)
        _emit(json.dumps(encode_json(out), indent=2) + "\n", args.out)
        return 0
    header = ["ell"] + [c if c == "x3" else f"gcd_{c}" for c in GCD_COLUMNS]
    lines = [header]
    for ell in ells:
        lines.append(
            _gcd_table_cells(ell, args.mode, args.threads, args.recompute, sig)
        )
    _write_csv(lines, args.out)
    return 0


def _write_csv(lines, out_path) -> None:
    if out_path:
        with open(out_path, "w", newline="") as fh:
            csv.writer(fh).writerows(lines)
    else:
        csv.writer(sys.stdout).writerows(lines)


def _cmd_replay_few(args) -> int:
    ok = True
    for ell in _parse_ell_range(args.ell):
        if not (FEW_MIN <= ell <= FEW_MAX):
            raise RangeError(
                f"replay-few covers ell in [{FEW_MIN}, {FEW_MAX}]; "
                f"got {ell} (use replay-sqfr beyond)"
            )
        row, g = _row_and_gcds(ell, args.mode, args.threads, args.recompute)
        cert = replay_few(ell, args.mode, row, g)
        ok = ok and cert.valid
        status = "pass" if cert.valid else "FAIL"
        print(f"ell={ell} mode={args.mode}: {status}")
        if args.explain:
            for step in cert.steps:
                shown = "; ".join(c.display() for c in step.comparisons)
                closing = "closed" if step.closed else "EXHAUSTED"
                print(f"  k={step.k} {step.rung}: {shown or 'immediate'} [{closing}]")
    print("all checks passed" if ok else "some checks FAILED")
    return 0 if ok else 1


def _cmd_replay_sqfr(args) -> int:
    ells = _parse_ell_range(args.ell)
    cap = max(max(ells), 2048)
    ok = True
    first = verify_sqfr(min(ells), cap=cap)
    print(f"anchor (93/50)^4/24 < 1/2: {'pass' if first.anchor_ok else 'FAIL'}")
    for ell in ells:
        cert = verify_sqfr(ell, cap=cap) if ell != first.ell else first
        ok = ok and cert.valid
        if not cert.valid or args.verbose:
            status = "pass" if cert.valid else f"FAIL {cert.failures()}"
            print(
                f"ell={ell}: j={cert.j} kbar={cert.kbar} "
                f"rows={len(cert.per_k)}+{len(cert.case_records)} {status}"
            )
    n = len(ells)
    print(f"{n} value{'s' if n != 1 else ''} checked: "
          + ("all pass" if ok else "FAILURES above"))
    return 0 if ok else 1


def _cmd_alpha(args) -> int:
    print(alpha_digits(args.digits))
    return 0


def _cmd_strong(args) -> int:
    res = decide_strong(args.n)
    if res["strong"]:
        print(
            f"{args.n} is strongly matchable "
            f"({len(res['witness'])} residue classes verified)"
        )
    else:
        w = res["witness"]
        a0, q0 = w["class"]
        first, step = w["progression"]
        hall = w["hall"]
        print(
            f"{args.n} is not strongly matchable: class (a0={a0}, q0={q0}) "
            f"mod {factorize(args.n).rad}, progression first={first} "
            f"step={step}, witness S={sorted(hall.S)} has only "
            f"{hall.neighborhood_size} coprime neighbors"
        )
    return 0


def _cmd_strong_density(args) -> int:
    b = strong_density_bound()
    print(f"squarefree-coprime-to-210 density = {b.density}")
    print(f"many-factor tail bound          < {b.tail_bound}")
    print(f"certified lower bound           > {b.lower}")
    print(f"with tight prime powers         > {b.boosted}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="divmatch",
        description="Coprime matchings between divisors and intervals.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matchable", help="decide matchability of n")
    p.add_argument("n", type=int)
    p.set_defaults(fn=_cmd_matchable)

    p = sub.add_parser("match", help="produce a matching certificate for n")
    p.add_argument("n", type=int)
    p.add_argument("--via-partition", action="store_true")
    p.add_argument("--j", type=int, default=None, help="partition depth")
    p.add_argument("--out", default=None, help="write JSON here")
    p.set_defaults(fn=_cmd_match)

    p = sub.add_parser("verify-cert", help="validate a certificate file")
    p.add_argument("file")
    p.set_defaults(fn=_cmd_verify_cert)

    p = sub.add_parser("mp", help="universal matching for the prime p")
    p.add_argument("p", type=int)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=_cmd_mp)

    p = sub.add_parser("census", help="factor-count census rows as CSV")
    p.add_argument("--ell", required=True, help="L or A..B")
    p.add_argument("--mode", required=True, choices=("odd", "full"))
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--recompute", action="store_true",
                   help="ignore bundled rows")
    p.add_argument("--rounded", action="store_true",
                   help="3-significant-digit cells instead of exact integers")
    p.set_defaults(fn=_cmd_census)

    p = sub.add_parser("gcds", help="gcd census counts")
    p.add_argument("--ell", required=True, help="L or A..B")
    p.add_argument("--mode", required=True, choices=("odd", "full"))
    p.add_argument("--d", default=None, help="comma-separated divisors")
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--recompute", action="store_true")
    p.add_argument("--rounded", action="store_true")
    p.set_defaults(fn=_cmd_gcds)

    p = sub.add_parser("replay-few", help="re-run the census case analysis")
    p.add_argument("--ell", default=f"{FEW_MIN}..{FEW_MAX}", help="L or A..B")
    p.add_argument("--mode", required=True, choices=("odd", "full"))
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--recompute", action="store_true")
    p.add_argument("--explain", action="store_true",
                   help="print every comparison")
    p.set_defaults(fn=_cmd_replay_few)

    p = sub.add_parser("replay-sqfr",
                       help="re-run the many-factor inequality cascade")
    p.add_argument("--ell", default="45..2048", help="L or A..B")
    p.add_argument("--verbose", action="store_true",
                   help="one line per ell even when passing")
    p.set_defaults(fn=_cmd_replay_sqfr)

    p = sub.add_parser("alpha", help="matchable-number density digits")
    p.add_argument("--digits", type=int, default=14)
    p.set_defaults(fn=_cmd_alpha)

    p = sub.add_parser("strong", help="decide strong matchability of n")
    p.add_argument("n", type=int)
    p.set_defaults(fn=_cmd_strong)

    p = sub.add_parser("strong-density",
                       help="certified strong-matchability density bounds")
    p.set_defaults(fn=_cmd_strong_density)
    return top


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ValidationError as exc:
        where = f" at {exc.witness}" if exc.witness else ""
        print(f"verification failed: {exc}{where}", file=sys.stderr)
        return 1
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return 1
    except (RangeError, DomainError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except CapacityError as exc:
        print(f"refused: {exc} (raise the relevant limit to force)",
              file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
