"""Command-line surface tying the modules together.

Subcommands: ``instance`` (build and validate instance files), ``run``
(execute an exchange round and write the transcript), ``verify`` (GF(2)
decodability certification), ``rates`` (rate sweeps vs the scalar-linear
baseline), and ``demo`` (three small worked instances with their decode
tables).

Exit codes: 0 ok, 2 validation error, 3 I/O error, 4 decode failure
(codec bug sentinel), 5 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .codec import schedule_from_json
from .errors import (
    BlockAlignmentError,
    CaseMismatchError,
    DecodeFailure,
    DemandOverlapError,
    DomainError,
    EicError,
    LengthMismatchError,
    MissingSymbolError,
    SideInfoGapError,
)
from .gf2 import verify_instance
from .instance import (
    MessageStore,
    aligned_d_bits,
    instance_from_json,
    instance_to_json,
    new_cs_eicp,
    sub_packetization_level,
)
from .rates import (
    SWEEP_COLUMNS,
    Condition,
    comparison_json,
    comparison_row,
    scalar_baseline_rate,
    sweep,
    sweep_csv,
)
from .sim import render_decode_table, run, transcript_to_json

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3
EXIT_DECODE = 4
EXIT_VERIFY = 5

_DEMOS = {
    1: (5, 3, 16, lambda j: [(j + 3) % 5]),
    2: (4, 2, 24, lambda j: [(j + 2) % 4]),
    3: (7, 4, 16, lambda j: [(j + 4) % 7, (j + 5) % 7]),
}


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        print(text, end="" if text.endswith("\n") else "\n")


def _load_json(path: str) -> dict:
    return json.loads(Path(path).read_text())


def _dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def cmd_instance(args: argparse.Namespace) -> int:
    demands = None
    if args.demands:
        try:
            raw = json.loads(args.demands)
        except json.JSONDecodeError as exc:
            raise DomainError(f"--demands is not valid JSON: {exc}") from None
        demands = {int(j): [int(l) for l in ls] for j, ls in raw.items()}
    inst = new_cs_eicp(args.n, args.s, args.a, args.d_bits, demands)
    _write_or_print(_dump_json(instance_to_json(inst)), args.output)
    return EXIT_OK


def _load_run_inputs(args: argparse.Namespace):
    """Instance plus message store, applying --pad when alignment demands it."""
    data = _load_json(args.instance)
    original_d = int(data["d_bits"])
    try:
        inst = instance_from_json(data)
    except BlockAlignmentError:
        if not args.pad:
            raise
        if original_d <= 0 or original_d % 8:
            raise DomainError(
                f"cannot pad d={original_d}: message files need whole bytes"
            ) from None
        data = dict(data)
        data["d_bits"] = aligned_d_bits(int(data["N"]), int(data["s"]), original_d)
        inst = instance_from_json(data)
    if args.messages:
        blob = Path(args.messages).read_bytes()
        store = MessageStore.from_bytes(blob, inst.N, original_d)
    elif args.random:
        store = MessageStore.random(inst.N, original_d, args.seed)
    else:
        raise DomainError("provide a messages file or --random")
    if inst.d_bits != original_d:
        store = store.padded(inst.d_bits)
    return inst, store, original_d


def cmd_run(args: argparse.Namespace) -> int:
    inst, store, original_d = _load_run_inputs(args)
    transcript = run(inst, store, original_d_bits=original_d)
    payload = _dump_json(transcript_to_json(transcript))
    if args.output:
        Path(args.output).write_text(payload)
    if args.format == "json" and not args.output:
        print(payload, end="")
    else:
        rate = transcript.measured_rate
        print(f"symbols: {len(transcript.events)}")
        print(f"total bits: {transcript.totals_bits}")
        if transcript.padding_bits:
            print(f"padding bits per message: {transcript.padding_bits}")
        print(f"rate: {rate.numerator}/{rate.denominator}")
        print("recovery: PASS")
    return EXIT_OK


def _verify_one(args: argparse.Namespace) -> int:
    inst = instance_from_json(_load_json(args.instance))
    schedule = None
    if args.schedule:
        schedule = schedule_from_json(_load_json(args.schedule), inst)
    report = verify_instance(inst, schedule, strict=args.strict)
    if args.format == "json":
        print(_dump_json(report.to_json()), end="")
    else:
        print(f"pass: {'true' if report.ok else 'false'}")
        print(f"symbol matrix rank: {report.matrix_rank}/{report.dimension}")
        for j, l, k in report.failures:
            print(f"unrecoverable: user {j}, message {l}, block {k}")
    return EXIT_OK if report.ok else EXIT_VERIFY


def _verify_sweep(args: argparse.Namespace) -> int:
    checked = 0
    bad = []
    for n in range(args.n_min, args.n_max + 1):
        for s in range(2, n):
            z = sub_packetization_level(n, s).z
            inst = new_cs_eicp(n, s, 0, 8 * z)
            report = verify_instance(inst, strict=args.strict)
            checked += 1
            if not report.ok:
                bad.append((n, s, len(report.failures)))
    for n, s, count in bad:
        print(f"FAIL N={n} s={s}: {count} unrecoverable blocks")
    print(f"verified {checked} instances: {'all pass' if not bad else f'{len(bad)} failing'}")
    return EXIT_OK if not bad else EXIT_VERIFY


def cmd_verify(args: argparse.Namespace) -> int:
    if args.all:
        return _verify_sweep(args)
    if not args.instance:
        raise DomainError("provide an instance file or --all")
    return _verify_one(args)


def _rates_table(rows) -> str:
    header = ("N", "s", "case", "z", "ours", "baseline", "condition", "better", "conjecture")
    cells = [
        (
            str(r.N),
            str(r.s),
            r.case,
            str(r.z),
            f"{r.ours.numerator}/{r.ours.denominator}",
            f"{r.baseline.numerator}/{r.baseline.denominator}",
            r.condition.value,
            "yes" if r.strictly_better else "no",
            "-" if r.conjecture_holds is None else ("yes" if r.conjecture_holds else "no"),
        )
        for r in rows
    ]
    widths = [max(len(h), *(len(c[i]) for c in cells)) if cells else len(h) for i, h in enumerate(header)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header)]
    lines.extend(fmt.format(*c) for c in cells)
    return "\n".join(lines) + "\n"


def cmd_rates(args: argparse.Namespace) -> int:
    rows = sweep(args.n_min, args.n_max)
    if args.format == "csv":
        text = sweep_csv(rows)
    elif args.format == "json":
        text = _dump_json({"rows": [comparison_json(r) for r in rows]})
    else:
        text = _rates_table(rows)
    _write_or_print(text, args.output)
    if args.check:
        broken = [r for r in rows if r.condition is not Condition.NONE and not r.strictly_better]
        if broken:
            first = broken[0]
            print(
                f"check failed: N={first.N} s={first.s} condition={first.condition.value} "
                f"but rate {first.ours} >= baseline {first.baseline}",
                file=sys.stderr,
            )
            return EXIT_VERIFY
    return EXIT_OK


def cmd_demo(args: argparse.Namespace) -> int:
    n, s, d_bits, want = _DEMOS[args.example]
    inst = new_cs_eicp(n, s, 0, d_bits, {j: want(j) for j in range(n)})
    store = MessageStore.random(n, d_bits, args.seed)
    transcript = run(inst, store)
    if args.format == "json":
        print(
            _dump_json(
                {
                    "table": render_decode_table(transcript, "json"),
                    "totals_bits": transcript.totals_bits,
                    "measured_rate": [
                        transcript.measured_rate.numerator,
                        transcript.measured_rate.denominator,
                    ],
                }
            ),
            end="",
        )
        return EXIT_OK
    sub = transcript.schedule.sub
    rate = transcript.measured_rate
    base = scalar_baseline_rate(n, s)
    print(f"Demo {args.example}: N={n} users, side-information width s={s}, d={d_bits}-bit messages")
    print(f"case {sub.case}: z={sub.z} blocks of {sub.d1_bits} bits per message")
    print(render_decode_table(transcript, "text"))
    print(
        f"total bits: {transcript.totals_bits}, rate {rate.numerator}/{rate.denominator} "
        f"(scalar-linear baseline {base.numerator}/{base.denominator})"
    )
    print("recovery: PASS")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eic",
        description="Sub-packetized XOR index codes for consecutive symmetric side information",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_inst = sub.add_parser("instance", help="build and validate an instance file")
    p_inst.add_argument("--N", dest="n", type=int, required=True, help="user/message count")
    p_inst.add_argument("--s", dest="s", type=int, required=True, help="side-information width")
    p_inst.add_argument("--a", dest="a", type=int, default=0, help="window offset")
    p_inst.add_argument("--d-bits", dest="d_bits", type=int, required=True, help="message length in bits")
    p_inst.add_argument("--demands", help="JSON map of user index to demanded messages")
    p_inst.add_argument("-o", "--output", help="write instance JSON here (default stdout)")
    p_inst.set_defaults(func=cmd_instance)

    p_run = sub.add_parser("run", help="execute one exchange round")
    p_run.add_argument("instance", help="instance JSON file")
    p_run.add_argument("--messages", help="binary file of N records, d/8 bytes each")
    p_run.add_argument("--random", action="store_true", help="generate messages from --seed")
    p_run.add_argument("--seed", type=int, default=0, help="64-bit seed for --random")
    p_run.add_argument("--pad", action="store_true", help="zero-pad unaligned d to the next multiple of 8z")
    p_run.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p_run.add_argument("-o", "--output", help="write transcript JSON here")
    p_run.set_defaults(func=cmd_run)

    p_ver = sub.add_parser("verify", help="GF(2) decodability certification")
    p_ver.add_argument("instance", nargs="?", help="instance JSON file")
    p_ver.add_argument("--all", action="store_true", help="sweep all (N, s) with CDE demands")
    p_ver.add_argument("--N-min", dest="n_min", type=int, default=3)
    p_ver.add_argument("--N-max", dest="n_max", type=int, default=30)
    p_ver.add_argument("--strict", action="store_true", help="exclude each user's own transmissions")
    p_ver.add_argument("--schedule", help="verify this schedule JSON instead of the built one")
    p_ver.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p_ver.add_argument("-o", "--output", help="unused; reports print to stdout")
    p_ver.set_defaults(func=cmd_verify)

    p_rates = sub.add_parser("rates", help="rate sweep vs the scalar-linear baseline")
    p_rates.add_argument("--N-min", dest="n_min", type=int, required=True)
    p_rates.add_argument("--N-max", dest="n_max", type=int, required=True)
    p_rates.add_argument("--check", action="store_true", help="fail if a proven condition is not strictly better")
    p_rates.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p_rates.add_argument("-o", "--output", help="write the sweep here (default stdout)")
    p_rates.set_defaults(func=cmd_rates)

    p_demo = sub.add_parser("demo", help="worked instances with decode tables")
    p_demo.add_argument("example", type=int, choices=(1, 2, 3))
    p_demo.add_argument("--seed", type=int, default=0, help="64-bit seed for demo payloads")
    p_demo.add_argument("--format", choices=("json", "csv", "table"), default="table")
    p_demo.set_defaults(func=cmd_demo)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (
        DomainError,
        DemandOverlapError,
        BlockAlignmentError,
        CaseMismatchError,
        MissingSymbolError,
        SideInfoGapError,
        KeyError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (OSError, LengthMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DecodeFailure as exc:
        print(f"decode failure: {exc}", file=sys.stderr)
        return EXIT_DECODE


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
