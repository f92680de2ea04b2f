"""Deterministic lossless broadcast harness with auditable transcripts.

A run is single-round: every user transmits its scheduled symbols, then
every user decodes everything it demanded.  The transcript records each
broadcast event, every decode derivation, bit totals, and the measured
normalized rate as an exact rational.  Identical inputs give byte-identical
transcripts; events follow the schedule's canonical order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .codec import (
    Derivation,
    TransmissionSchedule,
    decode_user,
    encode,
    side_info_view,
    split_message,
)
from .errors import DecodeFailure, DomainError
from .instance import MessageStore, ProblemInstance, instance_to_json


@dataclass(frozen=True)
class BroadcastEvent:
    """One transmission: who sent which symbol, with its payload."""

    sender: int
    symbol_id: str
    payload: bytes

    @property
    def bits(self) -> int:
        return len(self.payload) * 8


@dataclass(frozen=True)
class Transcript:
    """Everything observable from one exchange round.

    ``padding_bits`` counts zero bits appended per message when the caller
    padded an unaligned length; ``measured_rate`` is always computed over
    the unpadded length, so it matches the closed-form rate exactly only
    when no padding was applied.  ``decode_log`` maps user, then message,
    then block index to the derivation that recovered the block.
    """

    instance: ProblemInstance
    schedule: TransmissionSchedule
    events: tuple[BroadcastEvent, ...]
    decode_log: Mapping[int, Mapping[int, Mapping[int, Derivation]]]
    recovered: Mapping[int, Mapping[int, bytes]]
    totals_bits: int
    per_user_bits: Mapping[int, int]
    measured_rate: Fraction
    padding_bits: int


def run(
    inst: ProblemInstance, store: MessageStore, original_d_bits: int | None = None
) -> Transcript:
    """Execute one full exchange round and verify bit-exact recovery.

    ``original_d_bits`` is the pre-padding message length when the store was
    zero-padded to satisfy block alignment; the measured rate is normalized
    by it.  Raises :class:`DecodeFailure` if any recovered block differs
    from the original, which signals a codec bug, never an expected outcome.
    """
    original = inst.d_bits if original_d_bits is None else original_d_bits
    if not 0 < original <= inst.d_bits:
        raise DomainError(f"original length {original} outside (0, {inst.d_bits}]")
    schedule = encode(inst, store)
    events = tuple(
        BroadcastEvent(sender=sym.sender, symbol_id=sym.id, payload=sym.payload or b"")
        for sym in schedule.symbols
    )
    z = schedule.sub.z
    decode_log: dict[int, dict[int, dict[int, Derivation]]] = {}
    recovered: dict[int, dict[int, bytes]] = {}
    for j in range(inst.N):
        got, derivations = decode_user(inst, j, schedule, side_info_view(inst, store, j))
        for l, msg in got.items():
            if msg != store.messages[l]:
                want = split_message(store.messages[l], z)
                have = split_message(msg, z)
                k = next(i for i in range(z) if want[i] != have[i])
                raise DecodeFailure(j, l, k)
        recovered[j] = got
        log: dict[int, dict[int, Derivation]] = {}
        for record in derivations:
            log.setdefault(record.message, {})[record.block] = record
        decode_log[j] = log
    totals = sum(ev.bits for ev in events)
    return Transcript(
        instance=inst,
        schedule=schedule,
        events=events,
        decode_log=decode_log,
        recovered=recovered,
        totals_bits=totals,
        per_user_bits=dict(schedule.per_sender_bits),
        measured_rate=Fraction(totals, inst.N * original),
        padding_bits=inst.d_bits - original,
    )


def measured_rate(transcript: Transcript) -> Fraction:
    """Bits broadcast divided by total unpadded message bits, exactly."""
    return transcript.measured_rate


def transcript_to_json(transcript: Transcript) -> dict:
    """JSON form of a transcript; derivations keep only ids and cancelled blocks."""
    return {
        "instance": instance_to_json(transcript.instance),
        "events": [
            {"sender": ev.sender, "id": ev.symbol_id, "payload_hex": ev.payload.hex()}
            for ev in transcript.events
        ],
        "decode_log": {
            str(j): {
                str(l): {
                    str(k): {
                        "chain": list(record.chain),
                        "cancelled": [[m, b] for m, b in record.cancelled],
                    }
                    for k, record in sorted(blocks.items())
                }
                for l, blocks in sorted(messages.items())
            }
            for j, messages in sorted(transcript.decode_log.items())
        },
        "totals_bits": transcript.totals_bits,
        "measured_rate": [
            transcript.measured_rate.numerator,
            transcript.measured_rate.denominator,
        ],
        "padding_bits": transcript.padding_bits,
    }


def _chain_label(transcript: Transcript, record: Derivation) -> str:
    return " ⊕ ".join(transcript.schedule.symbol(i).label() for i in record.chain)


def render_decode_table(transcript: Transcript, fmt: str = "text"):
    """Per-user view of transmissions and decode sources.

    ``fmt="text"`` renders display lines; ``fmt="json"`` returns the same
    content structured, with canonical symbol ids next to display labels.
    """
    inst = transcript.instance
    users = []
    for j in range(inst.N):
        sends = [
            {"id": sym.id, "label": sym.label(), "expr": sym.expression(),
             "terms": [[m, b] for m, b in sym.terms]}
            for sym in transcript.schedule.symbols
            if sym.sender == j
        ]
        wants = []
        for l in sorted(inst.demands[j]):
            blocks = []
            for k in sorted(transcript.decode_log[j][l]):
                record = transcript.decode_log[j][l][k]
                blocks.append(
                    {
                        "block": k,
                        "chain": list(record.chain),
                        "chain_label": _chain_label(transcript, record),
                        "cancelled": [[m, b] for m, b in record.cancelled],
                    }
                )
            wants.append({"message": l, "blocks": blocks})
        users.append({"user": j, "sends": sends, "demands": wants})
    table = {"case": transcript.schedule.sub.case, "z": transcript.schedule.sub.z, "users": users}
    if fmt == "json":
        return table
    if fmt != "text":
        raise DomainError(f"unknown table format {fmt!r}")
    lines = []
    for entry in users:
        sent = ", ".join(f"{s['label']} = {s['expr']}" for s in entry["sends"])
        lines.append(f"S_{entry['user']} sends {sent} (id {', '.join(s['id'] for s in entry['sends'])})")
        for want in entry["demands"]:
            for blk in want["blocks"]:
                cancels = ", ".join(f"x_{m}^{b}" for m, b in blk["cancelled"])
                lines.append(
                    f"  x_{want['message']}^{blk['block']} ← {blk['chain_label']}"
                    f" [cancels {cancels}]"
                )
    return "\n".join(lines)
