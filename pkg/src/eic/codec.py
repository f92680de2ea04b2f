"""Sub-packetized XOR codec for consecutive symmetric embedded index coding.

Every message is split into ``z`` equal blocks and every broadcast symbol is
an XOR of blocks the sender already holds.  Two regimes cover the whole
parameter domain ``2 <= s <= N - 1``:

* case A (``s > N/2``): ``z = ceil(s / (N - s))``.  Each user sends one
  symbol combining one block each of ``z`` messages spaced ``N - s`` apart,
  block index increasing with position.  A demanded block is recovered from
  the single symbol that carries it; all other blocks of that symbol are
  side information because the symbol spans fewer than ``s`` indices.

* case B (``s <= N/2``): ``z = 1 + ceil((N - s) / (s - 1))``.  Symbols are
  built in ``N`` rounds with ``z - 1`` symbols per round; the symbol
  ``(round i, position k)`` XORs block ``k`` of message ``k*(s-1) + i`` with
  block ``k+1`` of the message ``s - 1`` further on, both held by the sender.
  Consecutive symbols of one round telescope under XOR, so a demanded block
  is recovered by chaining just enough symbols forward (or backward) until
  the surviving companion block is side information.

All index arithmetic is modulo ``N``.  User ``j`` holds the window of ``s``
consecutive messages starting at ``(j + a) mod N``; encoders and decoders
work in window coordinates, so an instance with offset ``a`` behaves exactly
like the ``a = 0`` instance with its users relabelled.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Literal, Mapping, Sequence

from .errors import (
    BlockAlignmentError,
    CaseMismatchError,
    DomainError,
    LengthMismatchError,
    MissingSymbolError,
    SideInfoGapError,
)

if TYPE_CHECKING:
    from .instance import MessageStore, ProblemInstance

Case = Literal["A", "B"]


def _ceil_div(num: int, den: int) -> int:
    return -(-num // den)


def check_domain(n_users: int, s: int) -> None:
    """Reject (N, s) pairs outside the supported domain N >= 3, 2 <= s <= N-1."""
    if n_users < 3:
        raise DomainError(f"need at least 3 users, got N={n_users}")
    if not 2 <= s <= n_users - 1:
        raise DomainError(
            f"side-information width s={s} outside [2, {n_users - 1}] for N={n_users}"
        )


@dataclass(frozen=True)
class SubPacketization:
    """Block split for one (N, s) pair.

    ``z`` is the number of blocks per message, ``case`` selects the encoding
    regime ("A" iff ``s > N/2``), and ``d1_bits`` is the block size when a
    message length is known (``None`` for purely symbolic use).
    """

    z: int
    case: Case
    d1_bits: int | None = None


def sub_packetization_level(n_users: int, s: int, d_bits: int | None = None) -> SubPacketization:
    """Block count and regime for (N, s), optionally with the block size.

    Case A (``s > N/2``) uses ``z = ceil(s/(N-s))``; case B uses
    ``z = 1 + ceil((N-s)/(s-1))``.  Both give ``z >= 2`` on the whole domain.
    """
    check_domain(n_users, s)
    if 2 * s > n_users:
        z = _ceil_div(s, n_users - s)
        case: Case = "A"
    else:
        z = 1 + _ceil_div(n_users - s, s - 1)
        case = "B"
    assert z >= 2
    d1 = None
    if d_bits is not None:
        if d_bits <= 0 or d_bits % z:
            raise BlockAlignmentError(f"d={d_bits} bits is not a positive multiple of z={z}")
        d1 = d_bits // z
    return SubPacketization(z=z, case=case, d1_bits=d1)


def split_message(msg: bytes, z: int) -> tuple[bytes, ...]:
    """Split a message into z contiguous equal-length blocks."""
    if z < 1:
        raise DomainError(f"block count must be positive, got z={z}")
    if len(msg) % z:
        raise BlockAlignmentError(f"{len(msg)}-byte message does not split into {z} blocks")
    step = len(msg) // z
    return tuple(msg[i * step : (i + 1) * step] for i in range(z))


def reassemble_message(blocks: Sequence[bytes]) -> bytes:
    """Concatenate blocks in order; inverse of :func:`split_message`."""
    if blocks and any(len(b) != len(blocks[0]) for b in blocks):
        raise LengthMismatchError("blocks of unequal length")
    return b"".join(blocks)


@dataclass(frozen=True)
class CodedSymbol:
    """One broadcast XOR of message blocks.

    ``id`` is ``"A:<sender>"`` in case A and ``"B:<round>:<k>"`` in case B.
    ``terms`` lists the combined ``(message, block)`` pairs in position
    order; every message index lies in the sender's side-information window.
    ``payload`` is the XOR of the named blocks, or ``None`` for symbolic
    schedules that carry term lists only.
    """

    id: str
    sender: int
    terms: tuple[tuple[int, int], ...]
    payload: bytes | None = None

    def label(self) -> str:
        """Display label: ``Y_3`` (case A) or ``Y_2^0`` (case B round 2, k=0)."""
        parts = self.id.split(":")
        if parts[0] == "A":
            return f"Y_{parts[1]}"
        return f"Y_{parts[1]}^{parts[2]}"

    def expression(self) -> str:
        """Display form of the XORed blocks, e.g. ``x_0^0 ⊕ x_2^1``."""
        return " ⊕ ".join(f"x_{m}^{b}" for m, b in self.terms)


@dataclass(frozen=True)
class TransmissionSchedule:
    """The full set of coded symbols for one instance, in canonical order.

    Case A orders symbols by sender; case B by (round, position).  The same
    order is used for broadcast transcripts, so schedules are deterministic.
    """

    sub: SubPacketization
    symbols: tuple[CodedSymbol, ...]
    per_sender_bits: Mapping[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_id", {sym.id: sym for sym in self.symbols})

    def symbol(self, symbol_id: str) -> CodedSymbol:
        try:
            return self._by_id[symbol_id]  # type: ignore[attr-defined]
        except KeyError:
            raise MissingSymbolError(f"schedule has no symbol {symbol_id!r}") from None

    def has_symbol(self, symbol_id: str) -> bool:
        return symbol_id in self._by_id  # type: ignore[attr-defined]

    @property
    def total_bits(self) -> int:
        return sum(self.per_sender_bits.values())


@dataclass(frozen=True)
class Derivation:
    """How one demanded block was recovered: symbols chained, blocks cancelled."""

    user: int
    message: int
    block: int
    chain: tuple[str, ...]
    cancelled: tuple[tuple[int, int], ...]


def _window_start(inst: "ProblemInstance", j: int) -> int:
    return (j + inst.a) % inst.N


def _holds(inst: "ProblemInstance", j: int, msg: int) -> bool:
    return (msg - _window_start(inst, j)) % inst.N < inst.s


def _sub_for(inst: "ProblemInstance") -> SubPacketization:
    return sub_packetization_level(inst.N, inst.s, inst.d_bits)


def _assemble(sub: SubPacketization, symbols: list[CodedSymbol], n_users: int) -> TransmissionSchedule:
    d1 = sub.d1_bits
    assert d1 is not None
    bits: dict[int, int] = {j: 0 for j in range(n_users)}
    for sym in symbols:
        bits[sym.sender] += d1
    return TransmissionSchedule(sub=sub, symbols=tuple(symbols), per_sender_bits=bits)


def plan_case_a(inst: "ProblemInstance") -> TransmissionSchedule:
    """Symbolic case A schedule: one symbol per user, payloads omitted."""
    sub = _sub_for(inst)
    if sub.case != "A":
        raise CaseMismatchError(f"s={inst.s} <= N/2={inst.N}/2: not a case A instance")
    gap = inst.N - inst.s
    symbols = []
    for sender in range(inst.N):
        start = _window_start(inst, sender)
        terms = tuple(((k * gap + start) % inst.N, k) for k in range(sub.z))
        symbols.append(CodedSymbol(id=f"A:{sender}", sender=sender, terms=terms))
    return _assemble(sub, symbols, inst.N)


def plan_case_b(inst: "ProblemInstance") -> TransmissionSchedule:
    """Symbolic case B schedule: N rounds of z-1 two-term symbols."""
    sub = _sub_for(inst)
    if sub.case != "B":
        raise CaseMismatchError(f"s={inst.s} > N/2={inst.N}/2: not a case B instance")
    gap = inst.s - 1
    symbols = []
    for rnd in range(inst.N):
        for k in range(sub.z - 1):
            first = (k * gap + rnd) % inst.N
            second = ((k + 1) * gap + rnd) % inst.N
            sender = (first - inst.a) % inst.N
            symbols.append(
                CodedSymbol(
                    id=f"B:{rnd}:{k}",
                    sender=sender,
                    terms=((first, k), (second, k + 1)),
                )
            )
    return _assemble(sub, symbols, inst.N)


def plan_schedule(inst: "ProblemInstance") -> TransmissionSchedule:
    """Symbolic schedule for either regime (term lists only, no payloads)."""
    if 2 * inst.s > inst.N:
        return plan_case_a(inst)
    return plan_case_b(inst)


def _message_blocks(inst: "ProblemInstance", store: "MessageStore", z: int) -> list[tuple[int, ...]]:
    if store.n_messages != inst.N or store.d_bits != inst.d_bits:
        raise LengthMismatchError(
            f"store holds {store.n_messages} messages of {store.d_bits} bits, "
            f"instance needs {inst.N} of {inst.d_bits}"
        )
    return [
        tuple(int.from_bytes(block, "big") for block in split_message(msg, z))
        for msg in store.messages
    ]


def _fill_payloads(
    plan: TransmissionSchedule, inst: "ProblemInstance", store: "MessageStore"
) -> TransmissionSchedule:
    z = plan.sub.z
    assert plan.sub.d1_bits is not None
    nbytes = plan.sub.d1_bits // 8
    blocks = _message_blocks(inst, store, z)
    filled = []
    for sym in plan.symbols:
        acc = 0
        for m, b in sym.terms:
            acc ^= blocks[m][b]
        filled.append(
            CodedSymbol(id=sym.id, sender=sym.sender, terms=sym.terms, payload=acc.to_bytes(nbytes, "big"))
        )
    return TransmissionSchedule(sub=plan.sub, symbols=tuple(filled), per_sender_bits=plan.per_sender_bits)


def encode_case_a(inst: "ProblemInstance", store: "MessageStore") -> TransmissionSchedule:
    """Case A encoder: user j sends block k of message (k*(N-s) + j + a) mod N for each k."""
    return _fill_payloads(plan_case_a(inst), inst, store)


def encode_case_b(inst: "ProblemInstance", store: "MessageStore") -> TransmissionSchedule:
    """Case B encoder: round i, position k pairs block k of message k*(s-1)+i with the next."""
    return _fill_payloads(plan_case_b(inst), inst, store)


def encode(inst: "ProblemInstance", store: "MessageStore") -> TransmissionSchedule:
    """Encode with the regime the instance's (N, s) selects."""
    if 2 * inst.s > inst.N:
        return encode_case_a(inst, store)
    return encode_case_b(inst, store)


def side_info_view(inst: "ProblemInstance", store: "MessageStore", j: int) -> dict[int, bytes]:
    """The messages user j holds, keyed by message index."""
    start = _window_start(inst, j)
    return {(start + t) % inst.N: store.messages[(start + t) % inst.N] for t in range(inst.s)}


def _check_decode_target(inst: "ProblemInstance", j: int, l: int, i: int, z: int) -> None:
    if not 0 <= j < inst.N:
        raise IndexError(f"user index {j} out of range for N={inst.N}")
    if l not in inst.demands[j]:
        raise DomainError(f"message {l} is not demanded by user {j}")
    if not 0 <= i < z:
        raise IndexError(f"block index {i} out of range for z={z}")


def _payload_int(sym: CodedSymbol) -> int:
    if sym.payload is None:
        raise MissingSymbolError(f"symbol {sym.id} carries no payload (symbolic schedule)")
    return int.from_bytes(sym.payload, "big")


def _side_block(
    inst: "ProblemInstance", j: int, side: Mapping[int, bytes], msg: int, blk: int, nbytes: int
) -> int:
    if not _holds(inst, j, msg) or msg not in side:
        raise SideInfoGapError(
            f"decoding for user {j} needs block {blk} of message {msg}, "
            "which is outside its side information"
        )
    data = side[msg]
    return int.from_bytes(data[blk * nbytes : (blk + 1) * nbytes], "big")


def decode_block_case_a(
    inst: "ProblemInstance",
    j: int,
    l: int,
    i: int,
    schedule: TransmissionSchedule,
    side: Mapping[int, bytes],
) -> tuple[bytes, Derivation]:
    """Recover block i of demanded message l for user j from a case A schedule.

    Block ``(l, i)`` sits at position ``i`` of the symbol whose window starts
    ``i*(N-s)`` indices before ``l``; every other term of that symbol is side
    information for any user that demands ``l``.
    """
    sub = schedule.sub
    if sub.case != "A":
        raise CaseMismatchError("schedule was not built by the case A encoder")
    _check_decode_target(inst, j, l, i, sub.z)
    assert sub.d1_bits is not None
    nbytes = sub.d1_bits // 8
    gap = inst.N - inst.s
    window = (l - gap * i) % inst.N
    sym = schedule.symbol(f"A:{(window - inst.a) % inst.N}")
    if (l, i) not in sym.terms:
        raise MissingSymbolError(f"symbol {sym.id} does not carry block {i} of message {l}")
    acc = _payload_int(sym)
    cancelled = []
    for m, b in sym.terms:
        if (m, b) == (l, i):
            continue
        acc ^= _side_block(inst, j, side, m, b, nbytes)
        cancelled.append((m, b))
    record = Derivation(user=j, message=l, block=i, chain=(sym.id,), cancelled=tuple(cancelled))
    return acc.to_bytes(nbytes, "big"), record


def case_b_chain(inst: "ProblemInstance", j: int, l: int, i1: int, z: int) -> tuple[range, tuple[int, int], int]:
    """Symbol positions, cancelled block, and round for one case B decode.

    With ``gap = s - 1`` and the user's window starting at ``u``, the forward
    reach is ``t1 = ceil(((u - l) mod N) / gap)``, the smallest number of
    gap-steps from ``l`` up into the window.  Blocks ``i1 <= z - 1 - t1``
    chain ``t1`` symbols forward within round ``(l - i1*gap) mod N``,
    surviving block ``(l + t1*gap, i1 + t1)``.  The remaining blocks chain
    backward by the smallest count ``t'`` with ``l - t'*gap`` inside the
    window, surviving block ``(l - t'*gap, i1 - t')``.  The two regimes
    partition ``[0, z-1]`` because ``t1 + t' <= z`` always holds.
    """
    n = inst.N
    gap = inst.s - 1
    u = _window_start(inst, j)
    if (l - u) % n < inst.s:
        raise SideInfoGapError(
            f"message {l} is side information for user {j}; no decode chain exists"
        )
    t1 = _ceil_div((u - l) % n, gap)
    assert 1 <= t1 <= z - 1
    if i1 <= z - 1 - t1:
        positions = range(i1, i1 + t1)
        cancelled = ((l + t1 * gap) % n, i1 + t1)
    else:
        up = (l - u) % n
        back = _ceil_div(up - inst.s + 1, gap)
        assert 1 <= back <= i1
        positions = range(i1 - back, i1)
        cancelled = ((l - back * gap) % n, i1 - back)
    rnd = (l - i1 * gap) % n
    return positions, cancelled, rnd


def decode_block_case_b(
    inst: "ProblemInstance",
    j: int,
    l: int,
    i1: int,
    schedule: TransmissionSchedule,
    side: Mapping[int, bytes],
) -> tuple[bytes, Derivation]:
    """Recover block i1 of demanded message l for user j from a case B schedule.

    XORs the chain of symbols chosen by :func:`case_b_chain` within a single
    round; the chain telescopes to the target block plus one side-information
    block, which is then cancelled.
    """
    sub = schedule.sub
    if sub.case != "B":
        raise CaseMismatchError("schedule was not built by the case B encoder")
    _check_decode_target(inst, j, l, i1, sub.z)
    assert sub.d1_bits is not None
    nbytes = sub.d1_bits // 8
    positions, (cm, cb), rnd = case_b_chain(inst, j, l, i1, sub.z)
    acc = 0
    chain = []
    for k in positions:
        sym = schedule.symbol(f"B:{rnd}:{k}")
        acc ^= _payload_int(sym)
        chain.append(sym.id)
    acc ^= _side_block(inst, j, side, cm, cb, nbytes)
    record = Derivation(user=j, message=l, block=i1, chain=tuple(chain), cancelled=((cm, cb),))
    return acc.to_bytes(nbytes, "big"), record


def decode_user(
    inst: "ProblemInstance",
    j: int,
    schedule: TransmissionSchedule,
    side: Mapping[int, bytes],
) -> tuple[dict[int, bytes], list[Derivation]]:
    """Recover every demanded message for user j, with the full derivation log.

    ``side`` must hold exactly the messages in user j's side-information
    window.  Returns the recovered messages keyed by index, plus one
    derivation record per recovered block.
    """
    if not 0 <= j < inst.N:
        raise IndexError(f"user index {j} out of range for N={inst.N}")
    start = _window_start(inst, j)
    expected = {(start + t) % inst.N for t in range(inst.s)}
    if set(side) != expected:
        raise SideInfoGapError(
            f"side view for user {j} must hold exactly messages {sorted(expected)}, "
            f"got {sorted(side)}"
        )
    decode_block = decode_block_case_a if schedule.sub.case == "A" else decode_block_case_b
    recovered: dict[int, bytes] = {}
    log: list[Derivation] = []
    for l in sorted(inst.demands[j]):
        blocks = []
        for i in range(schedule.sub.z):
            block, record = decode_block(inst, j, l, i, schedule, side)
            blocks.append(block)
            log.append(record)
        recovered[l] = reassemble_message(blocks)
    return recovered, log


def schedule_to_json(schedule: TransmissionSchedule) -> dict:
    """JSON form of a schedule for inspection and debugging."""
    return {
        "case": schedule.sub.case,
        "z": schedule.sub.z,
        "d1_bits": schedule.sub.d1_bits,
        "symbols": [
            {
                "id": sym.id,
                "sender": sym.sender,
                "terms": [[m, b] for m, b in sym.terms],
                "payload_hex": sym.payload.hex() if sym.payload is not None else None,
            }
            for sym in schedule.symbols
        ],
        "per_sender_bits": {str(j): bits for j, bits in sorted(schedule.per_sender_bits.items())},
    }


def schedule_from_json(data: dict, inst: "ProblemInstance") -> TransmissionSchedule:
    """Rebuild a schedule from its JSON form (payloads optional).

    Intended for verifying hand-edited schedules against the decodability
    oracle; no structural checks beyond term shape are applied.
    """
    sub = _sub_for(inst)
    symbols = []
    for entry in data["symbols"]:
        payload_hex = entry.get("payload_hex")
        symbols.append(
            CodedSymbol(
                id=entry["id"],
                sender=int(entry["sender"]),
                terms=tuple((int(m), int(b)) for m, b in entry["terms"]),
                payload=bytes.fromhex(payload_hex) if payload_hex else None,
            )
        )
    return _assemble(sub, symbols, inst.N)
