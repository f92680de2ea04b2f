"""Problem instances: users, messages, consecutive side information, demands.

An instance has ``N`` users and ``N`` messages of ``d`` bits each.  User
``j`` holds the window of ``s`` consecutive messages starting at index
``(j + a) mod N`` and demands a nonempty set of messages disjoint from that
window.  When no demands are given, every user demands the full complement
of its window (the cooperative data exchange default).

``d`` must be a positive multiple of ``8 * z`` for the instance's block
count ``z``, so blocks are whole byte strings; the CLI can zero-pad
unaligned inputs to the next multiple.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .codec import check_domain, sub_packetization_level
from .errors import (
    BlockAlignmentError,
    DemandOverlapError,
    DomainError,
    LengthMismatchError,
)

_MASK64 = (1 << 64) - 1


def splitmix64(seed: int) -> Iterator[int]:
    """Infinite stream of 64-bit words from the splitmix64 generator.

    Fully pinned so independently written generators can reproduce message
    payloads from the same seed.
    """
    state = seed & _MASK64
    while True:
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        word = state
        word = ((word ^ (word >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        word = ((word ^ (word >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield word ^ (word >> 31)


def random_bytes(n: int, seed: int) -> bytes:
    """First n bytes of the splitmix64 stream, words encoded little-endian."""
    out = bytearray()
    stream = splitmix64(seed)
    while len(out) < n:
        out += next(stream).to_bytes(8, "little")
    return bytes(out[:n])


@dataclass(frozen=True)
class ProblemInstance:
    """A consecutive, symmetric embedded index coding instance.

    ``demands`` is indexed by user; every entry is a nonempty frozenset of
    message indices disjoint from that user's side-information window.
    Build instances with :func:`new_cs_eicp`, which validates all of this.
    """

    N: int
    s: int
    a: int
    d_bits: int
    demands: tuple[frozenset[int], ...]


@dataclass(frozen=True)
class MessageStore:
    """N messages of identical byte length, indexed 0..N-1."""

    messages: tuple[bytes, ...]

    def __post_init__(self) -> None:
        if not self.messages:
            raise LengthMismatchError("message store cannot be empty")
        first = len(self.messages[0])
        if any(len(m) != first for m in self.messages):
            raise LengthMismatchError("messages differ in length")

    @property
    def n_messages(self) -> int:
        return len(self.messages)

    @property
    def d_bits(self) -> int:
        return len(self.messages[0]) * 8

    @classmethod
    def from_bytes(cls, blob: bytes, n_messages: int, d_bits: int) -> "MessageStore":
        """Parse N concatenated records of d/8 bytes each."""
        if d_bits <= 0 or d_bits % 8:
            raise BlockAlignmentError(f"d={d_bits} bits is not a positive multiple of 8")
        step = d_bits // 8
        if len(blob) != n_messages * step:
            raise LengthMismatchError(
                f"message file holds {len(blob)} bytes, expected {n_messages}*{step}"
            )
        return cls(tuple(blob[i * step : (i + 1) * step] for i in range(n_messages)))

    def to_bytes(self) -> bytes:
        return b"".join(self.messages)

    @classmethod
    def random(cls, n_messages: int, d_bits: int, seed: int) -> "MessageStore":
        """Deterministic pseudo-random messages from a 64-bit seed."""
        if d_bits <= 0 or d_bits % 8:
            raise BlockAlignmentError(f"d={d_bits} bits is not a positive multiple of 8")
        return cls.from_bytes(random_bytes(n_messages * d_bits // 8, seed), n_messages, d_bits)

    @classmethod
    def zeros(cls, n_messages: int, d_bits: int) -> "MessageStore":
        return cls.from_bytes(bytes(n_messages * d_bits // 8), n_messages, d_bits)

    def padded(self, d_bits: int) -> "MessageStore":
        """Zero-pad every message up to d_bits."""
        extra = d_bits // 8 - len(self.messages[0])
        if extra < 0:
            raise LengthMismatchError(f"cannot pad {self.d_bits}-bit messages down to {d_bits}")
        return MessageStore(tuple(m + bytes(extra) for m in self.messages))


def side_info_set(inst: ProblemInstance, j: int) -> tuple[int, ...]:
    """User j's side-information window, in window order."""
    if not 0 <= j < inst.N:
        raise IndexError(f"user index {j} out of range for N={inst.N}")
    start = (j + inst.a) % inst.N
    return tuple((start + t) % inst.N for t in range(inst.s))


def _cde_complement(n_users: int, s: int, a: int, j: int) -> frozenset[int]:
    start = (j + a) % n_users
    window = {(start + t) % n_users for t in range(s)}
    return frozenset(range(n_users)) - window


def default_cde_demands(inst: ProblemInstance) -> tuple[frozenset[int], ...]:
    """Every user demands the full complement of its window (N - s messages)."""
    return tuple(_cde_complement(inst.N, inst.s, inst.a, j) for j in range(inst.N))


def new_cs_eicp(
    n_users: int,
    s: int,
    a: int = 0,
    d_bits: int = 0,
    demands: Mapping[int, Iterable[int]] | None = None,
) -> ProblemInstance:
    """Build and validate an instance.

    ``demands`` maps user index to demanded message indices; users missing
    from the map (or the whole map, when omitted) get the cooperative data
    exchange default, i.e. everything outside their window.
    """
    check_domain(n_users, s)
    if not 0 <= a < n_users:
        raise DomainError(f"offset a={a} outside [0, {n_users - 1}]")
    z = sub_packetization_level(n_users, s).z
    if d_bits <= 0 or d_bits % (8 * z):
        raise BlockAlignmentError(
            f"d={d_bits} bits is not a positive multiple of 8*z={8 * z} for (N={n_users}, s={s})"
        )
    given = dict(demands) if demands is not None else {}
    for j in given:
        if not 0 <= j < n_users:
            raise DomainError(f"demand map names user {j}, outside [0, {n_users - 1}]")
    resolved = []
    for j in range(n_users):
        if j in given:
            wanted = frozenset(int(l) for l in given[j])
            if not wanted:
                raise DomainError(f"user {j} has an empty demand set")
            bad = [l for l in wanted if not 0 <= l < n_users]
            if bad:
                raise DomainError(f"user {j} demands message index {bad[0]}, outside [0, {n_users - 1}]")
            start = (j + a) % n_users
            overlap = sorted(l for l in wanted if (l - start) % n_users < s)
            if overlap:
                raise DemandOverlapError(
                    f"user {j} demands message {overlap[0]}, already in its side information"
                )
        else:
            wanted = _cde_complement(n_users, s, a, j)
        resolved.append(wanted)
    return ProblemInstance(N=n_users, s=s, a=a, d_bits=d_bits, demands=tuple(resolved))


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by :func:`validate`."""

    code: str
    where: int | None = None
    detail: str = ""


def validate(inst: ProblemInstance) -> list[Violation]:
    """Re-check every instance invariant; empty list means valid.

    Violations are returned as data so callers can report them all at once;
    nothing is raised.  Works on hand-built or mutated instances too.
    """
    report: list[Violation] = []
    n, s = inst.N, inst.s
    if n < 3:
        report.append(Violation("DomainError", detail=f"N={n} below 3"))
    if not 2 <= s <= n - 1:
        report.append(Violation("DomainError", detail=f"s={s} outside [2, {n - 1}]"))
    if not 0 <= inst.a < n:
        report.append(Violation("DomainError", detail=f"a={inst.a} outside [0, {n - 1}]"))
    if report:
        return report
    z = sub_packetization_level(n, s).z
    if inst.d_bits <= 0 or inst.d_bits % (8 * z):
        report.append(
            Violation("BlockAlignment", detail=f"d={inst.d_bits} not a positive multiple of {8 * z}")
        )
    if len(inst.demands) != n:
        report.append(Violation("DomainError", detail=f"demand table has {len(inst.demands)} entries"))
        return report
    covered: set[int] = set()
    for j in range(n):
        start = (j + inst.a) % n
        covered.update((start + t) % n for t in range(s))
        wanted = inst.demands[j]
        if not wanted:
            report.append(Violation("EmptyDemand", where=j))
            continue
        for l in sorted(wanted):
            if not 0 <= l < n:
                report.append(Violation("DemandRange", where=j, detail=f"message {l}"))
            elif (l - start) % n < s:
                report.append(Violation("DemandOverlap", where=j, detail=f"message {l}"))
    if covered != set(range(n)):
        report.append(Violation("Coverage", detail="side information does not cover all messages"))
    return report


def aligned_d_bits(n_users: int, s: int, d_bits: int) -> int:
    """Smallest positive multiple of 8*z that is >= d_bits."""
    if d_bits <= 0:
        raise DomainError(f"message length must be positive, got d={d_bits}")
    quantum = 8 * sub_packetization_level(n_users, s).z
    return ((d_bits + quantum - 1) // quantum) * quantum


def instance_to_json(inst: ProblemInstance) -> dict:
    """JSON form: {"N", "s", "a", "d_bits", "demands"} with string user keys."""
    return {
        "N": inst.N,
        "s": inst.s,
        "a": inst.a,
        "d_bits": inst.d_bits,
        "demands": {str(j): sorted(inst.demands[j]) for j in range(inst.N)},
    }


def instance_from_json(data: Mapping) -> ProblemInstance:
    """Parse and validate the JSON form; the demands key may be omitted."""
    demands = data.get("demands")
    parsed = None
    if demands is not None:
        parsed = {int(j): [int(l) for l in ls] for j, ls in demands.items()}
    return new_cs_eicp(
        n_users=int(data["N"]),
        s=int(data["s"]),
        a=int(data.get("a", 0)),
        d_bits=int(data["d_bits"]),
        demands=parsed,
    )
