"""Brute-force GF(2) decodability certification.

Every coded symbol and every side-information block becomes a binary
coefficient vector over the N*z block space (coordinate ``l*z + k`` is block
``k`` of message ``l``).  A target block is recoverable for a user exactly
when its unit vector lies in the row span of the vectors that user can see.
This makes no reference to the codec's chain logic, so it independently
certifies the encoders.

Rows are packed into Python ints; elimination keeps one basis row per pivot
bit, which is plenty at the dimensions this problem meets.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping, Sequence

from .codec import CodedSymbol, TransmissionSchedule, plan_schedule
from .errors import LengthMismatchError

if TYPE_CHECKING:
    from .instance import ProblemInstance


@dataclass(frozen=True)
class CoeffVector:
    """Binary row over the N*z block space, packed into an int."""

    bits: int
    size: int


def symbol_to_vector(sym: CodedSymbol, z: int, n_messages: int) -> CoeffVector:
    """Coefficient vector of a symbol: a 1 at ``m*z + b`` for every term (m, b)."""
    bits = 0
    for m, b in sym.terms:
        if not 0 <= b < z:
            raise IndexError(f"block index {b} out of range for z={z}")
        if not 0 <= m < n_messages:
            raise IndexError(f"message index {m} out of range for N={n_messages}")
        bits ^= 1 << (m * z + b)
    return CoeffVector(bits=bits, size=n_messages * z)


class _Basis:
    """Row basis over GF(2), one stored row per leading-bit pivot."""

    __slots__ = ("pivots",)

    def __init__(self) -> None:
        self.pivots: dict[int, int] = {}

    def insert(self, row: int) -> bool:
        pivots = self.pivots
        while row:
            lead = row.bit_length() - 1
            other = pivots.get(lead)
            if other is None:
                pivots[lead] = row
                return True
            row ^= other
        return False

    def contains(self, row: int) -> bool:
        pivots = self.pivots
        while row:
            other = pivots.get(row.bit_length() - 1)
            if other is None:
                return False
            row ^= other
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rank_gf2(rows: Sequence[CoeffVector]) -> int:
    """Row rank over GF(2); input order is irrelevant."""
    if rows and any(r.size != rows[0].size for r in rows):
        raise LengthMismatchError("coefficient vectors differ in length")
    basis = _Basis()
    for r in rows:
        basis.insert(r.bits)
    return basis.rank


def _user_basis(
    inst: "ProblemInstance", j: int, schedule: TransmissionSchedule, include_own: bool
) -> _Basis:
    z = schedule.sub.z
    basis = _Basis()
    # Unit rows first: single-bit pivots keep later reductions short.
    start = (j + inst.a) % inst.N
    for t in range(inst.s):
        m = (start + t) % inst.N
        for k in range(z):
            basis.insert(1 << (m * z + k))
    for sym in schedule.symbols:
        if include_own or sym.sender != j:
            basis.insert(symbol_to_vector(sym, z, inst.N).bits)
    return basis


def decodable(
    inst: "ProblemInstance",
    j: int,
    schedule: TransmissionSchedule,
    include_own: bool = True,
) -> dict[tuple[int, int], bool]:
    """Per-block recoverability verdicts for user j against a schedule.

    The verdict for block (l, k) is yes iff adding its unit vector to the
    user's visible rows does not raise the rank.  ``include_own=False`` is
    the strict mode that drops the user's own transmissions; since senders
    build symbols from blocks they hold, it must never change a verdict.
    """
    z = schedule.sub.z
    basis = _user_basis(inst, j, schedule, include_own)
    full = basis.rank == inst.N * z
    verdicts = {}
    for l in range(inst.N):
        for k in range(z):
            verdicts[(l, k)] = True if full else basis.contains(1 << (l * z + k))
    return verdicts


@dataclass(frozen=True)
class DecodabilityReport:
    """Verdicts for every demanded block of every user, plus rank statistics.

    ``matrix_rank`` is the rank of the full symbol matrix (no side
    information), ``dimension`` the block-space size N*z.
    """

    ok: bool
    failures: tuple[tuple[int, int, int], ...]
    verdicts: Mapping[int, Mapping[tuple[int, int], bool]]
    matrix_rank: int
    dimension: int

    def to_json(self) -> dict:
        return {
            "pass": self.ok,
            "failures": [
                {"user": j, "message": l, "block": k} for j, l, k in self.failures
            ],
            "matrix_rank": self.matrix_rank,
            "dimension": self.dimension,
        }


def verify_instance(
    inst: "ProblemInstance",
    schedule: TransmissionSchedule | None = None,
    strict: bool = False,
) -> DecodabilityReport:
    """Certify that every user can recover every block it demands.

    Runs on term lists only; payloads are never consulted.  Pass a schedule
    to certify hand-edited symbol sets, otherwise the instance's own plan is
    used.  ``strict=True`` excludes each user's own transmissions.
    """
    if schedule is None:
        schedule = plan_schedule(inst)
    z = schedule.sub.z
    dim = inst.N * z
    matrix_rank = rank_gf2([symbol_to_vector(sym, z, inst.N) for sym in schedule.symbols])
    failures = []
    verdicts: dict[int, dict[tuple[int, int], bool]] = {}
    for j in range(inst.N):
        basis = _user_basis(inst, j, schedule, include_own=not strict)
        full = basis.rank == dim
        mine: dict[tuple[int, int], bool] = {}
        for l in sorted(inst.demands[j]):
            for k in range(z):
                good = True if full else basis.contains(1 << (l * z + k))
                mine[(l, k)] = good
                if not good:
                    failures.append((j, l, k))
        verdicts[j] = mine
    return DecodabilityReport(
        ok=not failures,
        failures=tuple(failures),
        verdicts=verdicts,
        matrix_rank=matrix_rank,
        dimension=dim,
    )
