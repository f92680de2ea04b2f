"""Closed-form normalized rates and baseline comparisons, in exact rationals.

The sub-packetized schedules achieve rate ``1/z`` in case A and
``(z-1)/z`` in case B, where ``z`` is the instance's block count.  The
scalar-linear baseline for the same side-information geometry is
``(N-s+1)/N``, which is also the known lower bound ``(M-s+1)/M`` for the
cooperative data exchange specialization with ``M = N``.

The sub-packetized rate is provably below the baseline when ``(s-1)``
divides ``(N-1)``, when ``(N-s)`` divides ``(N-1)``, or when
``s > (2N+1-sqrt(4N+1))/2``.  The threshold is decided purely in integers:
for ``w = 2N+1-2s``, it holds iff ``w <= 0`` or ``w*w < 4N+1``, so boundary
cases are never misclassified by floating-point square roots.

Outside those conditions the improvement is conjectured but not guaranteed;
:func:`sweep` reports it empirically per row and indeed finds rows where it
fails (first at N=6, s=4, where both rates equal 1/2).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .codec import Case, check_domain, sub_packetization_level
from .errors import DomainError


class Condition(enum.Enum):
    """Which proven superiority condition applies, first match in listing order."""

    DIVIDES_S1 = "DividesS1"
    DIVIDES_NS = "DividesNS"
    THRESHOLD = "Threshold"
    NONE = "None"


def achievable_rate(n_users: int, s: int) -> Fraction:
    """Normalized rate of the sub-packetized schedule: 1/z or (z-1)/z."""
    sub = sub_packetization_level(n_users, s)
    if sub.case == "A":
        return Fraction(1, sub.z)
    return Fraction(sub.z - 1, sub.z)


def scalar_baseline_rate(n_users: int, s: int) -> Fraction:
    """Normalized rate (N-s+1)/N of the optimal scalar-linear code."""
    check_domain(n_users, s)
    return Fraction(n_users - s + 1, n_users)


def cde_lower_bound(n_messages: int, s: int) -> Fraction:
    """Lower bound (M-s+1)/M for cooperative data exchange with equal side info."""
    if not 1 <= s <= n_messages:
        raise DomainError(f"s={s} outside [1, {n_messages}]")
    return Fraction(n_messages - s + 1, n_messages)


def threshold_exceeded(n_users: int, s: int) -> bool:
    """Exact-integer test for s > (2N+1-sqrt(4N+1))/2."""
    w = 2 * n_users + 1 - 2 * s
    return w <= 0 or w * w < 4 * n_users + 1


def conditions_satisfied(n_users: int, s: int) -> frozenset[Condition]:
    """All superiority conditions that hold at (N, s)."""
    check_domain(n_users, s)
    out = set()
    if (n_users - 1) % (s - 1) == 0:
        out.add(Condition.DIVIDES_S1)
    if (n_users - 1) % (n_users - s) == 0:
        out.add(Condition.DIVIDES_NS)
    if threshold_exceeded(n_users, s):
        out.add(Condition.THRESHOLD)
    return frozenset(out)


def superiority_condition(n_users: int, s: int) -> Condition:
    """First satisfied condition in listing order, or NONE."""
    held = conditions_satisfied(n_users, s)
    for cond in (Condition.DIVIDES_S1, Condition.DIVIDES_NS, Condition.THRESHOLD):
        if cond in held:
            return cond
    return Condition.NONE


@dataclass(frozen=True)
class RateComparison:
    """One (N, s) row: our rate vs the scalar baseline, all rationals exact.

    ``conjecture_holds`` is the empirical record of the unproven region
    (``s > N/2`` with no condition satisfied): ``None`` when the row is not
    in that region, else whether the improvement actually holds there.
    """

    N: int
    s: int
    case: Case
    z: int
    ours: Fraction
    baseline: Fraction
    cde_bound: Fraction
    condition: Condition
    all_conditions: frozenset[Condition]
    strictly_better: bool
    conjecture_holds: bool | None


def compare(n_users: int, s: int) -> RateComparison:
    """Full rate comparison at (N, s); strictness is decided by exact arithmetic."""
    sub = sub_packetization_level(n_users, s)
    ours = achievable_rate(n_users, s)
    baseline = scalar_baseline_rate(n_users, s)
    condition = superiority_condition(n_users, s)
    in_open_region = condition is Condition.NONE and 2 * s > n_users
    strictly_better = ours < baseline
    return RateComparison(
        N=n_users,
        s=s,
        case=sub.case,
        z=sub.z,
        ours=ours,
        baseline=baseline,
        cde_bound=cde_lower_bound(n_users, s),
        condition=condition,
        all_conditions=conditions_satisfied(n_users, s),
        strictly_better=strictly_better,
        conjecture_holds=strictly_better if in_open_region else None,
    )


def sweep(n_min: int, n_max: int) -> list[RateComparison]:
    """One comparison row per valid (N, s), N ascending then s ascending."""
    if not 3 <= n_min <= n_max:
        raise DomainError(f"need 3 <= N_min <= N_max, got [{n_min}, {n_max}]")
    return [compare(n, s) for n in range(n_min, n_max + 1) for s in range(2, n)]


SWEEP_COLUMNS = (
    "N",
    "s",
    "case",
    "z",
    "ours_num",
    "ours_den",
    "baseline_num",
    "baseline_den",
    "condition",
    "strictly_better",
    "conjecture_holds",
)


def comparison_row(row: RateComparison) -> tuple[str, ...]:
    """CSV cells for one comparison, rationals as integer pairs."""
    return (
        str(row.N),
        str(row.s),
        row.case,
        str(row.z),
        str(row.ours.numerator),
        str(row.ours.denominator),
        str(row.baseline.numerator),
        str(row.baseline.denominator),
        row.condition.value,
        "true" if row.strictly_better else "false",
        "" if row.conjecture_holds is None else ("true" if row.conjecture_holds else "false"),
    )


def sweep_csv(rows: list[RateComparison]) -> str:
    """Render sweep rows as CSV with the documented column set."""
    lines = [",".join(SWEEP_COLUMNS)]
    lines.extend(",".join(comparison_row(r)) for r in rows)
    return "\n".join(lines) + "\n"


def comparison_json(row: RateComparison) -> dict:
    return {
        "N": row.N,
        "s": row.s,
        "case": row.case,
        "z": row.z,
        "ours": [row.ours.numerator, row.ours.denominator],
        "baseline": [row.baseline.numerator, row.baseline.denominator],
        "cde_bound": [row.cde_bound.numerator, row.cde_bound.denominator],
        "condition": row.condition.value,
        "all_conditions": sorted(c.value for c in row.all_conditions),
        "strictly_better": row.strictly_better,
        "conjecture_holds": row.conjecture_holds,
    }
