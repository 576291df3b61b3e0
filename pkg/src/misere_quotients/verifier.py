"""Proof machinery for candidate quotients.

A candidate analysis asserts an outcome for every position through its
pretending function.  Those assertions are correct to heap size n exactly
when (1) no position asserted P has a move to a position asserted P, and
(2) every non-endgame position asserted N has a move to a position asserted
P.  Both conditions reduce to finite checks over the monoid:

(1) ranges over translates u * (phi(h_f), phi(t)) of the finitely many move
pairs; (2) ranges over pairs (U, s) of a set U of distinct heaps and a
multiplier s drawn from the submonoid S(U) generated by U's elements, since
every position with support U and extra copies of its heaps factors that way,
and every such (U, s) is realized by some concrete position.

Heaps with no moves at all need care under (2): a position made entirely of
them has no move to anything, yet the player to move has already won under
misere play.  Such all-dead products are checked separately for the correct
outcome label and are exempt from the winning-move requirement.

A certified period turns correctness to one finite heap size into
correctness everywhere (the translate sets stop changing), which is the
final deliverable of this module.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .octal import GameCode, moves_from_heap
from .oracle import MISERE, BudgetExceededError
from .builder import QuotientAnalysis, phi_heap

__all__ = [
    "MovePair",
    "Translate",
    "VerificationReport",
    "move_pairs",
    "translates_for_basis",
    "check_no_PP",
    "submonoid_of",
    "solutions_for",
    "winning_moves",
    "check_N_to_P",
    "verify_to_heap",
    "certify_period",
]


@dataclass(frozen=True)
class MovePair:
    """Elements (phi(h_f), phi(t)) of some legal move h_f -> t, with the
    smallest witnessing move recorded."""

    lhs: int
    rhs: int
    source: tuple[int, tuple[int, ...]]


@dataclass(frozen=True)
class Translate:
    basis: int
    pair: MovePair
    start: int
    end: int


@dataclass
class VerificationReport:
    n: int
    pp_violations: list[Translate]
    np_failures: list[tuple[int, tuple[int, ...], int]]
    passed: bool
    stats: dict


def _phi(qa: QuotientAnalysis, heap: int) -> int:
    # Claimed-period extension is allowed here: verification is exactly the
    # step that turns the claim into a certificate.
    return phi_heap(qa, heap, claimed_ok=True)


def move_pairs(code: GameCode, qa: QuotientAnalysis, n: int) -> set[MovePair]:
    """One pair per distinct (phi(h_f), phi(t)) over all moves with f <= n."""
    found: dict[tuple[int, int], tuple[int, tuple[int, ...]]] = {}
    for f in range(1, n + 1):
        lhs = _phi(qa, f)
        for t in sorted(m.heaps for m in moves_from_heap(code, f)):
            rhs = qa.monoid.product(_phi(qa, h) for h in t)
            found.setdefault((lhs, rhs), (f, t))
    return {
        MovePair(lhs, rhs, source) for (lhs, rhs), source in found.items()
    }


def translates_for_basis(
    qa: QuotientAnalysis, n: int, basis: int
) -> list[tuple[int, tuple[int, ...], int, int]]:
    """Every single move f -> t with f <= n translated by one basis element,
    as (f, t, basis*phi(h_f), basis*phi(t)), ordered by (f, t).  This is the
    per-move view; check_no_PP works with the deduplicated pairs instead."""
    table = qa.monoid.table
    rows = []
    for f in range(1, n + 1):
        lhs = _phi(qa, f)
        for t in sorted(m.heaps for m in moves_from_heap(qa.code, f)):
            rhs = qa.monoid.product(_phi(qa, h) for h in t)
            rows.append((f, t, table[basis][lhs], table[basis][rhs]))
    return rows


def check_no_PP(
    qa: QuotientAnalysis, n: int, pairs: set[MovePair] | None = None
) -> list[Translate]:
    """All translates u*(pair) landing P -> P; empty list proves half (1)."""
    if pairs is None:
        pairs = move_pairs(qa.code, qa, n)
    table = qa.monoid.table
    p_set = qa.partition.p_set
    bad = []
    for u in range(len(qa.monoid)):
        row = table[u]
        for pair in pairs:
            if row[pair.lhs] in p_set and row[pair.rhs] in p_set:
                bad.append(Translate(u, pair, row[pair.lhs], row[pair.rhs]))
    return sorted(bad, key=lambda t: (t.basis, t.pair.lhs, t.pair.rhs))


# ---------------------------------------------------------------------------
# the N-to-P half


class _Context:
    """Per-(qa, n) data shared by the subset scans."""

    def __init__(self, qa: QuotientAnalysis, n: int):
        self.qa = qa
        self.n = n
        m = qa.monoid
        self.table = m.table
        k = len(m)
        p_set = qa.partition.p_set
        # goodmask[b]: bit e set iff b*e is an asserted P element.
        self.goodmask = [
            sum(1 << e for e in range(k) if m.table[b][e] in p_set)
            for b in range(k)
        ]
        self.live: list[int] = []
        self.dead: list[int] = []
        self.heap_phi: dict[int, int] = {}
        self.heap_targets: dict[int, list[tuple[int, tuple[int, ...]]]] = {}
        self.heap_targetmask: dict[int, int] = {}
        for h in range(1, n + 1):
            self.heap_phi[h] = _phi(qa, h)
            targets = []
            for t in sorted(t.heaps for t in moves_from_heap(qa.code, h)):
                el = m.product(_phi(qa, x) for x in t)
                targets.append((el, t))
            self.heap_targets[h] = targets
            self.heap_targetmask[h] = 0
            for el, _ in targets:
                self.heap_targetmask[h] |= 1 << el
            (self.live if targets else self.dead).append(h)
        self.by_value: dict[int, list[int]] = {}
        for h in self.live:
            self.by_value.setdefault(self.heap_phi[h], []).append(h)
        self._bad_heaps: dict[tuple[int, int], list[int]] = {}

    def closure_add(self, elems: tuple[int, ...], g: int) -> tuple[int, ...]:
        """Submonoid closure of elems (already a submonoid) plus generator g.

        Since elems is closed, every new element is old * g^k, so it is
        enough to saturate under multiplication by g alone."""
        seen = set(elems)
        frontier = [e for e in (self.table[x][g] for x in elems) if e not in seen]
        seen.update(frontier)
        while frontier:
            u = frontier.pop()
            e = self.table[u][g]
            if e not in seen:
                seen.add(e)
                frontier.append(e)
        return tuple(sorted(seen))

    def bad_heaps(self, value: int, base: int) -> list[int]:
        """Heaps of this phi value with no move target landing in P after
        multiplication by base."""
        key = (value, base)
        got = self._bad_heaps.get(key)
        if got is None:
            good = self.goodmask[base]
            got = [
                h for h in self.by_value[value]
                if not (self.heap_targetmask[h] & good)
            ]
            self._bad_heaps[key] = got
        return got


def _scan_naive(ctx: _Context, watch: frozenset[int], budget: int | None):
    """Enumerate all nonempty sets of distinct live heaps."""
    table = ctx.table
    goodmask = ctx.goodmask
    failures: list[tuple[int, tuple[int, ...], int]] = []
    cases: dict[int, int] = {}
    stats = {"nodes": 0, "evaluations": 0}
    identity = ctx.qa.monoid.identity_index
    live = ctx.live

    def descend(i, heaps, submonoid, product, derivs):
        for j in range(i, len(live)):
            h = live[j]
            phi = ctx.heap_phi[h]
            heaps2 = heaps + (h,)
            derivs2 = tuple(table[d][phi] for d in derivs) + (product,)
            product2 = table[product][phi]
            sub2 = ctx.closure_add(submonoid, phi)
            stats["nodes"] += 1
            for s in sub2:
                omega = table[s][product2]
                if omega not in watch:
                    continue
                stats["evaluations"] += 1
                if budget is not None and stats["evaluations"] > budget:
                    raise BudgetExceededError("subset scan exceeded budget")
                cases[omega] = cases.get(omega, 0) + 1
                if not any(
                    ctx.heap_targetmask[heaps2[i2]]
                    & goodmask[table[s][derivs2[i2]]]
                    for i2 in range(len(heaps2))
                ):
                    failures.append((omega, heaps2, s))
            descend(j + 1, heaps2, sub2, product2, derivs2)

    descend(0, (), (identity,), identity, ())
    return failures, cases, stats


def _scan_collapsed(ctx: _Context, watch: frozenset[int], budget: int | None):
    """Enumerate sets of distinct phi values with a one-heap or two-heap flag.

    Sound and complete against the naive scan: extra copies of a value fold
    into s (the value generates part of S(U)), and a failing combination is
    realizable exactly when each chosen value has at least as many heaps
    failing against its base as the flag demands.
    """
    table = ctx.table
    failures: list[tuple[int, tuple[int, ...], int]] = []
    cases: dict[int, int] = {}
    stats = {"nodes": 0, "evaluations": 0}
    identity = ctx.qa.monoid.identity_index
    values = sorted(ctx.by_value)

    def descend(i, chosen, submonoid, product, derivs):
        for j in range(i, len(values)):
            v = values[j]
            max_mu = 2 if len(ctx.by_value[v]) >= 2 else 1
            sub2 = ctx.closure_add(submonoid, v)
            for mu in (1, 2)[:max_mu]:
                v_mu = table[v][v] if mu == 2 else v
                chosen2 = chosen + ((v, mu),)
                derivs2 = tuple(table[d][v_mu] for d in derivs) + (
                    table[product][v] if mu == 2 else product,
                )
                product2 = table[product][v_mu]
                stats["nodes"] += 1
                for s in sub2:
                    omega = table[s][product2]
                    if omega not in watch:
                        continue
                    stats["evaluations"] += 1
                    if budget is not None and stats["evaluations"] > budget:
                        raise BudgetExceededError("subset scan exceeded budget")
                    cases[omega] = cases.get(omega, 0) + 1
                    witness: list[int] = []
                    for (v2, mu2), d in zip(chosen2, derivs2):
                        bad = ctx.bad_heaps(v2, table[s][d])
                        if len(bad) < mu2:
                            witness = []
                            break
                        witness.extend(bad[:mu2])
                    if witness:
                        failures.append((omega, tuple(sorted(witness)), s))
                descend(j + 1, chosen2, sub2, product2, derivs2)

    descend(0, (), (identity,), identity, ())
    return failures, cases, stats


def submonoid_of(qa: QuotientAnalysis, heaps) -> tuple[int, ...]:
    """S(U): the submonoid generated by the elements of the given heaps."""
    table = qa.monoid.table
    elems = (qa.monoid.identity_index,)
    for h in heaps:
        g = _phi(qa, h)
        seen = set(elems)
        frontier = [e for e in (table[x][g] for x in elems) if e not in seen]
        seen.update(frontier)
        while frontier:
            u = frontier.pop()
            e = table[u][g]
            if e not in seen:
                seen.add(e)
                frontier.append(e)
        elems = tuple(sorted(seen))
    return elems


def solutions_for(qa: QuotientAnalysis, omega: int, heaps) -> tuple[int, ...]:
    """All s in the whole monoid with s * phi(U) = omega, ascending.

    Only the ones also in submonoid_of(qa, heaps) can come from a real
    position with support U; the subset scan ranges over exactly those."""
    product = qa.monoid.product(_phi(qa, h) for h in heaps)
    table = qa.monoid.table
    return tuple(
        s for s in range(len(qa.monoid)) if table[s][product] == omega
    )


def winning_moves(qa: QuotientAnalysis, heaps, s: int):
    """Every move h -> t from the case (U, s) whose translated target is an
    asserted P element, as (h, t, target element)."""
    heaps = tuple(sorted(heaps))
    table = qa.monoid.table
    p_set = qa.partition.p_set
    out = []
    for i, h in enumerate(heaps):
        others = qa.monoid.product(
            _phi(qa, x) for j, x in enumerate(heaps) if j != i
        )
        base = table[s][others]
        for t in sorted(m.heaps for m in moves_from_heap(qa.code, h)):
            el = qa.monoid.product(_phi(qa, x) for x in t)
            target = table[base][el]
            if target in p_set:
                out.append((h, t, target))
    return out


def check_N_to_P(
    qa: QuotientAnalysis,
    n: int,
    omega: int,
    *,
    collapse: bool = True,
    budget: int | None = None,
) -> list[tuple[int, tuple[int, ...], int]]:
    """Failing cases (omega, U, s) with no winning move; empty proves the
    N-to-P half for this element."""
    if omega not in qa.partition.n_set:
        raise ValueError("check_N_to_P expects an asserted N element")
    ctx = _Context(qa, n)
    scan = _scan_collapsed if collapse else _scan_naive
    failures, _, _ = scan(ctx, frozenset([omega]), budget)
    return failures


def verify_to_heap(
    qa: QuotientAnalysis,
    n: int,
    *,
    collapse: bool = True,
    budget: int | None = None,
    omegas=None,
) -> VerificationReport:
    """Run both induction halves for every asserted N element.

    ``omegas`` restricts the N-to-P half to a subset of elements so a long
    verification can be resumed piecemeal; the report then only speaks for
    those elements.
    """
    ctx = _Context(qa, n)
    pairs = move_pairs(qa.code, qa, n)
    pp = check_no_PP(qa, n, pairs)
    watch = frozenset(qa.partition.n_set if omegas is None else omegas)
    scan = _scan_collapsed if collapse else _scan_naive
    failures, cases, stats = scan(ctx, watch, budget)

    # All-dead positions have no moves: their label must be N under misere
    # play (the player to move has already won) and P under normal play.
    table = qa.monoid.table
    dead_failures: list[tuple[int, tuple[int, ...], int]] = []
    required = qa.partition.n_set if qa.play is MISERE else qa.partition.p_set
    reachable: dict[int, tuple[int, ...]] = {qa.monoid.identity_index: ()}
    frontier = [qa.monoid.identity_index]
    while frontier:
        u = frontier.pop()
        for h in ctx.dead:
            v = table[u][ctx.heap_phi[h]]
            if v not in reachable:
                reachable[v] = reachable[u] + (h,)
                frontier.append(v)
    for el, heaps in sorted(reachable.items()):
        if el not in required:
            dead_failures.append((el, heaps, qa.monoid.identity_index))

    np_failures = sorted(failures + dead_failures)
    stats = dict(stats)
    stats["cases_by_omega"] = {k: cases[k] for k in sorted(cases)}
    stats["move_pairs"] = len(pairs)
    stats["dead_heaps"] = list(ctx.dead)
    return VerificationReport(
        n=n,
        pp_violations=pp,
        np_failures=np_failures,
        passed=not pp and not np_failures,
        stats=stats,
    )


def certify_period(
    qa: QuotientAnalysis,
    r0: int,
    p: int,
    *,
    collapse: bool = True,
    budget: int | None = None,
) -> QuotientAnalysis | None:
    """Prove the analysis correct for every heap size.

    Requires the stored values to actually repeat with period p from r0 on,
    with at least one full period stored.  Verifies correctness to heap size
    2*r0 + p + places - 1; past that bound the translate sets repeat, so the
    quotient decides all larger heaps too.  Returns the certified analysis,
    or None when the verification fails.
    """
    if r0 < 1 or p < 1:
        raise ValueError("period indices must be positive")
    phi = qa.phi
    if len(phi) < r0 + p - 1:
        raise ValueError("stored values do not cover one full period")
    for k in range(r0, len(phi) - p + 1):
        if phi.value(k) != phi.value(k + p):
            raise ValueError(f"claimed period fails at heap {k}")
    n_window = 2 * r0 + p + qa.code.places - 1
    claimed = replace(phi, claimed_period=(r0, p))
    candidate = replace(qa, phi=claimed)
    report = verify_to_heap(candidate, n_window, collapse=collapse, budget=budget)
    if not report.passed:
        return None
    return replace(
        candidate, verified_to=n_window, certified_period=(r0, p)
    )
