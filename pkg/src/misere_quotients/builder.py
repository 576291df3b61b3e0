"""Empirical quotient construction for octal games.

Positions that behave identically in every tested context are merged into
classes; the classes close into a finite commutative monoid, single heaps map
into it (the pretending function), and each class carries a P or N outcome.
The construction is bounded and therefore only a candidate: two positions
merged here might be distinguished by some context larger than the budget.
The verifier module turns a candidate into a proof.

Classes are discovered with signatures: sig(u) = the outcome of u + w for
every context w with at most m heaps, all heap sizes <= n.  The budget m
escalates until two consecutive rounds produce identical results.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from itertools import combinations_with_replacement

from .octal import GameCode, Position, parse_game_code
from .oracle import (
    MISERE,
    NORMAL,
    BudgetExceededError,
    GenusSymbol,
    Outcome,
    PlayConvention,
    genus,
    nim_value,
    outcome,
)
from .semigroup import (
    FiniteCommutativeMonoid,
    Word,
    enumerate_elements,
    format_word,
    knuth_bendix,
    parse_presentation,
    parse_word,
    reduce_word,
    word_key,
    word_mul,
)

__all__ = [
    "PretendingFunction",
    "OutcomePartition",
    "QuotientAnalysis",
    "build_quotient",
    "phi_of_position",
    "predicted_outcome",
    "detect_period",
    "element_genus",
    "analysis_to_json",
    "analysis_from_json",
    "packaged_presentation",
    "kayles_analysis",
]


@dataclass(frozen=True)
class PretendingFunction:
    """Element index pretended by each single heap, heap 1 first.

    claimed_period = (r0, p) asserts values[k] = values[k+p] from heap r0 on;
    it is an empirical observation until certification.
    """

    values: tuple[int, ...]
    claimed_period: tuple[int, int] | None = None

    def __post_init__(self):
        if self.claimed_period is not None:
            r0, p = self.claimed_period
            if r0 < 1 or p < 1:
                raise ValueError("period indices must be positive")
            for k in range(r0, len(self.values) - p + 1):
                if self.value(k) != self.value(k + p):
                    raise ValueError(f"claimed period fails at heap {k}")

    def value(self, heap: int) -> int:
        if not 1 <= heap <= len(self.values):
            raise ValueError(f"heap {heap} outside stored range")
        return self.values[heap - 1]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class OutcomePartition:
    """P/N labels on monoid elements.  Disjoint and exhaustive; a trivial
    monoid may leave one side empty."""

    p_set: frozenset[int]
    n_set: frozenset[int]

    def __post_init__(self):
        if self.p_set & self.n_set:
            raise ValueError("P and N sets overlap")

    def outcome_of(self, el: int) -> Outcome:
        if el in self.p_set:
            return Outcome.P
        if el in self.n_set:
            return Outcome.N
        raise ValueError(f"element {el} not covered by the partition")


@dataclass
class QuotientAnalysis:
    code: GameCode
    play: PlayConvention
    n: int
    monoid: FiniteCommutativeMonoid
    phi: PretendingFunction
    partition: OutcomePartition
    generator_heaps: dict[str, int] = field(default_factory=dict)
    verified_to: int | None = None
    certified_period: tuple[int, int] | None = None


# ---------------------------------------------------------------------------
# construction


def _letter_names():
    for name in "xzab":
        yield name
    for name in "cdfghijklmnopqrstuvwy":
        yield name
    i = 1
    while True:
        yield f"g{i}"
        i += 1


def _merge(u: tuple[int, ...], v: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(sorted(u + v))


class _Round:
    """One bounded signature round: contexts have at most m heaps."""

    def __init__(self, code: GameCode, n: int, play: PlayConvention, m: int):
        self.code = code
        self.play = play
        heaps = range(1, n + 1)
        self.contexts = [()]
        for k in range(1, m + 1):
            self.contexts.extend(combinations_with_replacement(heaps, k))
        self._sigs: dict[tuple[int, ...], tuple[bool, ...]] = {}

    def sig(self, u: tuple[int, ...]) -> tuple[bool, ...]:
        got = self._sigs.get(u)
        if got is None:
            got = tuple(
                outcome(self.code, Position(_merge(u, w)), self.play) is Outcome.N
                for w in self.contexts
            )
            self._sigs[u] = got
        return got


def _run_round(
    code: GameCode, n: int, play: PlayConvention, m: int, max_classes: int
):
    """Returns (letters, generator_heaps, names, table, phi, p_set) or None
    when the class set fails to close under multiplication at this budget."""
    rnd = _Round(code, n, play, m)
    class_of: dict[tuple[bool, ...], int] = {}
    reps: list[tuple[int, ...]] = []

    def classify(u: tuple[int, ...]) -> int:
        s = rnd.sig(u)
        got = class_of.get(s)
        if got is None:
            if len(reps) >= max_classes:
                raise BudgetExceededError(f"more than {max_classes} classes")
            got = len(reps)
            class_of[s] = got
            reps.append(u)
        return got

    identity_cls = classify(())
    frontier = [identity_cls]
    seen = {identity_cls}
    while frontier:
        cls = frontier.pop(0)
        for h in range(1, n + 1):
            nxt = classify(_merge(reps[cls], (h,)))
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)

    k = len(reps)
    table_cls = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            s = rnd.sig(_merge(reps[i], reps[j]))
            cls = class_of.get(s)
            if cls is None:
                return None  # product fell outside the closure: escalate
            table_cls[i][j] = table_cls[j][i] = cls

    phi_cls = [class_of[rnd.sig((h,))] for h in range(1, n + 1)]

    if play is NORMAL:
        # Cross-check: classes must coincide with nim values on the reps.
        by_nim: dict[int, int] = {}
        for cls, rep in enumerate(reps):
            g = nim_value(code, Position(rep))
            if by_nim.setdefault(g, cls) != cls:
                raise RuntimeError("distinct classes share a nim value")

    # Distinct single-heap classes, tagged by the first heap attaining each.
    candidates: list[tuple[int, int]] = []
    cand_cls: set[int] = set()
    for h in range(1, n + 1):
        cls = phi_cls[h - 1]
        if cls != identity_cls and cls not in cand_cls:
            cand_cls.add(cls)
            candidates.append((h, cls))

    def closure(gens: list[int]) -> set[int]:
        got = {identity_cls}
        frontier = [identity_cls]
        while frontier:
            u = frontier.pop()
            for g in gens:
                v = table_cls[u][g]
                if v not in got:
                    got.add(v)
                    frontier.append(v)
        return got

    # Letters go to a minimal generating set among the single-heap classes,
    # in first-heap order; redundant classes (products of the others, like a
    # square of a later generator) are named by minimal words instead.
    kept = list(candidates)
    dropped = True
    while dropped:
        dropped = False
        for i in range(len(kept)):
            others = [c for j, (_, c) in enumerate(kept) if j != i]
            if kept[i][1] in closure(others):
                del kept[i]
                dropped = True
                break

    letters: list[str] = []
    letter_cls: list[int] = []
    generator_heaps: dict[str, int] = {}
    names = _letter_names()
    for h, cls in kept:
        letter = next(names)
        letters.append(letter)
        letter_cls.append(cls)
        generator_heaps[letter] = h

    # Minimal word per class, layered by degree; multiplying a minimal word
    # by a generator preserves minimality within the next layer.
    zero = tuple(0 for _ in letters)
    units = [
        tuple(1 if j == i else 0 for j in range(len(letters)))
        for i in range(len(letters))
    ]
    min_word: dict[int, Word] = {identity_cls: zero}
    layer = [identity_cls]
    while len(min_word) < k:
        candidates: dict[int, Word] = {}
        for cls in layer:
            for unit, lcls in zip(units, letter_cls):
                target = table_cls[cls][lcls]
                if target in min_word:
                    continue
                w = word_mul(min_word[cls], unit)
                if target not in candidates or word_key(w) < word_key(
                    candidates[target]
                ):
                    candidates[target] = w
        if not candidates:
            raise RuntimeError("letter classes do not generate the monoid")
        for cls, w in candidates.items():
            min_word[cls] = w
        layer = sorted(candidates, key=lambda c: word_key(min_word[c]))

    order = sorted(range(k), key=lambda cls: word_key(min_word[cls]))
    index_of = {cls: i for i, cls in enumerate(order)}
    words = tuple(min_word[cls] for cls in order)
    table = tuple(
        tuple(index_of[table_cls[a][b]] for b in order) for a in order
    )
    phi = tuple(index_of[cls] for cls in phi_cls)
    p_set = frozenset(
        index_of[cls] for cls, rep in enumerate(reps) if not rnd.sig(rep)[0]
    )
    generator_map = {
        letter: index_of[cls] for letter, cls in zip(letters, letter_cls)
    }
    return (
        tuple(letters),
        generator_heaps,
        words,
        table,
        generator_map,
        phi,
        p_set,
    )


def build_quotient(
    code: GameCode,
    n: int,
    play: PlayConvention = MISERE,
    *,
    start_context: int = 3,
    max_context: int = 6,
    max_classes: int = 500,
) -> QuotientAnalysis:
    """Candidate quotient of the game to heap size n.

    Context budgets m = start_context, start_context+1, ... are tried until
    two consecutive rounds agree; raises BudgetExceededError on class blowup
    and RuntimeError if no two rounds ever agree.
    """
    if isinstance(code, str):
        code = parse_game_code(code)
    if n < 1:
        raise ValueError("heap bound must be at least 1")
    previous = None
    for m in range(start_context, max_context + 1):
        result = _run_round(code, n, play, m, max_classes)
        if result is not None and result == previous:
            letters, generator_heaps, words, table, generator_map, phi, p_set = result
            monoid = FiniteCommutativeMonoid(
                names=tuple(format_word(w, letters) for w in words),
                table=table,
                generator_map=generator_map,
                identity_index=0,
                words=words,
                generators=letters,
            )
            values = PretendingFunction(phi)
            values = replace(values, claimed_period=detect_period(values))
            return QuotientAnalysis(
                code=code,
                play=play,
                n=n,
                monoid=monoid,
                phi=values,
                partition=OutcomePartition(
                    p_set=p_set,
                    n_set=frozenset(range(len(words))) - p_set,
                ),
                generator_heaps=generator_heaps,
            )
        previous = result
    raise RuntimeError(
        f"no two consecutive rounds agreed with context budget <= {max_context}"
    )


# ---------------------------------------------------------------------------
# using an analysis


def phi_heap(qa: QuotientAnalysis, heap: int, *, claimed_ok: bool = False) -> int:
    """Element pretended by a single heap, extending by the certified period.

    claimed_ok additionally allows extension by an uncertified claimed period;
    the verifier needs that while a certification is still in progress.
    """
    if heap < 1:
        raise ValueError("heap size must be positive")
    if heap <= len(qa.phi):
        return qa.phi.value(heap)
    period = qa.certified_period
    if period is None and claimed_ok:
        period = qa.phi.claimed_period
    if period is None:
        raise ValueError(f"heap {heap} out of certified range")
    r0, p = period
    return qa.phi.value(r0 + (heap - r0) % p)


def phi_of_position(qa: QuotientAnalysis, position) -> int:
    """Monoid element of a whole position: product of its heap elements."""
    heaps = position.heaps if isinstance(position, Position) else tuple(position)
    return qa.monoid.product(phi_heap(qa, h) for h in heaps)


def predicted_outcome(qa: QuotientAnalysis, position: Position) -> Outcome:
    return qa.partition.outcome_of(phi_of_position(qa, position))


def detect_period(phi: PretendingFunction) -> tuple[int, int] | None:
    """Smallest empirical period of the stored values.

    Returns (r0, p) with the smallest p, then the smallest r0 = 1 + j*p,
    such that values repeat with period p from heap r0 on.  Block alignment
    keeps the result stable as more heaps are appended.  None if nothing
    repeats within the stored range.
    """
    n = len(phi)
    for p in range(1, n // 2 + 1):
        for r0 in range(1, n - p + 1, p):
            if all(phi.value(k) == phi.value(k + p) for k in range(r0, n - p + 1)):
                return (r0, p)
    return None


def element_genus(qa: QuotientAnalysis, el: int, cap: int = 16) -> GenusSymbol:
    """Genus of the representative position of an element.

    The representative multiplies out the element's normal-form word using,
    for each generator, the first heap that pretends to it.  This is a
    display datum: genus is not claimed constant across a whole class.
    """
    words = qa.monoid.words
    if words is None:
        raise ValueError("monoid has no word data")
    heaps: list[int] = []
    for letter, e in zip(qa.monoid.generators, words[el]):
        if e and letter not in qa.generator_heaps:
            raise ValueError(f"no representative heap for generator {letter}")
        heaps.extend([qa.generator_heaps[letter]] * e)
    return genus(qa.code, Position.from_heaps(heaps), cap=cap)


# ---------------------------------------------------------------------------
# serialization

_PLAY_NAMES = {MISERE: "misere", NORMAL: "normal"}


def analysis_to_json(qa: QuotientAnalysis) -> str:
    m = qa.monoid
    doc = {
        "code": str(qa.code),
        "play": _PLAY_NAMES[qa.play],
        "n": qa.n,
        "generators": list(m.generators),
        "words": [list(w) for w in (m.words or ())],
        "names": list(m.names),
        "table": [list(row) for row in m.table],
        "generator_map": {g: i for g, i in sorted(m.generator_map.items())},
        "generator_heaps": dict(sorted(qa.generator_heaps.items())),
        "phi": list(qa.phi.values),
        "claimed_period": list(qa.phi.claimed_period or ()) or None,
        "p_set": sorted(qa.partition.p_set),
        "verified_to": qa.verified_to,
        "certified_period": list(qa.certified_period or ()) or None,
    }
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def analysis_from_json(text: str) -> QuotientAnalysis:
    doc = json.loads(text)
    generators = tuple(doc["generators"])
    words = tuple(tuple(w) for w in doc["words"])
    monoid = FiniteCommutativeMonoid(
        names=tuple(doc["names"]),
        table=tuple(tuple(row) for row in doc["table"]),
        generator_map=dict(doc["generator_map"]),
        identity_index=0,
        words=words or None,
        generators=generators,
    )
    claimed = doc["claimed_period"]
    p_set = frozenset(doc["p_set"])
    return QuotientAnalysis(
        code=parse_game_code(doc["code"]),
        play=MISERE if doc["play"] == "misere" else NORMAL,
        n=doc["n"],
        monoid=monoid,
        phi=PretendingFunction(
            tuple(doc["phi"]), tuple(claimed) if claimed else None
        ),
        partition=OutcomePartition(
            p_set=p_set, n_set=frozenset(range(len(monoid))) - p_set
        ),
        generator_heaps=dict(doc["generator_heaps"]),
        verified_to=doc["verified_to"],
        certified_period=(
            tuple(doc["certified_period"]) if doc["certified_period"] else None
        ),
    )


# ---------------------------------------------------------------------------
# packaged reference data


def _data_text(name: str) -> str:
    from importlib.resources import files

    return files("misere_quotients").joinpath("data", name).read_text()


def packaged_presentation(game: str):
    """Presentation shipped with the package: game "0.123" or "0.77"."""
    by_game = {"0.123": "q0123_presentation.txt", "0.77": "kayles_presentation.txt"}
    if game not in by_game:
        raise ValueError(f"no packaged presentation for {game!r}")
    return parse_presentation(_data_text(by_game[game]))


def kayles_analysis() -> QuotientAnalysis:
    """The full 0.77 analysis from packaged single-heap data.

    The monoid is enumerated from the packaged presentation; the pretending
    function and P-element set come from the packaged table to heap 96 with
    its claimed period.  Not verified; certification is a separate step.
    """
    rws = knuth_bendix(packaged_presentation("0.77"))
    monoid = enumerate_elements(rws, cap=200)
    index = {w: i for i, w in enumerate(monoid.words)}

    def el(text: str) -> int:
        return index[reduce_word(rws, parse_word(text, monoid.generators))]

    period: tuple[int, int] | None = None
    p_words: list[str] = []
    values: dict[int, int] = {}
    for raw in _data_text("kayles_phi.txt").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("period:"):
            r0, p = line[len("period:") :].split()
            period = (int(r0), int(p))
        elif line.startswith("ptypes:"):
            p_words = [w.strip() for w in line[len("ptypes:") :].split("|")]
        else:
            heap, _, word = line.partition(" ")
            values[int(heap)] = el(word)
    n = max(values)
    if sorted(values) != list(range(1, n + 1)):
        raise ValueError("packaged pretending function has gaps")
    p_set = frozenset(el(w) for w in p_words)
    return QuotientAnalysis(
        code=parse_game_code("0.77"),
        play=MISERE,
        n=n,
        monoid=monoid,
        phi=PretendingFunction(
            tuple(values[h] for h in range(1, n + 1)), claimed_period=period
        ),
        partition=OutcomePartition(
            p_set=p_set, n_set=frozenset(range(len(monoid))) - p_set
        ),
        generator_heaps={"x": 1, "z": 2, "w": 5, "v": 9, "t": 12, "f": 25, "g": 27},
    )
