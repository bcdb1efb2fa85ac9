"""Three truth values, pointer sentences, and necessitation tables.

A sentence either talks about itself (``SelfRef``) or about a quoted sentence
(``Quote``).  Evaluating a truth predicate means going to the referent and
evaluating it first; if that walk comes back to a sentence already on the
current path, the loop never finishes and the sentence caught in it gets
``GAP``.  Truth predicates applied from outside act on the completed value,
so ``NotTrue`` of ``GAP`` is ``T``.  Word-count predicates only look at the
rendered text and never loop.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, NamedTuple, Sequence, Union


class TruthValue3(str, Enum):
    T = "T"
    F = "F"
    GAP = "GAP"

    def __str__(self) -> str:
        return self.value


T, F, GAP = TruthValue3.T, TruthValue3.F, TruthValue3.GAP


# -- predicates and sentences ----------------------------------------------------

@dataclass(frozen=True)
class NotTrue:
    pass


@dataclass(frozen=True)
class IsTrue:
    pass


@dataclass(frozen=True)
class HasWordCount:
    n: int
    negated: bool = False


Predicate = Union[NotTrue, IsTrue, HasWordCount]


@dataclass(frozen=True)
class SelfRef:
    predicate: Predicate


@dataclass(frozen=True)
class Quote:
    sentence: "Sentence"
    predicate: Predicate


Sentence = Union[SelfRef, Quote]

_NUMBER_WORDS = (
    "zero one two three four five six seven eight nine ten eleven twelve thirteen "
    "fourteen fifteen sixteen seventeen eighteen nineteen twenty"
).split()


def number_word(n: int) -> str:
    return _NUMBER_WORDS[n] if 0 <= n < len(_NUMBER_WORDS) else str(n)


def _phrase(pred: Predicate) -> str:
    if isinstance(pred, NotTrue):
        return "is not true"
    if isinstance(pred, IsTrue):
        return "is true"
    noun = "word" if pred.n == 1 else "words"
    verb = "does not have" if pred.negated else "has"
    return f"{verb} {number_word(pred.n)} {noun}"


def render(sentence: Sentence) -> str:
    """English surface form, without a final period."""
    if isinstance(sentence, SelfRef):
        return f"This sentence {_phrase(sentence.predicate)}"
    return f'"{render(sentence.sentence)}" {_phrase(sentence.predicate)}'


def word_count(text: str) -> int:
    return sum(1 for tok in text.split() if tok.strip('"'))


# the six lines used in the table reproduction
LINE1 = SelfRef(NotTrue())
LINE2 = Quote(LINE1, NotTrue())
LINE3 = SelfRef(HasWordCount(5, negated=True))
LINE4 = Quote(LINE3, HasWordCount(5, negated=True))
LINE5 = SelfRef(HasWordCount(7, negated=True))
LINE6 = Quote(LINE5, HasWordCount(7, negated=True))
LINES = (LINE1, LINE2, LINE3, LINE4, LINE5, LINE6)


# -- evaluation ---------------------------------------------------------------------

class PathStep(NamedTuple):
    sentence: Sentence
    note: str


@dataclass(frozen=True)
class Evaluation:
    value: TruthValue3
    path: tuple[PathStep, ...]

    @property
    def loop_at(self) -> int | None:
        for i, st in enumerate(self.path):
            if st.note == "loop":
                return i
        return None


def _apply(pred: Predicate, v: TruthValue3) -> TruthValue3:
    if isinstance(pred, NotTrue):
        return F if v is T else T
    return T if v is T else F


def _eval(s: Sentence, path: tuple[Sentence, ...], log: list[PathStep]) -> TruthValue3:
    ref = s if isinstance(s, SelfRef) else s.sentence
    pred = s.predicate
    if isinstance(pred, HasWordCount):
        holds = word_count(render(ref)) == pred.n
        v = T if holds != pred.negated else F
        log.append(PathStep(s, f"counted {word_count(render(ref))} words"))
        return v
    here = path + (s,)
    if ref in here:
        log.append(PathStep(s, "loop"))
        return GAP
    log.append(PathStep(s, "go to referent"))
    return _apply(pred, _eval(ref, here, log))


def evaluate_with_path(sentence: Sentence) -> Evaluation:
    log: list[PathStep] = []
    v = _eval(sentence, (), log)
    return Evaluation(v, tuple(log))


def evaluate(sentence: Sentence) -> TruthValue3:
    return evaluate_with_path(sentence).value


# -- notation -------------------------------------------------------------------------

class NotationError(ValueError):
    pass


def _parse_pred(text: str) -> Predicate:
    t = text.strip()
    if t == "not-true":
        return NotTrue()
    if t == "true":
        return IsTrue()
    for prefix, neg in (("not-words(", True), ("words(", False)):
        if t.startswith(prefix) and t.endswith(")"):
            body = t[len(prefix):-1].strip()
            if not body.isdigit():
                raise NotationError(f"word count must be a natural: {body!r}")
            return HasWordCount(int(body), neg)
    raise NotationError(f"unknown predicate {t!r}")


def parse_sentence(text: str) -> Sentence:
    """``self: P`` or ``quote(<sentence>): P`` with P one of ``not-true``,
    ``true``, ``words(n)``, ``not-words(n)``."""
    t = text.strip()
    if t.startswith("self:"):
        return SelfRef(_parse_pred(t[5:]))
    if t.startswith("quote("):
        depth = 0
        for i in range(5, len(t)):
            if t[i] == "(":
                depth += 1
            elif t[i] == ")":
                depth -= 1
                if depth == 0:
                    rest = t[i + 1:].lstrip()
                    if not rest.startswith(":"):
                        raise NotationError("expected ':' after quote(...)")
                    return Quote(parse_sentence(t[6:i]), _parse_pred(rest[1:]))
        raise NotationError("unbalanced parentheses")
    raise NotationError(f"cannot parse {t!r}")


def format_sentence(s: Sentence) -> str:
    def pred(p: Predicate) -> str:
        if isinstance(p, NotTrue):
            return "not-true"
        if isinstance(p, IsTrue):
            return "true"
        return f"{'not-' if p.negated else ''}words({p.n})"

    if isinstance(s, SelfRef):
        return f"self: {pred(s.predicate)}"
    return f"quote({format_sentence(s.sentence)}): {pred(s.predicate)}"


# -- necessitation ------------------------------------------------------------------------

class NecessitationRow(NamedTuple):
    left: TruthValue3
    right: TruthValue3


def necessitation_holds(rows: Iterable[NecessitationRow]) -> bool:
    """Whenever the left side is T, so is the right."""
    return all(r.right is T for r in rows if r.left is T)


def equivalence_refuted(rows: Iterable[NecessitationRow]) -> bool:
    return any(r.right is T and r.left is not T for r in rows)


def parse_rows(text: str) -> list[NecessitationRow]:
    """One row per line, ``LEFT RIGHT`` or ``LEFT,RIGHT``."""
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].replace(",", " ").split()
        if not line:
            continue
        if len(line) != 2:
            raise NotationError(f"row needs two values: {raw!r}")
        try:
            rows.append(NecessitationRow(TruthValue3(line[0].upper()), TruthValue3(line[1].upper())))
        except ValueError as exc:
            raise NotationError(str(exc)) from None
    return rows


def witnessed_rows(pairs: Sequence[tuple[Sentence, Sentence]] = ((LINE3, LINE4), (LINE1, LINE2), (LINE5, LINE6))):
    return [NecessitationRow(evaluate(a), evaluate(b)) for a, b in pairs]


# -- verdicts as truth talk ----------------------------------------------------------------

def verdict_to_truth(verdict, polarity: str = "halts") -> TruthValue3:
    """Truth of "X halts" (or, with polarity "not-halts", of "X does not halt").

    Only a definite verdict grounds a value; Unknown leaves a gap.
    """
    from .decider import Halts, NotHalts, Unknown

    if isinstance(verdict, Unknown):
        return GAP
    if isinstance(verdict, Halts):
        v = T
    elif isinstance(verdict, NotHalts):
        v = F
    else:
        raise TypeError(f"not a verdict: {verdict!r}")
    if polarity == "halts":
        return v
    if polarity == "not-halts":
        return F if v is T else T
    raise ValueError(f"unknown polarity {polarity!r}")


# three wordings for the program rows, keyed by wording then value
TABLE_LABELS = {
    "determined": {T: "determined to halt", GAP: "not determined to halt", F: "determined not to halt"},
    "verifiable": {T: "verifiably halts", GAP: "not verifiable that it halts", F: "verifiably does not halt"},
    "true": {T: "halts", GAP: "not true that it halts", F: "does not halt"},
}

REFERENCE_ROWS = (NecessitationRow(T, T), NecessitationRow(GAP, T), NecessitationRow(F, F))


@dataclass(frozen=True)
class ProgramRow:
    name: str
    left_query: tuple
    right_query: tuple
    left_verdict: object
    right_verdict: object

    @property
    def row(self) -> NecessitationRow:
        return NecessitationRow(verdict_to_truth(self.left_verdict), verdict_to_truth(self.right_verdict))


def gallery_rows(fuel: int = 10**5) -> list[ProgramRow]:
    """(R(), T(r)) pairs from the gallery and two plain fixpoints, decided.

    The diagonal pairs are decided in strict mode; the plain fixpoints, which
    make no reflective calls, in general mode.
    """
    from .decider import decide
    from .fixpoint import T_FAMILY, T_LOOP, build_gallery, construct_fixpoint
    from .lang import encode
    from .machine import Mode

    g = build_gallery()
    d = g.designated
    out = []
    for name, T_prog in (("constant fixpoint", T_FAMILY["constant"]), ("looping fixpoint", T_LOOP)):
        fx = construct_fixpoint(T_prog)
        lq, rq = (fx.r, None), (encode(T_prog), fx.r)
        out.append(ProgramRow(name, lq, rq, decide(lq, Mode.GENERAL, fuel, d), decide(rq, Mode.GENERAL, fuel, d)))
    for name, lq, rq in (("C_s() / C_k(s)", (d.s, None), (d.k, d.s)), ("C_q() / C_p(q)", (d.q, None), (d.p, d.q))):
        out.append(ProgramRow(name, lq, rq, decide(lq, Mode.STRICT, fuel, d), decide(rq, Mode.STRICT, fuel, d)))
    return out
