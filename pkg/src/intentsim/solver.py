"""Intention derivation and qualitative action selection.

An intention is a willed tendency over a property. It comes from one of
two channels of the finished decision cycle: explicit intend(T, P)
solutions, and blocked property literals of the failed/partial proof
(required-false becomes reduce, required-true becomes increase).

Scoring matrix per (intention, declared effect on the same property):
same tendency +1; increase vs reduce -1; maintain vs a directional -1;
independent or unmentioned 0. Selection picks the pairwise-compatible
subset of positive-score actions maximizing the score sum; ties go to the
lexicographically smallest sorted name tuple. Selection may leave
intentions unmet: with no positive score nothing is chosen.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Tuple

from .ast import ActionDecl
from .inference import REQUIRED_FALSE, BlockedLiteral
from .terms import Atom, clause_text

INTENTION_TENDENCIES = ("increase", "reduce", "maintain")

EXACT_SEARCH_LIMIT = 15


class InvalidTendency(Exception):
    """An explicit intend solution bound a tendency outside the allowed set."""


@dataclass(frozen=True)
class Intention:
    tendency: str
    property: str
    # provenance, reporting only: ('explicit', clause text | None)
    # or ('blocked', BlockedLiteral)
    origin: tuple = field(default=("explicit", None), compare=False)

    def key(self):
        return (self.tendency, self.property)


@dataclass
class ActionSelection:
    direct: Tuple[str, ...] = ()
    solved: Tuple[str, ...] = ()
    scores: Dict[str, int] = field(default_factory=dict)
    served: Dict[str, Tuple[Intention, ...]] = field(default_factory=dict)
    exact: bool = True


def intend_solution(bindings: dict) -> Tuple[str, str]:
    """Validate one intend(T, P) binding set into (tendency, property)."""
    t = bindings.get("T")
    p = bindings.get("P")
    if not isinstance(t, Atom) or t.name not in INTENTION_TENDENCIES:
        got = t.name if isinstance(t, Atom) else t
        raise InvalidTendency(f"intend/2 bound tendency to {got!r}")
    if not isinstance(p, Atom):
        raise InvalidTendency(f"intend/2 bound property to non-symbol {p!r}")
    return (t.name, p.name)


def derive_intentions(
    explicit: Iterable, blocked: Iterable[BlockedLiteral]
) -> List[Intention]:
    """Merge the two intention channels; explicit origin wins for reporting.

    `explicit` items are (tendency, property) pairs or (tendency, property,
    origin_detail) triples already validated by intend_solution.
    """
    out: List[Intention] = []
    seen = set()

    def add(intention):
        if intention.key() not in seen:
            seen.add(intention.key())
            out.append(intention)

    for item in explicit:
        if len(item) == 3:
            tendency, prop, detail = item
        else:
            tendency, prop = item
            detail = None
        if tendency not in INTENTION_TENDENCIES:
            raise InvalidTendency(f"explicit intention with tendency {tendency!r}")
        add(Intention(tendency, prop, ("explicit", detail)))

    for bl in blocked:
        tendency = "reduce" if bl.polarity == REQUIRED_FALSE else "increase"
        add(Intention(tendency, bl.property, ("blocked", bl)))

    return out


def _match(intention: Intention, action: ActionDecl) -> int:
    effect = action.effect_on(intention.property)
    if effect is None or effect.tendency == "independent":
        return 0
    if effect.tendency == intention.tendency:
        return 1
    return -1


def score_action(action: ActionDecl, intentions: Iterable[Intention]) -> int:
    return sum(_match(i, action) for i in intentions)


def served_intentions(action: ActionDecl, intentions: Iterable[Intention]):
    return tuple(i for i in intentions if _match(i, action) == 1)


def conflicts(a: ActionDecl, b: ActionDecl) -> bool:
    """Two actions conflict iff they declare differing non-independent
    tendencies on a common property."""
    for ea in a.effects:
        if ea.tendency == "independent":
            continue
        eb = b.effect_on(ea.property)
        if eb is None or eb.tendency == "independent":
            continue
        if eb.tendency != ea.tendency:
            return True
    return False


def select_action_set(
    actions: List[ActionDecl],
    intentions: Iterable[Intention],
    exact_limit: int = EXACT_SEARCH_LIMIT,
) -> ActionSelection:
    intentions = list(intentions)
    scores = {a.name: score_action(a, intentions) for a in actions}
    candidates = [a for a in actions if scores[a.name] > 0]

    if len(candidates) <= exact_limit:
        chosen, exact = _exact_best(candidates, scores), True
    else:
        chosen, exact = _greedy_best(candidates, scores), False

    solved = tuple(sorted(a.name for a in chosen))
    served = {a.name: served_intentions(a, intentions) for a in chosen}
    return ActionSelection(direct=(), solved=solved, scores=scores, served=served, exact=exact)


def _exact_best(candidates, scores):
    n = len(candidates)
    if n == 0:
        return []
    conflict = [
        [conflicts(candidates[i], candidates[j]) for j in range(n)] for i in range(n)
    ]
    best_total = 0
    best_names = ()
    best_mask = 0
    for mask in range(1, 1 << n):
        members = [i for i in range(n) if mask & (1 << i)]
        ok = True
        for ai in range(len(members)):
            for bi in range(ai + 1, len(members)):
                if conflict[members[ai]][members[bi]]:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        total = sum(scores[candidates[i].name] for i in members)
        names = tuple(sorted(candidates[i].name for i in members))
        if total > best_total or (total == best_total and best_mask and names < best_names):
            best_total = total
            best_names = names
            best_mask = mask
    return [candidates[i] for i in range(n) if best_mask & (1 << i)]


def _greedy_best(candidates, scores):
    ordered = sorted(candidates, key=lambda a: (-scores[a.name], a.name))
    picked = []
    for a in ordered:
        if all(not conflicts(a, b) for b in picked):
            picked.append(a)
    return picked


def with_direct(selection: ActionSelection, direct, actions, intentions) -> ActionSelection:
    """Runtime helper: record directly proven actions and their served intentions."""
    by_name = {a.name: a for a in actions}
    served = dict(selection.served)
    for name in direct:
        if name not in served and name in by_name:
            served[name] = served_intentions(by_name[name], list(intentions))
    return replace(selection, direct=tuple(sorted(direct)), served=served)


def intention_origin_text(intention: Intention) -> str:
    kind, detail = intention.origin
    if kind == "blocked":
        lit = f"not({detail.property})" if detail.polarity == REQUIRED_FALSE else detail.property
        if detail.rule is not None:
            return f"from blocked {lit} in rule {clause_text(detail.rule)}"
        return f"from blocked {lit}"
    if detail:
        return f"from rule {detail}"
    return "explicit"
