"""Given-clause refutation prover (binary resolution + positive factoring).

Clause selection picks the lowest-weight unprocessed clause with FIFO
tie-break by age; forward subsumption and tautology deletion are applied to
generated clauses.  Equality is handled by appending congruence axioms under
the reserved origin name "$equality", which is excluded from used premises.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass

from .clauses import (
    EQUALITY_PRED,
    ORIGIN_CONJECTURE,
    ORIGIN_EQUALITY,
    Clause,
    ClauseSet,
    Literal,
    clause_signature,
    clausify,
    contains_equality,
)
from .logic import App, Term, Var, negate
from .tptp import Theory
from .verdicts import SzsStatus


@dataclass(frozen=True)
class ProverLimits:
    wall_clock_budget: float = 10.0
    max_clause_count: int = 100_000
    max_clause_weight: int | None = None

    def __post_init__(self) -> None:
        if self.wall_clock_budget <= 0:
            raise ValueError("wall_clock_budget must be positive")
        if self.max_clause_count <= 0:
            raise ValueError("max_clause_count must be positive")
        if self.max_clause_weight is not None and self.max_clause_weight <= 0:
            raise ValueError("max_clause_weight must be positive")


# Every PICK_GIVEN_RATIO-th selection takes the oldest unprocessed clause
# instead of the lightest; pure lowest-weight selection starves wide input
# clauses behind floods of light resolvents.
PICK_GIVEN_RATIO = 4


@dataclass(frozen=True)
class SearchStats:
    generated: int
    kept: int
    elapsed: float


@dataclass(frozen=True)
class ProofOutcome:
    status: SzsStatus
    used_premises: frozenset[str]
    stats: SearchStats
    axioms_inconsistent: bool = False


# ---------------------------------------------------------------------------
# Substitutions and unification

Subst = dict[str, Term]


def _walk(t: Term, subst: Subst) -> Term:
    while isinstance(t, Var):
        bound = subst.get(t.name)
        if bound is None:
            return t
        t = bound
    return t


def _occurs(name: str, t: Term, subst: Subst) -> bool:
    t = _walk(t, subst)
    if isinstance(t, Var):
        return t.name == name
    return any(_occurs(name, a, subst) for a in t.args)


def _unify(a: Term, b: Term, subst: Subst) -> bool:
    """Extend subst in place to unify a and b; False leaves subst unusable."""
    a = _walk(a, subst)
    b = _walk(b, subst)
    if isinstance(a, Var):
        if isinstance(b, Var) and a.name == b.name:
            return True
        if _occurs(a.name, b, subst):
            return False
        subst[a.name] = b
        return True
    if isinstance(b, Var):
        if _occurs(b.name, a, subst):
            return False
        subst[b.name] = a
        return True
    if a.head != b.head or len(a.args) != len(b.args):
        return False
    return all(_unify(x, y, subst) for x, y in zip(a.args, b.args))


def _unify_args(xs: tuple[Term, ...], ys: tuple[Term, ...], subst: Subst) -> bool:
    if len(xs) != len(ys):
        return False
    return all(_unify(x, y, subst) for x, y in zip(xs, ys))


def _apply(t: Term, subst: Subst) -> Term:
    t = _walk(t, subst)
    if isinstance(t, Var):
        return t
    if not t.args:
        return t
    return App(t.head, tuple(_apply(a, subst) for a in t.args))


def _apply_literal(lit: Literal, subst: Subst) -> Literal:
    return Literal(lit.positive, lit.pred, tuple(_apply(a, subst) for a in lit.args))


def _rename_term(t: Term, prefix: str) -> Term:
    if isinstance(t, Var):
        return Var(prefix + t.name)
    if not t.args:
        return t
    return App(t.head, tuple(_rename_term(a, prefix) for a in t.args))


def _rename_literal(lit: Literal, prefix: str) -> Literal:
    return Literal(lit.positive, lit.pred, tuple(_rename_term(a, prefix) for a in lit.args))


# ---------------------------------------------------------------------------
# Clause normalization, tautology and subsumption checks


def _shape(t: Term) -> str:
    if isinstance(t, Var):
        return "*"
    if not t.args:
        return t.head
    return f"{t.head}({','.join(_shape(a) for a in t.args)})"


def _literal_key(lit: Literal) -> tuple:
    return (lit.pred, not lit.positive, tuple(_shape(a) for a in lit.args))


def normalize(literals: tuple[Literal, ...]) -> tuple[Literal, ...]:
    """Dedupe, sort by a variable-blind key, and rename variables canonically."""
    unique: list[Literal] = []
    seen: set[Literal] = set()
    for lit in literals:
        if lit not in seen:
            seen.add(lit)
            unique.append(lit)
    unique.sort(key=_literal_key)
    mapping: dict[str, Var] = {}

    def rename(t: Term) -> Term:
        if isinstance(t, Var):
            var = mapping.get(t.name)
            if var is None:
                var = Var(f"X{len(mapping)}")
                mapping[t.name] = var
            return var
        if not t.args:
            return t
        return App(t.head, tuple(rename(a) for a in t.args))

    return tuple(
        Literal(l.positive, l.pred, tuple(rename(a) for a in l.args)) for l in unique
    )


def _is_tautology(literals: tuple[Literal, ...]) -> bool:
    positive = {(l.pred, l.args) for l in literals if l.positive}
    return any((l.pred, l.args) in positive for l in literals if not l.positive)


def _match(pattern: Term, target: Term, subst: Subst) -> bool:
    """One-way matching: only pattern variables may be bound."""
    if isinstance(pattern, Var):
        bound = subst.get(pattern.name)
        if bound is None:
            subst[pattern.name] = target
            return True
        return bound == target
    if isinstance(target, Var):
        return False
    if pattern.head != target.head or len(pattern.args) != len(target.args):
        return False
    return all(_match(p, t, subst) for p, t in zip(pattern.args, target.args))


def _literals_by_key(literals: tuple[Literal, ...]) -> dict[tuple[str, bool], list[Literal]]:
    by_key: dict[tuple[str, bool], list[Literal]] = {}
    for lit in literals:
        by_key.setdefault((lit.pred, lit.positive), []).append(lit)
    return by_key


def _subsumes_into(
    c_literals: tuple[Literal, ...],
    d_by_key: dict[tuple[str, bool], list[Literal]],
) -> bool:
    """True if some substitution maps every c literal into d's literal set."""

    def backtrack(i: int, subst: Subst) -> bool:
        if i == len(c_literals):
            return True
        lit = c_literals[i]
        candidates = d_by_key.get((lit.pred, lit.positive))
        if not candidates:
            return False
        for cand in candidates:
            trial = dict(subst)
            if all(_match(p, t, trial) for p, t in zip(lit.args, cand.args)):
                if backtrack(i + 1, trial):
                    return True
        return False

    return backtrack(0, {})


def subsumes(c: Clause, d: Clause) -> bool:
    """True if some substitution maps c's literals into d's literal set."""
    if len(c.literals) > len(d.literals):
        return False
    return _subsumes_into(c.literals, _literals_by_key(d.literals))


# ---------------------------------------------------------------------------
# Congruence axioms for equality


def congruence_axioms(clauses: ClauseSet) -> ClauseSet:
    preds, funcs = clause_signature(clauses)
    origin = frozenset({ORIGIN_EQUALITY})
    x, y, z = Var("X0"), Var("X1"), Var("X2")
    eq = lambda a, b, pos: Literal(pos, EQUALITY_PRED, (a, b))  # noqa: E731
    out = [
        Clause((eq(x, x, True),), origin),
        Clause((eq(x, y, False), eq(y, x, True)), origin),
        Clause((eq(x, y, False), eq(y, z, False), eq(x, z, True)), origin),
    ]
    for name in sorted(preds):
        arity = preds[name]
        for i in range(arity):
            args = tuple(Var(f"A{j}") for j in range(arity))
            repl = tuple(Var("B") if j == i else args[j] for j in range(arity))
            out.append(
                Clause(
                    (
                        eq(args[i], Var("B"), False),
                        Literal(False, name, args),
                        Literal(True, name, repl),
                    ),
                    origin,
                )
            )
    for name in sorted(funcs):
        arity = funcs[name]
        for i in range(arity):
            args = tuple(Var(f"A{j}") for j in range(arity))
            repl = tuple(Var("B") if j == i else args[j] for j in range(arity))
            out.append(
                Clause(
                    (
                        eq(args[i], Var("B"), False),
                        eq(App(name, args), App(name, repl), True),
                    ),
                    origin,
                )
            )
    return tuple(out)


# ---------------------------------------------------------------------------
# Saturation


class _Proc:
    """A processed clause with precomputed matching data."""

    __slots__ = ("clause", "renamed", "by_key", "keyset", "nlits")

    def __init__(self, clause: Clause):
        self.clause = clause
        self.renamed = tuple(_rename_literal(l, "r_") for l in clause.literals)
        self.by_key = _literals_by_key(clause.literals)
        self.keyset = frozenset(self.by_key)
        self.nlits = len(clause.literals)


class _Saturation:
    def __init__(self, initial: ClauseSet, limits: ProverLimits):
        self.limits = limits
        self.deadline = time.monotonic() + limits.wall_clock_budget
        self.heap: list[tuple[int, int, int]] = []  # (weight, age, slot)
        self.slots: list[Clause] = []
        self.done: list[bool] = []  # slot already selected as given
        self.age_cursor = 0
        self.picks = 0
        self.processed: list[_Proc] = []
        self.index: dict[tuple[str, bool], list[tuple[int, int]]] = {}
        # Subsumption candidates bucketed by the key of their first literal.
        self.sub_buckets: dict[tuple[str, bool], list[int]] = {}
        self.seen: set[tuple[Literal, ...]] = set()
        self.generated = 0
        self.kept = 0
        self.discarded_for_weight = False
        self.empty: Clause | None = None
        self.out_of_resources = False
        self._tick = 0
        for clause in initial:
            self._insert(normalize(clause.literals), clause.origins)
            if self.empty is not None:
                return

    def _forward_subsumed(self, literals: tuple[Literal, ...]) -> bool:
        """True if some processed clause subsumes the given literal tuple."""
        by_key = _literals_by_key(literals)
        keyset = frozenset(by_key)
        nlits = len(literals)
        for key in keyset:
            for pidx in self.sub_buckets.get(key, ()):
                proc = self.processed[pidx]
                if proc.nlits <= nlits and proc.keyset <= keyset:
                    if _subsumes_into(proc.clause.literals, by_key):
                        return True
        return False

    def _insert(self, literals: tuple[Literal, ...], origins: frozenset[str]) -> None:
        self.generated += 1
        if not literals:
            self.empty = Clause((), origins)
            return
        if _is_tautology(literals):
            return
        clause = Clause(literals, origins)
        if (
            self.limits.max_clause_weight is not None
            and clause.weight > self.limits.max_clause_weight
        ):
            self.discarded_for_weight = True
            return
        if literals in self.seen:
            return
        if self._forward_subsumed(literals):
            return
        self.seen.add(literals)
        slot = len(self.slots)
        self.slots.append(clause)
        self.done.append(False)
        heapq.heappush(self.heap, (clause.weight, slot, slot))
        self.kept += 1
        if self.kept > self.limits.max_clause_count:
            self.out_of_resources = True

    def _time_up(self) -> bool:
        return time.monotonic() >= self.deadline

    def _pop_given(self) -> int | None:
        """Select the next given clause slot: weight order with an age interleave."""
        self.picks += 1
        if self.picks % PICK_GIVEN_RATIO == 0:
            while self.age_cursor < len(self.slots) and self.done[self.age_cursor]:
                self.age_cursor += 1
            if self.age_cursor < len(self.slots):
                slot = self.age_cursor
                self.done[slot] = True
                return slot
        while self.heap:
            _, _, slot = heapq.heappop(self.heap)
            if not self.done[slot]:
                self.done[slot] = True
                return slot
        # Heap exhausted; fall back to any remaining aged clauses.
        while self.age_cursor < len(self.slots) and self.done[self.age_cursor]:
            self.age_cursor += 1
        if self.age_cursor < len(self.slots):
            slot = self.age_cursor
            self.done[slot] = True
            return slot
        return None

    def run(self) -> str:
        """Returns one of 'refutation', 'closure', 'resource'."""
        if self.empty is not None:
            return "refutation"
        if self.out_of_resources:
            return "resource"
        while True:
            if self._time_up():
                return "resource"
            slot = self._pop_given()
            if slot is None:
                break
            given = self.slots[slot]
            if self._forward_subsumed_strictly(given):
                continue
            gidx = len(self.processed)
            proc = _Proc(given)
            self.processed.append(proc)
            first_key = (given.literals[0].pred, given.literals[0].positive)
            self.sub_buckets.setdefault(first_key, []).append(gidx)
            for li, lit in enumerate(given.literals):
                self.index.setdefault((lit.pred, lit.positive), []).append((gidx, li))
            if not self._infer(given):
                if self.empty is not None:
                    return "refutation"
                return "resource"
        return "closure"

    def _forward_subsumed_strictly(self, given: Clause) -> bool:
        """Popped clauses may have become redundant since their insertion."""
        return self._forward_subsumed(given.literals)

    def _infer(self, given: Clause) -> bool:
        """Generate resolvents and positive factors of the given clause.

        Returns False when the search must stop (refutation or resources).
        """
        # Binary resolution against processed clauses (including given itself).
        for li, lit in enumerate(given.literals):
            partners = self.index.get((lit.pred, not lit.positive), ())
            rest = tuple(l for i, l in enumerate(given.literals) if i != li)
            for pidx, mi in partners:
                partner = self.processed[pidx]
                renamed = partner.renamed
                subst: Subst = {}
                if not _unify_args(lit.args, renamed[mi].args, subst):
                    continue
                resolvent = tuple(_apply_literal(l, subst) for l in rest) + tuple(
                    _apply_literal(l, subst) for i, l in enumerate(renamed) if i != mi
                )
                self._insert(
                    normalize(resolvent), given.origins | partner.clause.origins
                )
                if self.empty is not None or self.out_of_resources:
                    return False
                self._tick += 1
                if self._tick % 256 == 0 and self._time_up():
                    self.out_of_resources = True
                    return False
        # Positive factoring on the given clause.
        positives = [i for i, l in enumerate(given.literals) if l.positive]
        for a in range(len(positives)):
            for b in range(a + 1, len(positives)):
                la = given.literals[positives[a]]
                lb = given.literals[positives[b]]
                if la.pred != lb.pred:
                    continue
                subst = {}
                if not _unify_args(la.args, lb.args, subst):
                    continue
                factor = tuple(_apply_literal(l, subst) for l in given.literals)
                self._insert(normalize(factor), given.origins)
                if self.empty is not None or self.out_of_resources:
                    return False
        return True


def _saturate(clauses: ClauseSet, limits: ProverLimits) -> tuple[str, Clause | None, SearchStats, bool]:
    start = time.monotonic()
    sat = _Saturation(clauses, limits)
    result = sat.run()
    stats = SearchStats(sat.generated, sat.kept, time.monotonic() - start)
    return result, sat.empty, stats, sat.discarded_for_weight


def _input_clauses(named: list[tuple[str, object]]) -> ClauseSet:
    clauses = clausify(named)  # type: ignore[arg-type]
    if contains_equality(clauses):
        clauses = clauses + congruence_axioms(clauses)
    return clauses


def prove(t: Theory, limits: ProverLimits) -> ProofOutcome:
    """Attempt to derive the conjecture of t from its premises."""
    if t.conjecture is None:
        raise ValueError("prove requires a conjecture; use refute for Unsatisfiable-mode problems")
    named = [(p.name, p.formula) for p in t.premises]
    named.append((ORIGIN_CONJECTURE, negate(t.conjecture.formula)))
    clauses = _input_clauses(named)
    result, empty, stats, discarded = _saturate(clauses, limits)
    if result == "refutation":
        assert empty is not None
        used = frozenset(empty.origins) - {ORIGIN_CONJECTURE, ORIGIN_EQUALITY}
        return ProofOutcome(
            SzsStatus.Theorem,
            used,
            stats,
            axioms_inconsistent=ORIGIN_CONJECTURE not in empty.origins,
        )
    if result == "closure":
        status = SzsStatus.GaveUp if discarded else SzsStatus.CounterSatisfiable
        return ProofOutcome(status, frozenset(), stats)
    return ProofOutcome(SzsStatus.ResourceOut, frozenset(), stats)


def refute(t: Theory, limits: ProverLimits) -> ProofOutcome:
    """Attempt to refute a conjecture-free theory (intended status Unsatisfiable)."""
    if t.conjecture is not None:
        raise ValueError("refute requires a theory without a conjecture")
    named = [(p.name, p.formula) for p in t.premises]
    clauses = _input_clauses(named)
    result, empty, stats, discarded = _saturate(clauses, limits)
    if result == "refutation":
        assert empty is not None
        used = frozenset(empty.origins) - {ORIGIN_EQUALITY}
        return ProofOutcome(SzsStatus.Unsatisfiable, used, stats)
    if result == "closure":
        status = SzsStatus.GaveUp if discarded else SzsStatus.Satisfiable
        return ProofOutcome(status, frozenset(), stats)
    return ProofOutcome(SzsStatus.ResourceOut, frozenset(), stats)
