"""First-order syntax trees and evaluation over finite interpretations."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class App:
    """Function application; arity-0 applications are constants."""

    head: str
    args: tuple["Term", ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.head
        return f"{self.head}({','.join(str(a) for a in self.args)})"


Term = Var | App


FORALL = "!"
EXISTS = "?"
QUANTIFIERS = (FORALL, EXISTS)

AND = "&"
OR = "|"
IMPLIES = "=>"
IMPLIED_BY = "<="
IFF = "<=>"
XOR = "<~>"
NOR = "~|"
NAND = "~&"
BINARY_CONNECTIVES = (AND, OR, IMPLIES, IMPLIED_BY, IFF, XOR, NOR, NAND)


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Equality:
    left: Term
    right: Term


@dataclass(frozen=True, slots=True)
class Truth:
    value: bool  # $true / $false


@dataclass(frozen=True, slots=True)
class Not:
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Binary:
    op: str
    left: "Formula"
    right: "Formula"

    def __post_init__(self) -> None:
        if self.op not in BINARY_CONNECTIVES:
            raise ValueError(f"unknown connective {self.op!r}")


@dataclass(frozen=True, slots=True)
class Quantified:
    kind: str  # FORALL or EXISTS
    variables: tuple[str, ...]
    body: "Formula"

    def __post_init__(self) -> None:
        if self.kind not in QUANTIFIERS:
            raise ValueError(f"unknown quantifier {self.kind!r}")
        if not self.variables:
            raise ValueError("quantifier with empty variable list")


Formula = Atom | Equality | Truth | Not | Binary | Quantified


def negate(f: Formula) -> Formula:
    """Wrap a formula in a negation node, with no simplification."""
    return Not(f)


def _term_vars(t: Term, out: set[str]) -> None:
    if isinstance(t, Var):
        out.add(t.name)
    else:
        for a in t.args:
            _term_vars(a, out)


def free_variables(f: Formula) -> frozenset[str]:
    """Unbound variables of a formula; empty iff the formula is closed."""
    out: set[str] = set()

    def walk(g: Formula, bound: frozenset[str]) -> None:
        if isinstance(g, Atom):
            acc: set[str] = set()
            for a in g.args:
                _term_vars(a, acc)
            out.update(acc - bound)
        elif isinstance(g, Equality):
            acc = set()
            _term_vars(g.left, acc)
            _term_vars(g.right, acc)
            out.update(acc - bound)
        elif isinstance(g, Truth):
            pass
        elif isinstance(g, Not):
            walk(g.body, bound)
        elif isinstance(g, Binary):
            walk(g.left, bound)
            walk(g.right, bound)
        else:
            walk(g.body, bound | set(g.variables))

    walk(f, frozenset())
    return frozenset(out)


@dataclass
class Interpretation:
    """A finite interpretation: tables over the domain {0, ..., domain_size-1}.

    Equality is interpreted as identity on domain elements.  Function tables
    must be total; predicate tuples absent from a table read as false.
    """

    domain_size: int
    predicates: dict[str, dict[tuple[int, ...], bool]] = field(default_factory=dict)
    functions: dict[str, dict[tuple[int, ...], int]] = field(default_factory=dict)


class EvaluationError(Exception):
    """A symbol required by the formula is missing from the interpretation."""


def _eval_term(m: Interpretation, t: Term, env: dict[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise EvaluationError(f"unbound variable {t.name}") from None
    table = m.functions.get(t.head)
    if table is None:
        raise EvaluationError(f"no function table for {t.head}/{len(t.args)}")
    args = tuple(_eval_term(m, a, env) for a in t.args)
    try:
        return table[args]
    except KeyError:
        raise EvaluationError(f"function table for {t.head} not total at {args}") from None


def _eval(m: Interpretation, f: Formula, env: dict[str, int]) -> bool:
    if isinstance(f, Atom):
        table = m.predicates.get(f.pred)
        if table is None:
            raise EvaluationError(f"no predicate table for {f.pred}/{len(f.args)}")
        args = tuple(_eval_term(m, a, env) for a in f.args)
        return table.get(args, False)
    if isinstance(f, Equality):
        return _eval_term(m, f.left, env) == _eval_term(m, f.right, env)
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Not):
        return not _eval(m, f.body, env)
    if isinstance(f, Binary):
        a = _eval(m, f.left, env)
        b = _eval(m, f.right, env)
        if f.op == AND:
            return a and b
        if f.op == OR:
            return a or b
        if f.op == IMPLIES:
            return (not a) or b
        if f.op == IMPLIED_BY:
            return a or (not b)
        if f.op == IFF:
            return a == b
        if f.op == XOR:
            return a != b
        if f.op == NOR:
            return not (a or b)
        return not (a and b)  # NAND
    # Quantified
    domain = range(m.domain_size)
    if f.kind == FORALL:
        return all(
            _eval(m, f.body, {**env, **dict(zip(f.variables, vals))})
            for vals in _assignments(f.variables, domain)
        )
    return any(
        _eval(m, f.body, {**env, **dict(zip(f.variables, vals))})
        for vals in _assignments(f.variables, domain)
    )


def _assignments(variables: tuple[str, ...], domain: range):
    import itertools

    return itertools.product(domain, repeat=len(variables))


def evaluate(m: Interpretation, f: Formula) -> bool:
    """Tarskian truth value of a closed formula under a finite interpretation."""
    fv = free_variables(f)
    if fv:
        raise ValueError(f"formula is not closed; free variables {sorted(fv)}")
    return _eval(m, f, {})
