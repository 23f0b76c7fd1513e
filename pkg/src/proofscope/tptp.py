"""TPTP FOF parsing, rendering, include resolution, and signature analysis.

Supported grammar: fof(...) annotated formulas with the connectives
~ & | => <= <=> <~> ~| ~&, quantifiers ! and ?, infix = and !=, $true/$false,
plus cnf(...) inputs (lifted to universally closed formulas) and
include('file') directives.  % comments are stripped.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .logic import (
    AND,
    BINARY_CONNECTIVES,
    EXISTS,
    FORALL,
    OR,
    App,
    Atom,
    Binary,
    Equality,
    Formula,
    Not,
    Quantified,
    Term,
    Truth,
    Var,
)

ROLES = (
    "axiom",
    "hypothesis",
    "definition",
    "lemma",
    "theorem",
    "conjecture",
    "negated_conjecture",
)

KIND_PREDICATE = "predicate"
KIND_FUNCTION = "function"
KIND_CONSTANT = "constant"


class TptpError(Exception):
    """Base class for problem-file errors."""


class ParseError(TptpError):
    def __init__(self, message: str, path: str, line: int, column: int):
        super().__init__(f"{path}:{line}:{column}: {message}")
        self.path = path
        self.line = line
        self.column = column


class IncludeError(TptpError):
    """An include directive could not be resolved."""


@dataclass(frozen=True)
class Provenance:
    path: str
    line: int


@dataclass(frozen=True)
class AnnotatedFormula:
    name: str
    role: str
    formula: Formula
    source: Provenance = field(compare=False, default=Provenance("<memory>", 0))

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("formula name must be nonempty")
        if self.role not in ROLES:
            raise ValueError(f"unknown role {self.role!r}")


@dataclass(frozen=True)
class Theory:
    formulas: tuple[AnnotatedFormula, ...]
    origin: str = field(compare=False, default="<memory>")

    def __post_init__(self) -> None:
        names = [f.name for f in self.formulas]
        if len(set(names)) != len(names):
            raise ValueError("duplicate formula names in theory")
        if sum(1 for f in self.formulas if f.role == "conjecture") > 1:
            raise ValueError("theory has more than one conjecture")

    @property
    def conjecture(self) -> AnnotatedFormula | None:
        for f in self.formulas:
            if f.role == "conjecture":
                return f
        return None

    @property
    def premises(self) -> tuple[AnnotatedFormula, ...]:
        return tuple(f for f in self.formulas if f.role != "conjecture")

    @property
    def premise_names(self) -> tuple[str, ...]:
        return tuple(f.name for f in self.premises)

    def __getitem__(self, name: str) -> AnnotatedFormula:
        for f in self.formulas:
            if f.name == name:
                return f
        raise KeyError(name)

    def restrict(self, premise_names: Sequence[str] | frozenset[str]) -> "Theory":
        """Keep only the given premises (declaration order), plus the conjecture."""
        keep = set(premise_names)
        kept = tuple(
            f for f in self.formulas if f.role == "conjecture" or f.name in keep
        )
        return Theory(kept, origin=self.origin)

    def without_conjecture(self) -> "Theory":
        return Theory(self.premises, origin=self.origin)

    def with_conjecture(self, goal: AnnotatedFormula) -> "Theory":
        """Replace the conjecture (if any) with the given goal formula."""
        base = tuple(f for f in self.premises if f.name != goal.name)
        conj = AnnotatedFormula(goal.name, "conjecture", goal.formula, goal.source)
        return Theory(base + (conj,), origin=self.origin)


# ---------------------------------------------------------------------------
# Lexer

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>%[^\n]*)
    | (?P<lower>[a-z][a-zA-Z0-9_]*)
    | (?P<upper>[A-Z_][a-zA-Z0-9_]*)
    | (?P<dollar>\$[a-z][a-zA-Z0-9_]*)
    | (?P<quoted>'(?:[^'\\]|\\.)*')
    | (?P<integer>\d+)
    | (?P<op><=>|<~>|=>|<=|~\||~&|!=|[()\[\],.:~&|!?=])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # lower | upper | dollar | quoted | integer | op | eof
    value: str
    line: int
    column: int


def _tokenize(text: str, path: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", path, line, col)
        kind = m.lastgroup or ""
        value = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


def _unquote(text: str) -> str:
    body = text[1:-1]
    return body.replace("\\'", "'").replace("\\\\", "\\")


def _quote_if_needed(name: str) -> str:
    if re.fullmatch(r"[a-z][a-zA-Z0-9_]*|\d+", name):
        return name
    return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"


# ---------------------------------------------------------------------------
# Parser

@dataclass
class _SymbolUse:
    kind: str
    arity: int
    line: int
    column: int


class _Parser:
    def __init__(self, tokens: list[Token], path: str):
        self.tokens = tokens
        self.pos = 0
        self.path = path

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, self.path, tok.line, tok.column)

    def expect(self, kind: str, value: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value if value is not None else kind
            got = tok.value if tok.kind != "eof" else "end of input"
            raise self.error(f"expected {want!r}, found {got!r}")
        return self.next()

    # -- statements --------------------------------------------------------

    def parse_statements(self) -> Iterator[tuple[str, object]]:
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "lower" and tok.value in ("fof", "cnf"):
                yield ("formula", self.parse_annotated(tok.value))
            elif tok.kind == "lower" and tok.value == "include":
                yield ("include", self.parse_include())
            else:
                raise self.error("expected 'fof', 'cnf' or 'include'")

    def parse_name(self) -> str:
        tok = self.peek()
        if tok.kind in ("lower", "integer"):
            return self.next().value
        if tok.kind == "quoted":
            return _unquote(self.next().value)
        raise self.error("expected a formula name")

    def parse_annotated(self, keyword: str) -> tuple[AnnotatedFormula, list[tuple[str, _SymbolUse]]]:
        start = self.expect("lower", keyword)
        self.expect("op", "(")
        name = self.parse_name()
        self.expect("op", ",")
        role_tok = self.peek()
        if role_tok.kind != "lower" or role_tok.value not in ROLES:
            raise self.error(
                f"unknown formula role {role_tok.value!r}; expected one of {', '.join(ROLES)}"
            )
        role = self.next().value
        self.expect("op", ",")
        self.uses: list[tuple[str, _SymbolUse]] = []
        if keyword == "fof":
            formula = self.parse_formula(bound=frozenset())
        else:
            formula = self.parse_cnf_formula()
        if self.peek().kind == "op" and self.peek().value == ",":
            raise self.error("annotations are not supported in problem files")
        self.expect("op", ")")
        self.expect("op", ".")
        annotated = AnnotatedFormula(
            name, role, formula, Provenance(self.path, start.line)
        )
        return annotated, self.uses

    def parse_include(self) -> tuple[str, Token]:
        start = self.expect("lower", "include")
        self.expect("op", "(")
        tok = self.peek()
        if tok.kind != "quoted":
            raise self.error("expected a quoted include file name")
        target = _unquote(self.next().value)
        if self.peek().kind == "op" and self.peek().value == ",":
            raise self.error("include with a formula selection list is not supported")
        self.expect("op", ")")
        self.expect("op", ".")
        return target, start

    # -- formulas -----------------------------------------------------------

    def parse_formula(self, bound: frozenset[str]) -> Formula:
        left = self.parse_unitary(bound)
        tok = self.peek()
        if tok.kind == "op" and tok.value in BINARY_CONNECTIVES:
            op = self.next().value
            right = self.parse_unitary(bound)
            result = Binary(op, left, right)
            if op in (AND, OR):
                while self.peek().kind == "op" and self.peek().value == op:
                    self.next()
                    result = Binary(op, result, self.parse_unitary(bound))
            nxt = self.peek()
            if nxt.kind == "op" and nxt.value in BINARY_CONNECTIVES:
                raise self.error(
                    f"missing parentheses: {op!r} followed by {nxt.value!r}"
                )
            return result
        return left

    def parse_unitary(self, bound: frozenset[str]) -> Formula:
        tok = self.peek()
        if tok.kind == "op" and tok.value in (FORALL, EXISTS):
            kind = self.next().value
            self.expect("op", "[")
            variables: list[str] = []
            while True:
                vtok = self.peek()
                if vtok.kind != "upper":
                    raise self.error("expected a variable (uppercase word)")
                variables.append(self.next().value)
                if self.peek().kind == "op" and self.peek().value == ",":
                    self.next()
                    continue
                break
            self.expect("op", "]")
            self.expect("op", ":")
            body = self.parse_unitary(bound | set(variables))
            return Quantified(kind, tuple(variables), body)
        if tok.kind == "op" and tok.value == "~":
            self.next()
            return Not(self.parse_unitary(bound))
        if tok.kind == "op" and tok.value == "(":
            self.next()
            inner = self.parse_formula(bound)
            self.expect("op", ")")
            return inner
        if tok.kind == "dollar":
            if tok.value == "$true":
                self.next()
                return Truth(True)
            if tok.value == "$false":
                self.next()
                return Truth(False)
            raise self.error(f"unsupported defined symbol {tok.value!r}")
        if tok.kind in ("lower", "upper"):
            return self.parse_atomic(bound)
        got = tok.value if tok.kind != "eof" else "end of input"
        raise self.error(f"expected a formula, found {got!r}")

    def parse_atomic(self, bound: frozenset[str]) -> Formula:
        tok = self.peek()
        term = self.parse_term(bound)
        nxt = self.peek()
        if nxt.kind == "op" and nxt.value in ("=", "!="):
            op = self.next().value
            right = self.parse_term(bound)
            eq = Equality(term, right)
            return eq if op == "=" else Not(eq)
        if isinstance(term, Var):
            raise self.error("a variable is not a formula", tok)
        # Reclassify the outermost term as a predicate application.
        self._reclassify_predicate(term, tok)
        return Atom(term.head, term.args)

    def _reclassify_predicate(self, term: App, tok: Token) -> None:
        for i, (sym, use) in enumerate(self.uses):
            if sym == term.head and use.line == tok.line and use.column == tok.column:
                self.uses[i] = (sym, _SymbolUse(KIND_PREDICATE, use.arity, use.line, use.column))
                return

    def parse_term(self, bound: frozenset[str]) -> Term:
        tok = self.peek()
        if tok.kind == "upper":
            self.next()
            if tok.value not in bound:
                raise self.error(f"unbound variable {tok.value!r}", tok)
            return Var(tok.value)
        if tok.kind in ("lower", "quoted"):
            self.next()
            head = tok.value if tok.kind == "lower" else _unquote(tok.value)
            args: list[Term] = []
            if self.peek().kind == "op" and self.peek().value == "(":
                self.next()
                while True:
                    args.append(self.parse_term(bound))
                    if self.peek().kind == "op" and self.peek().value == ",":
                        self.next()
                        continue
                    break
                self.expect("op", ")")
            kind = KIND_FUNCTION if args else KIND_CONSTANT
            self.uses.append((head, _SymbolUse(kind, len(args), tok.line, tok.column)))
            return App(head, tuple(args))
        got = tok.value if tok.kind != "eof" else "end of input"
        raise self.error(f"expected a term, found {got!r}")

    # -- cnf ---------------------------------------------------------------

    def parse_cnf_formula(self) -> Formula:
        parenthesized = False
        if self.peek().kind == "op" and self.peek().value == "(":
            self.next()
            parenthesized = True
        self._cnf_vars: list[str] = []
        disjunction = self.parse_cnf_literal()
        while self.peek().kind == "op" and self.peek().value == "|":
            self.next()
            disjunction = Binary(OR, disjunction, self.parse_cnf_literal())
        if parenthesized:
            self.expect("op", ")")
        if self._cnf_vars:
            return Quantified(FORALL, tuple(self._cnf_vars), disjunction)
        return disjunction

    def parse_cnf_literal(self) -> Formula:
        if self.peek().kind == "op" and self.peek().value == "~":
            self.next()
            return Not(self.parse_cnf_atom())
        return self.parse_cnf_atom()

    def parse_cnf_atom(self) -> Formula:
        tok = self.peek()
        term = self.parse_cnf_term()
        nxt = self.peek()
        if nxt.kind == "op" and nxt.value in ("=", "!="):
            op = self.next().value
            right = self.parse_cnf_term()
            eq = Equality(term, right)
            return eq if op == "=" else Not(eq)
        if isinstance(term, Var):
            raise self.error("a variable is not a literal", tok)
        self._reclassify_predicate(term, tok)
        return Atom(term.head, term.args)

    def parse_cnf_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "upper":
            self.next()
            if tok.value not in self._cnf_vars:
                self._cnf_vars.append(tok.value)
            return Var(tok.value)
        if tok.kind in ("lower", "quoted"):
            self.next()
            head = tok.value if tok.kind == "lower" else _unquote(tok.value)
            args: list[Term] = []
            if self.peek().kind == "op" and self.peek().value == "(":
                self.next()
                while True:
                    args.append(self.parse_cnf_term())
                    if self.peek().kind == "op" and self.peek().value == ",":
                        self.next()
                        continue
                    break
                self.expect("op", ")")
            kind = KIND_FUNCTION if args else KIND_CONSTANT
            self.uses.append((head, _SymbolUse(kind, len(args), tok.line, tok.column)))
            return App(head, tuple(args))
        got = tok.value if tok.kind != "eof" else "end of input"
        raise self.error(f"expected a term, found {got!r}")


# ---------------------------------------------------------------------------
# Include resolution and top-level entry points


def _resolve_include(
    target: str, include_dirs: Sequence[str], including_dir: str | None
) -> str | None:
    candidates = list(include_dirs)
    if including_dir is not None:
        candidates.append(including_dir)
    tptp_root = os.environ.get("TPTP")
    if tptp_root:
        candidates.append(tptp_root)
    for base in candidates:
        path = os.path.join(base, target)
        if os.path.isfile(path):
            return path
    if os.path.isfile(target):
        return target
    return None


def _parse_into(
    text: str,
    path: str,
    include_dirs: Sequence[str],
    formulas: list[AnnotatedFormula],
    uses: list[tuple[str, _SymbolUse, str]],
    active: set[str],
) -> None:
    parser = _Parser(_tokenize(text, path), path)
    for kind, payload in parser.parse_statements():
        if kind == "formula":
            annotated, symbol_uses = payload  # type: ignore[misc]
            formulas.append(annotated)
            uses.extend((sym, use, path) for sym, use in symbol_uses)
        else:
            target, tok = payload  # type: ignore[misc]
            including_dir = os.path.dirname(path) if path != "<memory>" else None
            resolved = _resolve_include(target, include_dirs, including_dir)
            if resolved is None:
                raise IncludeError(
                    f"{path}:{tok.line}:{tok.column}: cannot resolve include({target!r})"
                )
            real = os.path.realpath(resolved)
            if real in active:
                raise IncludeError(
                    f"{path}:{tok.line}:{tok.column}: circular include of {target!r}"
                )
            with open(resolved, "r", encoding="utf-8") as handle:
                included_text = handle.read()
            active.add(real)
            _parse_into(included_text, resolved, include_dirs, formulas, uses, active)
            active.remove(real)


def _check_wellformed(
    formulas: list[AnnotatedFormula], uses: list[tuple[str, _SymbolUse, str]]
) -> None:
    seen_names: dict[str, Provenance] = {}
    conjecture: AnnotatedFormula | None = None
    for f in formulas:
        if f.name.startswith("$"):
            raise ParseError(
                f"formula name {f.name!r} is reserved ('$'-prefixed names are internal)",
                f.source.path,
                f.source.line,
                1,
            )
        if f.name in seen_names:
            raise ParseError(
                f"duplicate formula name {f.name!r} (first declared at "
                f"{seen_names[f.name].path}:{seen_names[f.name].line})",
                f.source.path,
                f.source.line,
                1,
            )
        seen_names[f.name] = f.source
        if f.role == "conjecture":
            if conjecture is not None:
                raise ParseError(
                    f"multiple conjectures: {conjecture.name!r} and {f.name!r}",
                    f.source.path,
                    f.source.line,
                    1,
                )
            conjecture = f
    declared: dict[str, _SymbolUse] = {}
    for sym, use, path in uses:
        prior = declared.get(sym)
        if prior is None:
            declared[sym] = use
        elif (prior.kind, prior.arity) != (use.kind, use.arity):
            raise ParseError(
                f"symbol {sym!r} used as {use.kind}/{use.arity} but previously as "
                f"{prior.kind}/{prior.arity}",
                path,
                use.line,
                use.column,
            )


def parse_problem(
    source: str, include_dirs: Sequence[str] = (), origin: str = "<memory>"
) -> Theory:
    """Parse TPTP FOF/CNF text into a Theory, resolving include directives."""
    formulas: list[AnnotatedFormula] = []
    uses: list[tuple[str, _SymbolUse, str]] = []
    active: set[str] = set()
    if origin != "<memory>":
        active.add(os.path.realpath(origin))
    _parse_into(source, origin, include_dirs, formulas, uses, active)
    _check_wellformed(formulas, uses)
    return Theory(tuple(formulas), origin=origin)


def parse_file(path: str, include_dirs: Sequence[str] = ()) -> Theory:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_problem(handle.read(), include_dirs, origin=path)


# ---------------------------------------------------------------------------
# Rendering


def render_term(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    head = _quote_if_needed(t.head)
    if not t.args:
        return head
    return f"{head}({','.join(render_term(a) for a in t.args)})"


def _render_operand(f: Formula) -> str:
    text = render_formula(f)
    if isinstance(f, Binary):
        return f"({text})"
    return text


def render_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        head = _quote_if_needed(f.pred)
        if not f.args:
            return head
        return f"{head}({','.join(render_term(a) for a in f.args)})"
    if isinstance(f, Equality):
        return f"{render_term(f.left)} = {render_term(f.right)}"
    if isinstance(f, Truth):
        return "$true" if f.value else "$false"
    if isinstance(f, Not):
        if isinstance(f.body, Equality):
            return f"{render_term(f.body.left)} != {render_term(f.body.right)}"
        return f"~{_render_operand(f.body)}"
    if isinstance(f, Binary):
        if f.op in (AND, OR):
            # Flatten the left spine of an associative chain.
            parts: list[str] = [_render_operand(f.right)]
            node: Formula = f.left
            while isinstance(node, Binary) and node.op == f.op:
                parts.append(_render_operand(node.right))
                node = node.left
            parts.append(_render_operand(node))
            return f" {f.op} ".join(reversed(parts))
        return f"{_render_operand(f.left)} {f.op} {_render_operand(f.right)}"
    return f"{f.kind} [{','.join(f.variables)}] : {_render_operand(f.body)}"


def render_theory(t: Theory) -> str:
    lines = []
    for f in t.formulas:
        lines.append(f"fof({_quote_if_needed(f.name)}, {f.role}, {render_formula(f.formula)}).")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# Signature analysis


@dataclass(frozen=True)
class SignatureEntry:
    symbol: str
    kind: str  # predicate | function | constant
    arity: int
    occurrence_count: int
    occurring_in: tuple[str, ...]


def signature_of(t: Theory) -> list[SignatureEntry]:
    """One entry per non-variable symbol, ordered by symbol name.

    Occurrence counts are per syntactic occurrence, not per formula.
    """
    info: dict[str, list] = {}  # symbol -> [kind, arity, count, [names]]

    def record(sym: str, kind: str, arity: int, formula_name: str) -> None:
        entry = info.get(sym)
        if entry is None:
            info[sym] = [kind, arity, 1, [formula_name]]
            return
        if (entry[0], entry[1]) != (kind, arity):
            raise TptpError(
                f"symbol {sym!r} used as {kind}/{arity} but previously as "
                f"{entry[0]}/{entry[1]}"
            )
        entry[2] += 1
        if formula_name not in entry[3]:
            entry[3].append(formula_name)

    def term(tm: Term, formula_name: str) -> None:
        if isinstance(tm, App):
            record(
                tm.head,
                KIND_FUNCTION if tm.args else KIND_CONSTANT,
                len(tm.args),
                formula_name,
            )
            for a in tm.args:
                term(a, formula_name)

    def walk(f: Formula, formula_name: str) -> None:
        if isinstance(f, Atom):
            record(f.pred, KIND_PREDICATE, len(f.args), formula_name)
            for a in f.args:
                term(a, formula_name)
        elif isinstance(f, Equality):
            term(f.left, formula_name)
            term(f.right, formula_name)
        elif isinstance(f, Truth):
            pass
        elif isinstance(f, Not):
            walk(f.body, formula_name)
        elif isinstance(f, Binary):
            walk(f.left, formula_name)
            walk(f.right, formula_name)
        else:
            walk(f.body, formula_name)

    for af in t.formulas:
        walk(af.formula, af.name)
    return [
        SignatureEntry(sym, entry[0], entry[1], entry[2], tuple(entry[3]))
        for sym, entry in sorted(info.items())
    ]


def hapax_legomena(t: Theory) -> list[SignatureEntry]:
    """Signature entries occurring exactly once: the classic typo heuristic."""
    return [e for e in signature_of(t) if e.occurrence_count == 1]
