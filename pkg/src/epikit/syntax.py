"""Terms, atomic formulas, implications and theories, with a small text front end.

Theory files look like::

    sig
      op meet 2
      op bot 0
      rel r 1
    end
    axioms
      meet(x,y) = meet(y,x)
      x = y <= r(x), r(y)
    end

Constants are nullary operations and are written ``bot()``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Union


class SignatureError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Signature:
    ops: tuple[tuple[str, int], ...] = ()
    rels: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple((str(n), int(a)) for n, a in self.ops))
        object.__setattr__(self, "rels", tuple((str(n), int(a)) for n, a in self.rels))
        seen = set()
        for name, arity in self.ops + self.rels:
            if name in seen:
                raise SignatureError(f"duplicate symbol {name!r}")
            seen.add(name)
        for name, arity in self.ops:
            if arity < 0:
                raise SignatureError(f"operation {name!r} has negative arity")
        for name, arity in self.rels:
            if arity < 1:
                raise SignatureError(f"relation {name!r}: relation arity must be >= 1")

    @property
    def op_arity(self) -> dict[str, int]:
        return dict(self.ops)

    @property
    def rel_arity(self) -> dict[str, int]:
        return dict(self.rels)

    @property
    def size(self) -> int:
        return len(self.ops) + len(self.rels)

    @property
    def constants(self) -> list[str]:
        return [n for n, a in self.ops if a == 0]

    @property
    def is_algebraic(self) -> bool:
        return not self.rels

    def extend(self, ops=(), rels=()) -> "Signature":
        return Signature(self.ops + tuple(ops), self.rels + tuple(rels))


# -- terms -------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True, slots=True)
class App:
    op: str
    args: tuple = ()

    def __str__(self):
        return f"{self.op}({','.join(map(str, self.args))})"


Term = Union[Var, App]


def app(op: str, *args: Term) -> App:
    return App(op, tuple(args))


@dataclass(frozen=True, slots=True)
class Eq:
    lhs: Term
    rhs: Term

    def __str__(self):
        return f"{self.lhs} = {self.rhs}"


@dataclass(frozen=True, slots=True)
class Rel:
    rel: str
    args: tuple = ()

    def __str__(self):
        return f"{self.rel}({','.join(map(str, self.args))})"


Atom = Union[Eq, Rel]


@dataclass(frozen=True)
class Implication:
    premises: tuple = ()
    conclusion: Atom = None

    def __post_init__(self):
        # premises form a finite set: drop duplicates, keep first occurrence order
        object.__setattr__(self, "premises", tuple(dict.fromkeys(self.premises)))

    def __str__(self):
        if not self.premises:
            return str(self.conclusion)
        return f"{self.conclusion} <= {', '.join(map(str, self.premises))}"

    @property
    def atoms(self) -> tuple:
        return self.premises + (self.conclusion,)


@dataclass(frozen=True)
class Theory:
    signature: Signature
    axioms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "axioms", tuple(self.axioms))
        for ax in self.axioms:
            for atom in ax.atoms:
                check_atom(self.signature, atom)

    @property
    def var_budget(self) -> int:
        return max((len(vars_of(ax.atoms)) for ax in self.axioms), default=0)

    @property
    def sig_size(self) -> int:
        return self.signature.size


# -- basic operations --------------------------------------------------------

def vars_of(e) -> set[str]:
    """Variable names occurring in a term, atom, implication or collection of those."""
    out: set[str] = set()
    _collect_vars(e, out)
    return out


def _collect_vars(e, out: set) -> None:
    if isinstance(e, Var):
        out.add(e.name)
    elif isinstance(e, (App, Rel)):
        for a in e.args:
            _collect_vars(a, out)
    elif isinstance(e, Eq):
        _collect_vars(e.lhs, out)
        _collect_vars(e.rhs, out)
    elif isinstance(e, Implication):
        for a in e.atoms:
            _collect_vars(a, out)
    else:
        for x in e:
            _collect_vars(x, out)


def ordered_vars(e) -> list[str]:
    """Variables in order of first occurrence (left to right)."""
    seen: dict[str, None] = {}

    def walk(x):
        if isinstance(x, Var):
            seen.setdefault(x.name)
        elif isinstance(x, (App, Rel)):
            for a in x.args:
                walk(a)
        elif isinstance(x, Eq):
            walk(x.lhs)
            walk(x.rhs)
        elif isinstance(x, Implication):
            for a in x.atoms:
                walk(a)
        else:
            for y in x:
                walk(y)

    walk(e)
    return list(seen)


def substitute(t, h: Mapping[str, Term]):
    """Apply a substitution to a term, atom or implication; unmapped variables stay put."""
    if isinstance(t, Var):
        return h.get(t.name, t)
    if isinstance(t, App):
        if not t.args:
            return t
        return App(t.op, tuple(substitute(a, h) for a in t.args))
    if isinstance(t, Eq):
        return Eq(substitute(t.lhs, h), substitute(t.rhs, h))
    if isinstance(t, Rel):
        return Rel(t.rel, tuple(substitute(a, h) for a in t.args))
    if isinstance(t, Implication):
        return Implication(tuple(substitute(p, h) for p in t.premises), substitute(t.conclusion, h))
    raise TypeError(f"cannot substitute into {t!r}")


def compose(g: Mapping[str, Term], h: Mapping[str, Term]) -> dict[str, Term]:
    """The substitution ``g ∘ h``: apply ``h`` first, then ``g``."""
    out = {x: substitute(t, g) for x, t in h.items()}
    for x, t in g.items():
        out.setdefault(x, t)
    return out


def depth(t: Term) -> int:
    if isinstance(t, Var) or not t.args:
        return 0
    return 1 + max(depth(a) for a in t.args)


def size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(a) for a in t.args)


def subterms(t: Term) -> Iterator[Term]:
    yield t
    if isinstance(t, App):
        for a in t.args:
            yield from subterms(a)


def atom_terms(a: Atom) -> tuple:
    return (a.lhs, a.rhs) if isinstance(a, Eq) else a.args


def is_ground(e, generators: Iterable[str] = ()) -> bool:
    return vars_of(e) <= set(generators)


def check_term(sig: Signature, t: Term) -> None:
    if isinstance(t, Var):
        return
    arity = sig.op_arity.get(t.op)
    if arity is None:
        raise SignatureError(f"unknown operation {t.op!r}")
    if arity != len(t.args):
        raise SignatureError(f"operation {t.op!r} expects {arity} arguments, got {len(t.args)}")
    for a in t.args:
        check_term(sig, a)


def check_atom(sig: Signature, a: Atom) -> None:
    if isinstance(a, Rel):
        arity = sig.rel_arity.get(a.rel)
        if arity is None:
            raise SignatureError(f"unknown relation {a.rel!r}")
        if arity != len(a.args):
            raise SignatureError(f"relation {a.rel!r} expects {arity} arguments, got {len(a.args)}")
    for t in atom_terms(a):
        check_term(sig, t)


# -- tokenizer / parser ------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>#[^\n]*)|(?P<nl>\n)|(?P<arrow><=|<-)"
    r"|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_']*)|(?P<punct>[(),=;])"
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    out, line, col, pos = [], 1, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            out.append(Token("nl", s, line, col))
            line, col = line + 1, 1
        else:
            if kind not in ("ws", "comment"):
                out.append(Token(kind, s, line, col))
            col += len(s)
        pos = m.end()
    out.append(Token("eof", "", line, col))
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature | None = None):
        self.toks = tokenize(text)
        self.i = 0
        self.sig = sig

    # token helpers
    def peek(self, skip_nl=True) -> Token:
        if skip_nl:
            while self.toks[self.i].kind == "nl":
                self.i += 1
        return self.toks[self.i]

    def next(self, skip_nl=True) -> Token:
        t = self.peek(skip_nl)
        self.i += 1
        return t

    def expect(self, text: str, skip_nl=True) -> Token:
        t = self.next(skip_nl)
        if t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.line, t.col)
        return t

    def error(self, msg: str, tok: Token):
        raise ParseError(msg, tok.line, tok.col)

    # grammar
    def signature_block(self) -> Signature:
        self.expect("sig")
        ops, rels, seen = [], [], set()
        while True:
            t = self.next()
            if t.text == "end":
                break
            if t.text not in ("op", "rel"):
                self.error(f"expected 'op', 'rel' or 'end', found {t.text!r}", t)
            name = self.next()
            if name.kind != "ident":
                self.error("expected a symbol name", name)
            ar = self.next()
            if ar.kind != "int":
                self.error("expected an arity", ar)
            if name.text in seen:
                self.error(f"duplicate symbol {name.text!r}", name)
            seen.add(name.text)
            if t.text == "rel" and int(ar.text) < 1:
                self.error(f"relation {name.text!r}: relation arity must be >= 1", ar)
            (ops if t.text == "op" else rels).append((name.text, int(ar.text)))
        return Signature(tuple(ops), tuple(rels))

    def term(self) -> Term:
        t = self.next()
        if t.kind != "ident":
            self.error(f"expected a term, found {t.text!r}", t)
        ops = self.sig.op_arity
        if self.peek(skip_nl=False).text == "(":
            if t.text not in ops:
                if t.text in self.sig.rel_arity:
                    self.error(f"relation {t.text!r} used as a term", t)
                self.error(f"unknown operation {t.text!r}", t)
            args = self.arglist()
            if len(args) != ops[t.text]:
                self.error(f"arity mismatch: {t.text!r} expects {ops[t.text]} arguments, got {len(args)}", t)
            return App(t.text, tuple(args))
        if t.text in ops:
            if ops[t.text] != 0:
                self.error(f"arity mismatch: {t.text!r} expects {ops[t.text]} arguments", t)
            return App(t.text, ())
        if t.text in self.sig.rel_arity:
            self.error(f"relation {t.text!r} used as a term", t)
        return Var(t.text)

    def arglist(self) -> list:
        self.expect("(", skip_nl=False)
        args = []
        if self.peek().text == ")":
            self.next()
            return args
        while True:
            args.append(self.term())
            t = self.next()
            if t.text == ")":
                return args
            if t.text != ",":
                self.error(f"expected ',' or ')', found {t.text!r}", t)

    def atom(self) -> Atom:
        t = self.peek()
        if t.kind == "ident" and t.text in self.sig.rel_arity:
            self.next()
            args = self.arglist()
            if len(args) != self.sig.rel_arity[t.text]:
                self.error(
                    f"arity mismatch: relation {t.text!r} expects {self.sig.rel_arity[t.text]} arguments, got {len(args)}", t
                )
            return Rel(t.text, tuple(args))
        lhs = self.term()
        eq = self.next(skip_nl=False)
        if eq.text != "=":
            self.error(f"expected '=', found {eq.text or 'end of line'!r}", eq)
        return Eq(lhs, self.term())

    def implication(self, arrow="<=") -> Implication:
        concl = self.atom()
        prem = []
        if self.peek(skip_nl=False).text == arrow:
            self.next(skip_nl=False)
            prem.append(self.atom())
            while self.peek(skip_nl=False).text == ",":
                self.next(skip_nl=False)
                prem.append(self.atom())
        return Implication(tuple(prem), concl)

    def end_of_item(self, seps=(";",)):
        t = self.peek(skip_nl=False)
        if t.kind in ("nl", "eof") or t.text in seps or t.text == "end":
            if t.text in seps:
                self.next(skip_nl=False)
            return
        self.error(f"unexpected {t.text!r} after item", t)

    def axioms_block(self) -> list:
        self.expect("axioms")
        axioms = []
        while self.peek().text != "end":
            if self.peek().kind == "eof":
                self.error("missing 'end' of axioms block", self.peek())
            axioms.append(self.implication())
            self.end_of_item()
        self.next()
        return axioms

    def expect_eof(self):
        t = self.peek()
        if t.kind != "eof":
            self.error(f"unexpected {t.text!r}", t)


def parse_theory(text: str) -> Theory:
    p = _Parser(text)
    sig = p.signature_block()
    p.sig = sig
    axioms = p.axioms_block() if p.peek().text == "axioms" else []
    p.expect_eof()
    return Theory(sig, tuple(axioms))


def parse_term(text: str, sig: Signature) -> Term:
    p = _Parser(text, sig)
    t = p.term()
    p.expect_eof()
    return t


def parse_atom(text: str, sig: Signature) -> Atom:
    p = _Parser(text, sig)
    a = p.atom()
    p.expect_eof()
    return a


def parse_implication(text: str, sig: Signature) -> Implication:
    """Parse ``CONCL <= P1, P2`` (or a bare atom)."""
    p = _Parser(text, sig)
    imp = p.implication()
    p.expect_eof()
    return imp


def parse_atoms(text: str, sig: Signature) -> list:
    """Atoms separated by newlines, ';' or ','; blank lines and comments ignored."""
    p = _Parser(text, sig)
    out = []
    while p.peek().kind != "eof":
        out.append(p.atom())
        p.end_of_item((";", ","))
    return out


def parse_terms(text: str, sig: Signature) -> list:
    p = _Parser(text, sig)
    out = []
    while p.peek().kind != "eof":
        out.append(p.term())
        p.end_of_item((";", ","))
    return out


def render_signature(sig: Signature) -> str:
    lines = ["sig"]
    lines += [f"  op {n} {a}" for n, a in sig.ops]
    lines += [f"  rel {n} {a}" for n, a in sig.rels]
    lines.append("end")
    return "\n".join(lines)


def render_theory(th: Theory) -> str:
    lines = [render_signature(th.signature), "axioms"]
    lines += [f"  {ax}" for ax in th.axioms]
    lines.append("end")
    return "\n".join(lines) + "\n"
