"""Concrete syntax for entailments and batch files.

Grammar (ASCII)::

    entailment := heap "|-" heap ("," heap)*
    heap       := ["Ex" var+ "."] [pure "&"] spatial
    pure       := cmp ("&" cmp)*        cmp := term op term
    op         := "=" | "!=" | "<" | "<=" | ">" | ">="
    spatial    := atom ("*" atom)*
    atom       := "emp" | term "->" term | "Arr(" term "," term ")"
    term       := factor ("+" factor)*  factor := var | natural

A batch file holds one entailment per line, optionally prefixed by
``name:``.  Blank lines and lines starting with ``#`` are skipped.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .syntax import (
    EMP, TRUE, Arr, Entailment, PointsTo, Pure, SpatialAtom, SymbolicHeap, Term,
    conj, eq, ge, gt, le, lt, neq, separate_binders,
)

__all__ = ["ParseError", "parse_entailment", "parse_heap", "parse_file", "format_file",
           "InputFile", "KEYWORDS"]

KEYWORDS = frozenset({"Ex", "emp", "Arr"})

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<op>\|-|->|!=|<=|>=|[=<>&*,.+()])
  | (?P<num>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_'$]*)
""", re.VERBOSE)

_CMP = {"=": eq, "!=": neq, "<": lt, "<=": le, ">": gt, ">=": ge}


class ParseError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg = msg
        self.line = line
        self.col = col


@dataclass(frozen=True)
class _Tok:
    kind: str  # op | num | ident | eof
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), col0 + pos))
        pos = m.end()
    toks.append(_Tok("eof", "", col0 + len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, line: int = 1, col0: int = 1):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.line = line

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: Optional[_Tok] = None) -> ParseError:
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{msg}, found {found}", self.line, tok.col)

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise self.error(f"expected {text!r}")

    def at_keyword(self, kw: str) -> bool:
        return self.tok.kind == "ident" and self.tok.text == kw

    # -- terms ---------------------------------------------------------------

    def variable(self) -> str:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error("expected a variable")
        self.i += 1
        return t.text

    def factor(self) -> Term:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Term(int(t.text))
        return Term(0, ((self.variable(), 1),))

    def term(self) -> Term:
        t = self.factor()
        while self.accept("+"):
            t = t + self.factor()
        return t

    # -- heaps ---------------------------------------------------------------

    def atom_start(self) -> bool:
        """Whether the upcoming tokens start a spatial atom rather than a comparison."""
        if self.at_keyword("emp") or self.at_keyword("Arr"):
            return True
        j = self.i
        while True:
            if self.toks[j].kind not in ("num", "ident"):
                return False
            j += 1
            if not (self.toks[j].kind == "op" and self.toks[j].text == "+"):
                break
            j += 1
        return self.toks[j].kind == "op" and self.toks[j].text == "->"

    def spatial_atom(self) -> SpatialAtom:
        if self.at_keyword("emp"):
            self.i += 1
            return EMP
        if self.at_keyword("Arr"):
            self.i += 1
            self.expect("(")
            lo = self.term()
            self.expect(",")
            hi = self.term()
            self.expect(")")
            return Arr(lo, hi)
        addr = self.term()
        self.expect("->")
        return PointsTo(addr, self.term())

    def comparison(self) -> Pure:
        lhs = self.term()
        t = self.tok
        if t.kind != "op" or t.text not in _CMP:
            raise self.error("expected a comparison or '->'")
        self.i += 1
        return _CMP[t.text](lhs, self.term())

    def heap(self) -> SymbolicHeap:
        ex: list[str] = []
        if self.at_keyword("Ex"):
            ex_tok = self.tok
            self.i += 1
            while self.tok.kind == "ident" and self.tok.text not in KEYWORDS:
                name = self.variable()
                if name in ex:
                    raise ParseError(f"variable {name!r} bound twice", self.line, ex_tok.col)
                ex.append(name)
            if not ex:
                raise self.error("expected a bound variable")
            self.expect(".")
        pure: list[Pure] = []
        while not self.atom_start():
            pure.append(self.comparison())
            self.expect("&")
        atoms = [self.spatial_atom()]
        while self.accept("*"):
            if self.tok.kind == "eof" or (self.tok.kind == "op" and self.tok.text in ("|-", ",")):
                raise ParseError("dangling '*'", self.line, self.toks[self.i - 1].col)
            atoms.append(self.spatial_atom())
        return SymbolicHeap(tuple(ex), conj(*pure) if pure else TRUE, tuple(atoms))

    def entailment(self) -> Entailment:
        start = self.tok
        ante = self.heap()
        if ante.ex_vars:
            raise ParseError("the antecedent cannot bind variables", self.line, start.col)
        self.expect("|-")
        succ = [self.heap()]
        while self.accept(","):
            succ.append(self.heap())
        if self.tok.kind != "eof":
            raise self.error("expected ',' or end of input")
        return separate_binders(Entailment(ante, tuple(succ)))

    def finish(self) -> None:
        if self.tok.kind != "eof":
            raise self.error("expected end of input")


def parse_entailment(text: str, line: int = 1, col: int = 1) -> Entailment:
    """Parse one entailment.

    Succedent binders that clash with a free variable are renamed (``y`` to
    ``y$1``) so every succedent's existentials are distinct from the free
    variables.  Errors are :class:`ParseError` with line and column.
    """
    return _Parser(text, line, col).entailment()


def parse_heap(text: str) -> SymbolicHeap:
    p = _Parser(text)
    h = p.heap()
    p.finish()
    return h


InputFile = list[tuple[str, Entailment]]

_NAME = re.compile(r"\s*([A-Za-z0-9_.\-$']+)\s*:(?!-)")


def parse_file(text: str) -> InputFile:
    """Named entailments, one per non-blank, non-comment line.

    Unnamed lines get the name ``line<N>``.  Duplicate names are an error.
    """
    out: InputFile = []
    seen: set[str] = set()
    for n, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        m = _NAME.match(raw)
        if m:
            name, body, col = m.group(1), raw[m.end():], m.end() + 1
        else:
            name, body, col = f"line{n}", raw, 1
        if name in seen:
            raise ParseError(f"duplicate entailment name {name!r}", n, 1)
        seen.add(name)
        out.append((name, parse_entailment(body, n, col)))
    return out


def format_file(entries: InputFile) -> str:
    return "".join(f"{name}: {e}\n" for name, e in entries)
