"""Lexer and parser for the theory/proof-script language.

Scripts are a sequence of declarations; formulas and terms appear inside
double-quoted strings, Isabelle-style, so the declaration colon and the
typing colon never collide.  Terms parse to raw trees (names unresolved);
the elaborator turns them into kernel terms against a theory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .syntax import MiniPureError


class ScriptSyntaxError(MiniPureError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# Tokens

SYMBOLS = ["==>", "==", "=>", "<=", "::", "->", "!!", "<", ">",
           "(", ")", ".", ":", "`", "%", "+", "*", "=", ",", "?"]

KEYWORDS = {"const", "axiom", "definition", "theorem", "apply", "rule",
            "assumption", "back", "qed", "where", "at", "check_canonicity",
            "size", "lam", "Prod", "Sum"}


@dataclass
class Tok:
    kind: str   # ident number string symbol keyword eof
    text: str
    line: int
    col: int


def lex(src: str, line0: int = 1, col0: int = 1) -> list[Tok]:
    toks: list[Tok] = []
    i, line, col = 0, line0, col0
    n = len(src)

    def err(msg):
        raise ScriptSyntaxError(msg, line, col)

    while i < n:
        c = src[i]
        if c == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if c in " \t\r":
            i, col = i + 1, col + 1
            continue
        if c == "#":
            while i < n and src[i] != "\n":
                i += 1
            continue
        if c == '"':
            j = i + 1
            sl, sc = line, col
            while j < n and src[j] != '"':
                if src[j] == "\n":
                    line += 1
                    col = 0
                j += 1
            if j >= n:
                raise ScriptSyntaxError("unbalanced quote", sl, sc)
            toks.append(Tok("string", src[i + 1:j], sl, sc + 1))
            col += j + 1 - i
            i = j + 1
            continue
        if c.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Tok("number", src[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c in "_'":
            j = i + 1 if c == "'" else i
            while j < n and (src[j].isalnum() or src[j] in "_'"):
                j += 1
            text = src[i:j]
            if text == "'":
                err("a type variable needs a name after the quote")
            kind = "keyword" if text in KEYWORDS else "ident"
            toks.append(Tok(kind, text, line, col))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if src.startswith(sym, i):
                toks.append(Tok("symbol", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            err(f"unexpected character {c!r}")
    toks.append(Tok("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Raw term trees

@dataclass
class RVar:
    name: str


@dataclass
class RSVar:
    name: str
    index: int


@dataclass
class RApp:
    fun: object
    arg: object


@dataclass
class RAbs:
    var: str
    body: object


def rapp(head, *args):
    for a in args:
        head = RApp(head, a)
    return head


def split_svar_token(text: str) -> tuple[str, int]:
    """Trailing digits of a schematic token are its index: ?x1 -> (x, 1)."""
    base = text.rstrip("0123456789")
    if not base:
        base, digits = text, ""
    else:
        digits = text[len(base):]
    return base, int(digits) if digits else 0


# term operator levels; must mirror printer.py
LVL_IMP, LVL_EQ, LVL_JUDGE, LVL_ARROW, LVL_PLUS, LVL_OAPP, LVL_APP = 3, 4, 5, 6, 7, 8, 9

BINOPS = {
    "==>": (LVL_IMP, "r", "==>"),
    "==": (LVL_EQ, "n", "=="),
    ":": (LVL_JUDGE, "n", "has_type"),
    "<": (LVL_JUDGE, "n", "<"),
    "<=": (LVL_JUDGE, "n", "<="),
    "->": (LVL_ARROW, "r", None),   # sugar for a constant-family Prod
    "+": (LVL_PLUS, "l", "+"),
    "`": (LVL_OAPP, "l", "`"),
}


class _TermParser:
    def __init__(self, toks: list[Tok]):
        self.toks = toks
        self.pos = 0

    def peek(self) -> Tok:
        return self.toks[self.pos]

    def next(self) -> Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def err(self, msg):
        t = self.peek()
        raise ScriptSyntaxError(msg, t.line, t.col)

    def expect(self, kind, text=None) -> Tok:
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            self.err(f"expected {text or kind}, found {t.text!r}")
        return self.next()

    def parse(self, lvl: int = 0):
        t = self.peek()
        if t.kind == "symbol" and t.text == "!!":
            self.next()
            names = []
            while self.peek().kind in ("ident", "number"):
                names.append(self.next().text)
            if not names:
                self.err("expected a variable after !!")
            self.expect("symbol", ".")
            body = self.parse(0)
            for name in reversed(names):
                body = RApp(RVar("!!"), RAbs(name, body))
            return body
        left = self.parse_operand(lvl)
        return self.parse_infixes(left, lvl)

    def parse_infixes(self, left, lvl: int):
        while True:
            t = self.peek()
            if t.kind != "symbol" or t.text not in BINOPS:
                return left
            prec, assoc, const = BINOPS[t.text]
            if prec < lvl:
                return left
            self.next()
            sub = prec + 1 if assoc in ("l", "n") else prec
            right = self.parse(sub)
            if t.text == "->":
                left = rapp(RVar("Prod"), left, RAbs("_", right))
            else:
                left = rapp(RVar(const), left, right)
            if assoc == "n" and self.peek().kind == "symbol" \
                    and self.peek().text in BINOPS \
                    and BINOPS[self.peek().text][0] == prec:
                self.err(f"operator {self.peek().text} is non-associative")

    def parse_operand(self, lvl: int):
        out = self.parse_primary()
        while True:
            t = self.peek()
            if LVL_APP < lvl:
                return out
            if t.kind in ("ident", "number") and t.text not in KEYWORDS:
                out = RApp(out, self.parse_primary())
            elif t.kind == "keyword" and t.text in ("lam", "Prod", "Sum"):
                out = RApp(out, self.parse_primary())
            elif t.kind == "symbol" and t.text in ("(", "?", "%"):
                out = RApp(out, self.parse_primary())
            else:
                return out

    def parse_primary(self):
        t = self.peek()
        if t.kind == "symbol" and t.text == "(":
            self.next()
            inner = self.parse(0)
            self.expect("symbol", ")")
            return inner
        if t.kind == "symbol" and t.text == "?":
            self.next()
            name = self.peek()
            if name.kind not in ("ident", "number"):
                self.err("expected a schematic variable name after ?")
            self.next()
            base, idx = split_svar_token(name.text)
            if not base:
                self.err("schematic variable needs a non-numeric name")
            return RSVar(base, idx)
        if t.kind == "symbol" and t.text == "%":
            self.next()
            names = []
            while self.peek().kind in ("ident", "number"):
                names.append(self.next().text)
            if not names:
                self.err("expected a variable after %")
            self.expect("symbol", ".")
            body = self.parse(LVL_ARROW)
            for name in reversed(names):
                body = RAbs(name, body)
            return body
        if t.kind == "keyword" and t.text == "lam":
            self.next()
            names = []
            while self.peek().kind in ("ident", "number"):
                names.append(self.next().text)
            if not names:
                self.err("expected a variable after lam")
            self.expect("symbol", ".")
            body = self.parse(LVL_ARROW)
            for name in reversed(names):
                body = RApp(RVar("lam"), RAbs(name, body))
            return body
        if t.kind == "keyword" and t.text in ("Prod", "Sum"):
            kw = self.next().text
            var = self.peek()
            if var.kind not in ("ident", "number"):
                self.err(f"expected a variable after {kw}")
            self.next()
            self.expect("symbol", ":")
            dom = self.parse(LVL_ARROW)
            self.expect("symbol", ".")
            body = self.parse(LVL_ARROW)
            return rapp(RVar(kw), dom, RAbs(var.text, body))
        if t.kind in ("ident", "number"):
            self.next()
            return RVar(t.text)
        self.err(f"unexpected token {t.text!r}")

    def finish(self):
        if self.peek().kind != "eof":
            self.err(f"trailing input {self.peek().text!r}")


def parse_term_text(text: str, line: int = 1, col: int = 1):
    p = _TermParser(lex(text, line, col))
    out = p.parse(0)
    p.finish()
    return out


# ---------------------------------------------------------------------------
# Meta-type expressions (for const declarations)

def parse_type_text(text: str, line: int = 1, col: int = 1):
    toks = lex(text, line, col)
    p = _TermParser(toks)

    def parse_ty():
        left = parse_atom()
        if p.peek().kind == "symbol" and p.peek().text == "=>":
            p.next()
            return ("fun", left, parse_ty())
        return left

    def parse_atom():
        t = p.peek()
        if t.kind == "symbol" and t.text == "(":
            p.next()
            inner = parse_ty()
            p.expect("symbol", ")")
            return inner
        if t.kind == "symbol" and t.text == "'":
            p.err("type variables are written 'a without a space")
        if t.kind == "ident":
            p.next()
            if t.text.startswith("'"):
                return ("tvar", t.text[1:])
            return ("base", t.text)
        p.err(f"unexpected token {t.text!r} in type")

    out = parse_ty()
    p.finish()
    return out


# ---------------------------------------------------------------------------
# Script AST

@dataclass
class ConstDecl:
    name: str
    ty: object
    line: int


@dataclass
class AxiomDecl:
    name: str
    formula: object
    line: int


@dataclass
class DefinitionDecl:
    name: str
    rhs: object
    line: int


@dataclass
class RuleTac:
    name: str
    insts: list[tuple[tuple[str, int], object]] = field(default_factory=list)
    subgoal: int | None = None
    line: int = 0


@dataclass
class AssumptionTac:
    subgoal: int | None = None
    line: int = 0


@dataclass
class BackTac:
    k: int = 1
    line: int = 0


@dataclass
class TheoremDecl:
    name: str
    formula: object
    tactics: list
    line: int


@dataclass
class CanonicityDecl:
    type_name: str
    size: int
    line: int


@dataclass
class ScriptAst:
    items: list


def parse(source: str) -> ScriptAst:
    """Parse a script file into an AST (embedded terms fully parsed)."""
    toks = lex(source)
    pos = 0

    def peek() -> Tok:
        return toks[pos]

    def advance() -> Tok:
        nonlocal pos
        t = toks[pos]
        pos += 1
        return t

    def err(msg):
        t = peek()
        raise ScriptSyntaxError(msg, t.line, t.col)

    def expect(kind, text=None) -> Tok:
        t = peek()
        if t.kind != kind or (text is not None and t.text != text):
            err(f"expected {text or kind}, found {t.text!r}")
        return advance()

    def expect_string_term() -> object:
        t = expect("string")
        return parse_term_text(t.text, t.line, t.col)

    items = []
    seen: dict[str, set[str]] = {"const": set(), "axiom": set(),
                                 "definition": set(), "theorem": set()}

    def declare(kind: str, name: str, line: int, col: int):
        if name in seen[kind]:
            raise ScriptSyntaxError(f"duplicate {kind} name {name}", line, col)
        seen[kind].add(name)

    def parse_tactic():
        t = peek()
        if t.kind == "keyword" and t.text == "rule":
            advance()
            name = expect("ident")
            insts = []
            sub = None
            if peek().kind == "keyword" and peek().text == "where":
                advance()
                while True:
                    expect("symbol", "?")
                    var = peek()
                    if var.kind not in ("ident", "number"):
                        err("expected a schematic variable name")
                    advance()
                    key = split_svar_token(var.text)
                    expect("symbol", "=")
                    insts.append((key, expect_string_term()))
                    if peek().kind == "symbol" and peek().text == ",":
                        advance()
                        continue
                    break
            if peek().kind == "keyword" and peek().text == "at":
                advance()
                sub = int(expect("number").text)
            return RuleTac(name.text, insts, sub, t.line)
        if t.kind == "keyword" and t.text == "assumption":
            advance()
            sub = None
            if peek().kind == "keyword" and peek().text == "at":
                advance()
                sub = int(expect("number").text)
            return AssumptionTac(sub, t.line)
        if t.kind == "keyword" and t.text == "back":
            advance()
            return BackTac(int(expect("number").text), t.line)
        err(f"unknown tactic {t.text!r}")

    while peek().kind != "eof":
        t = peek()
        if t.kind != "keyword":
            err(f"expected a declaration, found {t.text!r}")
        if t.text == "const":
            advance()
            name = expect("ident")
            expect("symbol", "::")
            ty = expect("string")
            declare("const", name.text, name.line, name.col)
            items.append(ConstDecl(name.text,
                                   parse_type_text(ty.text, ty.line, ty.col),
                                   t.line))
        elif t.text == "axiom":
            advance()
            name = expect("ident")
            expect("symbol", ":")
            declare("axiom", name.text, name.line, name.col)
            items.append(AxiomDecl(name.text, expect_string_term(), t.line))
        elif t.text == "definition":
            advance()
            name = expect("ident")
            expect("symbol", ":")
            declare("definition", name.text, name.line, name.col)
            items.append(DefinitionDecl(name.text, expect_string_term(), t.line))
        elif t.text == "theorem":
            advance()
            name = expect("ident")
            expect("symbol", ":")
            formula = expect_string_term()
            declare("theorem", name.text, name.line, name.col)
            tactics = []
            while True:
                nt = peek()
                if nt.kind == "keyword" and nt.text == "qed":
                    advance()
                    break
                if nt.kind == "keyword" and nt.text == "apply":
                    advance()
                    tactics.append(parse_tactic())
                    continue
                err("expected apply or qed inside a theorem")
            items.append(TheoremDecl(name.text, formula, tactics, t.line))
        elif t.text == "check_canonicity":
            advance()
            ty = expect("ident")
            expect("keyword", "size")
            num = expect("number")
            items.append(CanonicityDecl(ty.text, int(num.text), t.line))
        else:
            err(f"unexpected keyword {t.text!r}")

    return ScriptAst(items)
