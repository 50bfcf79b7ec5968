"""Program sketches: AST, hole table, parser and printer.

A sketch is a tiny straight-line function with an optional guarded return
followed by a mandatory unconditional return.  Incomplete positions are
holes: ``[COND]`` (comparison token), ``[OP]`` (arithmetic token) and
``[Real]`` (numeric constant).  Filling every hole yields a concrete,
evaluable program.
"""

from __future__ import annotations

from dataclasses import dataclass, field

COND_TOKENS = ("==", ">", "<")
OP_TOKENS = ("+", "-", "*", "/")

KIND_COND = "cond"
KIND_OP = "op"
KIND_REAL = "real"

_RESERVED = frozenset({"fn", "if", "return", "f32", "inf", "nan"})


class SketchError(ValueError):
    """Invalid sketch, program or assignment."""


class SketchSyntaxError(SketchError):
    """Source text does not conform to the sketch grammar."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class HoleSpec:
    """One entry of the hole table: position ``index``, kind and domain."""

    index: int
    kind: str  # KIND_COND | KIND_OP | KIND_REAL

    @property
    def domain(self) -> tuple[str, ...] | None:
        """Token set for categorical holes, None for real holes."""
        if self.kind == KIND_COND:
            return COND_TOKENS
        if self.kind == KIND_OP:
            return OP_TOKENS
        return None

    @property
    def arity(self) -> int | None:
        """Category count for categorical holes, None for real holes."""
        dom = self.domain
        return None if dom is None else len(dom)


# ---------------------------------------------------------------------------
# AST nodes.  Operands are Var | Lit | RealHole; comparison slots hold a
# token string or a CondHole; operator slots hold a token string or an OpHole.


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Lit:
    value: float


@dataclass(frozen=True)
class RealHole:
    index: int


@dataclass(frozen=True)
class OpHole:
    index: int


@dataclass(frozen=True)
class CondHole:
    index: int


@dataclass(frozen=True)
class Chain:
    """Flat operand/operator chain, evaluated strictly left to right.

    ``a op1 b op2 c`` means ``(a op1 b) op2 c``; operators carry no
    precedence because a hole operator has none until it is filled.
    """

    operands: tuple
    ops: tuple

    def __post_init__(self):
        if len(self.operands) != len(self.ops) + 1:
            raise SketchError("chain needs exactly one more operand than operators")


@dataclass(frozen=True)
class Guard:
    """`if lhs cmp rhs { return body; }`"""

    lhs: object
    cmp: object  # str token or CondHole
    rhs: object
    body: Chain


@dataclass(frozen=True)
class Sketch:
    name: str
    params: tuple[str, ...]
    guard: Guard | None
    ret: Chain
    holes: tuple[HoleSpec, ...] = field(default=())

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def hole_count(self) -> int:
        return len(self.holes)

    @property
    def is_concrete(self) -> bool:
        return not self.holes

    @property
    def hole_kinds(self) -> tuple[str, ...]:
        return tuple(h.kind for h in self.holes)


@dataclass(frozen=True)
class Assignment:
    """One concrete value per hole: a category index or a real number."""

    values: tuple


# ---------------------------------------------------------------------------
# Tokenizer


@dataclass(frozen=True)
class _Token:
    type: str  # "ident" | "float" | "punct" | "hole" | "eof"
    text: str
    line: int
    col: int


_PUNCT_TWO = ("->", "==")
_PUNCT_ONE = "(){},:;><+-*/"
_HOLE_TOKENS = ("[COND]", "[OP]", "[Real]")


def _tokenize(text: str) -> list[_Token]:
    toks: list[_Token] = []
    i, line, col = 0, 1, 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if text.startswith("//", i):
            while i < n and text[i] != "\n":
                i += 1
            continue
        start_line, start_col = line, col
        if text.startswith(_PUNCT_TWO[0], i) or text.startswith(_PUNCT_TWO[1], i):
            tok = text[i : i + 2]
            toks.append(_Token("punct", tok, start_line, start_col))
            i += 2
            col += 2
            continue
        if c == "[":
            end = text.find("]", i)
            if end < 0:
                raise SketchSyntaxError("unterminated '[' token", start_line, start_col)
            tok = text[i : end + 1]
            if tok not in _HOLE_TOKENS:
                raise SketchSyntaxError(
                    f"unknown hole token {tok!r} (expected one of {', '.join(_HOLE_TOKENS)})",
                    start_line,
                    start_col,
                )
            toks.append(_Token("hole", tok, start_line, start_col))
            col += end + 1 - i
            i = end + 1
            continue
        if c in _PUNCT_ONE:
            toks.append(_Token("punct", c, start_line, start_col))
            i += 1
            col += 1
            continue
        if c.isdigit() or (c == "." and i + 1 < n and text[i + 1].isdigit()):
            j = i
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == ".":
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
            if j < n and text[j] in "eE":
                k = j + 1
                if k < n and text[k] in "+-":
                    k += 1
                if k < n and text[k].isdigit():
                    j = k
                    while j < n and text[j].isdigit():
                        j += 1
            tok = text[i:j]
            toks.append(_Token("float", tok, start_line, start_col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(_Token("ident", text[i:j], start_line, start_col))
            col += j - i
            i = j
            continue
        raise SketchSyntaxError(f"unexpected character {c!r}", start_line, start_col)
    toks.append(_Token("eof", "", line, col))
    return toks


# ---------------------------------------------------------------------------
# Parser (recursive descent; the grammar is LL(1))


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0
        self.params: tuple[str, ...] = ()
        self.holes: list[HoleSpec] = []

    def peek(self) -> _Token:
        return self.toks[self.pos]

    def next(self) -> _Token:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.peek()
        raise SketchSyntaxError(message, tok.line, tok.col)

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.text != text or tok.type == "eof":
            self.error(f"expected {text!r}, found {tok.text!r}" if tok.text else f"expected {text!r}, found end of input")
        return self.next()

    def expect_ident(self, what: str) -> _Token:
        tok = self.peek()
        if tok.type != "ident":
            self.error(f"expected {what}, found {tok.text!r}")
        return self.next()

    def new_hole(self, kind: str) -> int:
        index = len(self.holes)
        self.holes.append(HoleSpec(index, kind))
        return index

    def parse(self) -> Sketch:
        self.expect("fn")
        name_tok = self.expect_ident("function name")
        if name_tok.text in _RESERVED:
            self.error(f"{name_tok.text!r} is a reserved word", name_tok)
        self.expect("(")
        params: list[str] = []
        if self.peek().text == ")":
            self.error("function must take at least one input")
        while True:
            p = self.expect_ident("parameter name")
            if p.text in _RESERVED:
                self.error(f"{p.text!r} is a reserved word", p)
            if p.text in params:
                self.error(f"duplicate parameter {p.text!r}", p)
            params.append(p.text)
            self.expect(":")
            self.expect("f32")
            if self.peek().text == ",":
                self.next()
                continue
            break
        self.expect(")")
        self.params = tuple(params)
        self.expect("->")
        self.expect("f32")
        self.expect("{")
        guard = None
        if self.peek().text == "if":
            guard = self.parse_guard()
        ret = self.parse_return()
        self.expect("}")
        if self.peek().type != "eof":
            self.error(f"unexpected trailing input {self.peek().text!r}")
        return Sketch(name_tok.text, self.params, guard, ret, tuple(self.holes))

    def parse_guard(self) -> Guard:
        self.expect("if")
        lhs = self.parse_operand()
        cmp = self.parse_cmp()
        rhs = self.parse_operand()
        self.expect("{")
        body = self.parse_return()
        self.expect("}")
        return Guard(lhs, cmp, rhs, body)

    def parse_return(self) -> Chain:
        self.expect("return")
        chain = self.parse_chain()
        self.expect(";")
        return chain

    def parse_chain(self) -> Chain:
        operands = [self.parse_operand()]
        ops: list = []
        while True:
            tok = self.peek()
            if tok.text in (";", "}") or tok.type == "eof":
                break
            ops.append(self.parse_op())
            operands.append(self.parse_operand())
        return Chain(tuple(operands), tuple(ops))

    def parse_operand(self):
        tok = self.peek()
        if tok.type == "hole":
            if tok.text != "[Real]":
                self.error(f"{tok.text} cannot appear where an operand is required")
            self.next()
            return RealHole(self.new_hole(KIND_REAL))
        if tok.type == "float":
            self.next()
            return Lit(float(tok.text))
        if tok.text == "-":
            # Unary minus: only directly before a numeric literal.
            self.next()
            val = self.peek()
            if val.type == "float":
                self.next()
                return Lit(-float(val.text))
            if val.type == "ident" and val.text in ("inf", "nan"):
                self.next()
                return Lit(-float(val.text))
            self.error("expected a numeric literal after unary '-'", val)
        if tok.type == "ident":
            if tok.text in ("inf", "nan"):
                self.next()
                return Lit(float(tok.text))
            if tok.text in _RESERVED:
                self.error(f"expected operand, found {tok.text!r}")
            if tok.text not in self.params:
                self.error(f"unknown variable {tok.text!r} (inputs: {', '.join(self.params)})", tok)
            self.next()
            return Var(tok.text)
        self.error(f"expected operand, found {tok.text!r}" if tok.text else "expected operand, found end of input")

    def parse_cmp(self):
        tok = self.peek()
        if tok.type == "hole":
            if tok.text != "[COND]":
                self.error(f"{tok.text} cannot appear where a comparison is required")
            self.next()
            return CondHole(self.new_hole(KIND_COND))
        if tok.text in COND_TOKENS:
            self.next()
            return tok.text
        self.error(f"expected comparison ('==', '>', '<' or [COND]), found {tok.text!r}")

    def parse_op(self):
        tok = self.peek()
        if tok.type == "hole":
            if tok.text != "[OP]":
                self.error(f"{tok.text} cannot appear where an operator is required")
            self.next()
            return OpHole(self.new_hole(KIND_OP))
        if tok.text in OP_TOKENS:
            self.next()
            return tok.text
        self.error(f"expected operator ('+', '-', '*', '/' or [OP]), found {tok.text!r}")


def parse_sketch(text: str) -> Sketch:
    """Parse sketch source text.

    Holes are numbered 0..H-1 in left-to-right, top-to-bottom source order.
    Raises SketchSyntaxError (with line/column) on malformed input, holes in
    illegal positions, unknown variables or a parameterless function.
    """
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# Printing


def format_real(value: float) -> str:
    """Shortest decimal that round-trips to the same double."""
    return repr(float(value))


def _operand_str(node) -> str:
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Lit):
        return format_real(node.value)
    if isinstance(node, RealHole):
        return "[Real]"
    raise SketchError(f"not an operand: {node!r}")


def _cmp_str(cmp) -> str:
    return "[COND]" if isinstance(cmp, CondHole) else cmp


def _op_str(op) -> str:
    return "[OP]" if isinstance(op, OpHole) else op


def _chain_str(chain: Chain) -> str:
    parts = [_operand_str(chain.operands[0])]
    for op, operand in zip(chain.ops, chain.operands[1:]):
        parts.append(_op_str(op))
        parts.append(_operand_str(operand))
    return " ".join(parts)


def print_program(sketch: Sketch) -> str:
    """Render a sketch or concrete program in canonical form.

    Canonical means: parse(print(s)) is structurally identical to s, and
    printing an already-canonical text is a fixed point.
    """
    params = ", ".join(f"{p}: f32" for p in sketch.params)
    lines = [f"fn {sketch.name}({params}) -> f32", "{"]
    if sketch.guard is not None:
        g = sketch.guard
        lines.append(f"    if {_operand_str(g.lhs)} {_cmp_str(g.cmp)} {_operand_str(g.rhs)}")
        lines.append("    {")
        lines.append(f"        return {_chain_str(g.body)};")
        lines.append("    }")
        lines.append("")
    lines.append(f"    return {_chain_str(sketch.ret)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Instantiation


def _check_value(hole: HoleSpec, value) -> object:
    if hole.kind == KIND_REAL:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SketchError(f"hole {hole.index} is [Real] but got {value!r}")
        return float(value)
    if isinstance(value, bool) or not isinstance(value, int):
        raise SketchError(f"hole {hole.index} is categorical but got {value!r}")
    domain = hole.domain
    if not 0 <= value < len(domain):
        raise SketchError(f"hole {hole.index}: category index {value} out of range 0..{len(domain) - 1}")
    return domain[value]


def instantiate(sketch: Sketch, assignment: Assignment) -> Sketch:
    """Substitute every hole, producing a concrete program.

    Categorical holes take the token at their category index; real holes take
    the given number as a literal.  Raises SketchError on length mismatch,
    kind mismatch or an out-of-range category index.
    """
    if len(assignment.values) != sketch.hole_count:
        raise SketchError(
            f"assignment has {len(assignment.values)} values but sketch has {sketch.hole_count} holes"
        )
    fill = {h.index: _check_value(h, v) for h, v in zip(sketch.holes, assignment.values)}

    def sub_operand(node):
        if isinstance(node, RealHole):
            return Lit(fill[node.index])
        return node

    def sub_chain(chain: Chain) -> Chain:
        operands = tuple(sub_operand(o) for o in chain.operands)
        ops = tuple(fill[o.index] if isinstance(o, OpHole) else o for o in chain.ops)
        return Chain(operands, ops)

    guard = None
    if sketch.guard is not None:
        g = sketch.guard
        cmp = fill[g.cmp.index] if isinstance(g.cmp, CondHole) else g.cmp
        guard = Guard(sub_operand(g.lhs), cmp, sub_operand(g.rhs), sub_chain(g.body))
    return Sketch(sketch.name, sketch.params, guard, sub_chain(sketch.ret), ())
