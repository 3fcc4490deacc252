"""Lexer and recursive-descent parser for a small indentation-sensitive
Python subset, plus JSON interchange for ASTs produced by external parsers.

The subset covers: function definitions, return, assignments and augmented
assignments, if/elif/else, while, for-over-expression, expression statements,
calls, arithmetic/boolean/comparison/unary operators with standard
precedence, integer and string literals, list literals, and subscripts.

AST conventions
---------------
Nodes are ``AstNode(kind, value, children)``.  Value-bearing kinds store the
identifier / operator / literal lexeme in ``value``; all other kinds leave it
``None``.  Statement bodies are stored as flat child lists, except for ``If``
where the then- and else-branches each sit inside a ``List`` container child
(``If[test, List[then...], List[orelse...]]``) so the two branches stay
separable without extra node kinds.  ``elif`` chains are desugared into a
nested ``If`` inside the else container.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import FormatError, InvalidRoot, ParseError

# Token kinds
IDENT = "identifier"
INT = "integer"
STRING = "string"
OP = "operator"
KEYWORD = "keyword"
NEWLINE = "newline"
INDENT = "indent"
DEDENT = "dedent"
EOF = "eof"

KEYWORDS = {"def", "return", "if", "elif", "else", "while", "for", "in",
            "and", "or", "not"}

# Multi-character operators first so the lexer matches greedily.
OPERATORS = ["//=", "==", "!=", "<=", ">=", "+=", "-=", "*=", "%=", "//",
             "/=", "=", "+", "-", "*", "/", "%", "<", ">",
             "(", ")", "[", "]", ",", ":"]

AST_KINDS = {"Module", "FunctionDef", "Return", "Assign", "AugAssign", "If",
             "While", "For", "Expr", "Call", "BinOp", "BoolOp", "UnaryOp",
             "Compare", "Name", "Num", "Str", "List", "Subscript",
             "arguments", "arg"}

VALUE_BEARING = {"FunctionDef", "Name", "Num", "Str", "BinOp", "BoolOp",
                 "UnaryOp", "Compare", "AugAssign", "arg"}

LEAF_KINDS = {"Name", "Num", "Str", "arg"}

AUG_OPS = {"+=": "Add", "-=": "Sub", "*=": "Mult", "//=": "FloorDiv",
           "/=": "Div", "%=": "Mod"}
CMP_OPS = {"<": "Lt", ">": "Gt", "<=": "Le", ">=": "Ge",
           "==": "Eq", "!=": "NotEq"}
ADD_OPS = {"+": "Add", "-": "Sub"}
MUL_OPS = {"*": "Mult", "//": "FloorDiv", "/": "Div", "%": "Mod"}


@dataclass(frozen=True)
class LexToken:
    kind: str
    lexeme: str
    line: int
    column: int


@dataclass(eq=True)
class AstNode:
    kind: str
    value: str | None = None
    children: list["AstNode"] = field(default_factory=list)

    def __repr__(self):
        head = self.kind if self.value is None else f"{self.kind}({self.value})"
        if not self.children:
            return head
        return head + "[" + ", ".join(repr(c) for c in self.children) + "]"

    def node_count(self):
        return 1 + sum(c.node_count() for c in self.children)


def _check_node(node):
    if node.kind not in AST_KINDS:
        raise FormatError(f"unknown node kind {node.kind!r}")
    if (node.value is not None) != (node.kind in VALUE_BEARING):
        raise FormatError(
            f"kind {node.kind!r} {'must' if node.kind in VALUE_BEARING else 'must not'}"
            " carry a value")
    if node.kind in LEAF_KINDS and node.children:
        raise FormatError(f"leaf kind {node.kind!r} must have no children")


# ---------------------------------------------------------------------------
# Lexer


def tokenize(source: str) -> list[LexToken]:
    """Lex ``source`` into a token stream with synthesized indentation tokens.

    Raises ParseError on illegal characters, tabs in indentation,
    inconsistent dedents, or unterminated strings.
    """
    tokens = []
    indents = [0]
    lines = source.split("\n")
    for lineno, raw in enumerate(lines, start=1):
        # Measure indentation; reject tabs outright.
        col = 0
        while col < len(raw) and raw[col] == " ":
            col += 1
        if col < len(raw) and raw[col] == "\t":
            raise ParseError("tab character in indentation", lineno, col + 1)
        rest = raw[col:]
        if rest == "" or rest.startswith("#"):
            continue  # blank and comment-only lines produce no tokens
        indent = col
        if indent > indents[-1]:
            indents.append(indent)
            tokens.append(LexToken(INDENT, "", lineno, 1))
        else:
            while indent < indents[-1]:
                indents.pop()
                tokens.append(LexToken(DEDENT, "", lineno, 1))
            if indent != indents[-1]:
                raise ParseError("unindent does not match any outer level",
                                 lineno, col + 1)
        _lex_line(raw, col, lineno, tokens)
        tokens.append(LexToken(NEWLINE, "", lineno, len(raw) + 1))
    while indents[-1] > 0:
        indents.pop()
        tokens.append(LexToken(DEDENT, "", len(lines), 1))
    tokens.append(LexToken(EOF, "", len(lines), 1))
    return tokens


def _lex_line(raw, start, lineno, out):
    i = start
    n = len(raw)
    while i < n:
        ch = raw[i]
        if ch == " ":
            i += 1
            continue
        if ch == "\t":
            raise ParseError("tab character", lineno, i + 1)
        if ch == "#":
            return
        col = i + 1
        if ch.isdigit():
            j = i
            while j < n and raw[j].isdigit():
                j += 1
            out.append(LexToken(INT, raw[i:j], lineno, col))
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (raw[j].isalnum() or raw[j] == "_"):
                j += 1
            word = raw[i:j]
            kind = KEYWORD if word in KEYWORDS else IDENT
            out.append(LexToken(kind, word, lineno, col))
            i = j
            continue
        if ch in "'\"":
            text, i = _lex_string(raw, i, lineno)
            out.append(LexToken(STRING, text, lineno, col))
            continue
        for op in OPERATORS:
            if raw.startswith(op, i):
                out.append(LexToken(OP, op, lineno, col))
                i += len(op)
                break
        else:
            raise ParseError(f"illegal character {ch!r}", lineno, col)


_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", "'": "'", '"': '"'}


def _lex_string(raw, i, lineno):
    quote = raw[i]
    j = i + 1
    parts = []
    while j < len(raw):
        ch = raw[j]
        if ch == quote:
            return "".join(parts), j + 1
        if ch == "\\":
            if j + 1 >= len(raw) or raw[j + 1] not in _ESCAPES:
                raise ParseError("bad string escape", lineno, j + 2)
            parts.append(_ESCAPES[raw[j + 1]])
            j += 2
        else:
            parts.append(ch)
            j += 1
    raise ParseError("unterminated string literal", lineno, i + 1)


# ---------------------------------------------------------------------------
# Parser


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        raise ParseError(message, tok.line, tok.column)

    def at(self, kind, lexeme=None):
        tok = self.peek()
        return tok.kind == kind and (lexeme is None or tok.lexeme == lexeme)

    def expect(self, kind, lexeme=None):
        if not self.at(kind, lexeme):
            want = lexeme or kind
            self.error(f"expected {want!r}, found {self.peek().lexeme or self.peek().kind!r}")
        return self.advance()

    # --- statements

    def parse_module(self):
        stmts = []
        while not self.at(EOF):
            stmts.append(self.statement())
        return AstNode("Module", children=stmts)

    def statement(self):
        if self.at(KEYWORD, "def"):
            return self.funcdef()
        if self.at(KEYWORD, "if"):
            return self.if_stmt()
        if self.at(KEYWORD, "while"):
            return self.while_stmt()
        if self.at(KEYWORD, "for"):
            return self.for_stmt()
        return self.simple_stmt()

    def block(self):
        self.expect(NEWLINE)
        self.expect(INDENT)
        stmts = [self.statement()]
        while not self.at(DEDENT):
            stmts.append(self.statement())
        self.advance()
        return stmts

    def funcdef(self):
        self.advance()
        name = self.expect(IDENT).lexeme
        self.expect(OP, "(")
        params = []
        if not self.at(OP, ")"):
            params.append(AstNode("arg", self.expect(IDENT).lexeme))
            while self.at(OP, ","):
                self.advance()
                params.append(AstNode("arg", self.expect(IDENT).lexeme))
        self.expect(OP, ")")
        self.expect(OP, ":")
        body = self.block()
        args = AstNode("arguments", children=params)
        return AstNode("FunctionDef", name, [args] + body)

    def if_stmt(self):
        self.advance()
        test = self.expression()
        self.expect(OP, ":")
        then = self.block()
        orelse = []
        if self.at(KEYWORD, "elif"):
            orelse = [self.if_stmt_from_elif()]
        elif self.at(KEYWORD, "else"):
            self.advance()
            self.expect(OP, ":")
            orelse = self.block()
        return AstNode("If", children=[test,
                                       AstNode("List", children=then),
                                       AstNode("List", children=orelse)])

    def if_stmt_from_elif(self):
        # `elif` behaves exactly like a nested `if` in the else branch.
        tok = self.peek()
        assert tok.lexeme == "elif"
        return self.if_stmt()

    def while_stmt(self):
        self.advance()
        test = self.expression()
        self.expect(OP, ":")
        body = self.block()
        return AstNode("While", children=[test] + body)

    def for_stmt(self):
        self.advance()
        target = AstNode("Name", self.expect(IDENT).lexeme)
        self.expect(KEYWORD, "in")
        it = self.expression()
        self.expect(OP, ":")
        body = self.block()
        return AstNode("For", children=[target, it] + body)

    def simple_stmt(self):
        if self.at(KEYWORD, "return"):
            self.advance()
            if self.at(NEWLINE):
                node = AstNode("Return")
            else:
                node = AstNode("Return", children=[self.expression()])
            self.expect(NEWLINE)
            return node
        if self.at(KEYWORD):
            self.error(f"unsupported construct {self.peek().lexeme!r}")
        first_tok = self.peek()
        expr = self.expression()
        if self.at(OP, "="):
            self.advance()
            target = self._check_target(expr, first_tok)
            value = self.expression()
            self.expect(NEWLINE)
            return AstNode("Assign", children=[target, value])
        if self.at(OP) and self.peek().lexeme in AUG_OPS:
            op = AUG_OPS[self.advance().lexeme]
            target = self._check_target(expr, first_tok)
            value = self.expression()
            self.expect(NEWLINE)
            return AstNode("AugAssign", op, [target, value])
        self.expect(NEWLINE)
        return AstNode("Expr", children=[expr])

    def _check_target(self, expr, tok):
        if expr.kind not in ("Name", "Subscript"):
            self.error("invalid assignment target", tok)
        return expr

    # --- expressions, lowest to highest precedence

    def expression(self):
        return self.or_expr()

    def or_expr(self):
        node = self.and_expr()
        if self.at(KEYWORD, "or"):
            operands = [node]
            while self.at(KEYWORD, "or"):
                self.advance()
                operands.append(self.and_expr())
            node = AstNode("BoolOp", "Or", operands)
        return node

    def and_expr(self):
        node = self.not_expr()
        if self.at(KEYWORD, "and"):
            operands = [node]
            while self.at(KEYWORD, "and"):
                self.advance()
                operands.append(self.not_expr())
            node = AstNode("BoolOp", "And", operands)
        return node

    def not_expr(self):
        if self.at(KEYWORD, "not"):
            self.advance()
            return AstNode("UnaryOp", "Not", [self.not_expr()])
        return self.comparison()

    def comparison(self):
        node = self.arith()
        if self.at(OP) and self.peek().lexeme in CMP_OPS:
            op = CMP_OPS[self.advance().lexeme]
            right = self.arith()
            node = AstNode("Compare", op, [node, right])
            if self.at(OP) and self.peek().lexeme in CMP_OPS:
                self.error("chained comparisons are outside the subset")
        return node

    def arith(self):
        node = self.term()
        while self.at(OP) and self.peek().lexeme in ADD_OPS:
            op = ADD_OPS[self.advance().lexeme]
            node = AstNode("BinOp", op, [node, self.term()])
        return node

    def term(self):
        node = self.unary()
        while self.at(OP) and self.peek().lexeme in MUL_OPS:
            op = MUL_OPS[self.advance().lexeme]
            node = AstNode("BinOp", op, [node, self.unary()])
        return node

    def unary(self):
        if self.at(OP, "-"):
            self.advance()
            return AstNode("UnaryOp", "USub", [self.unary()])
        return self.postfix()

    def postfix(self):
        node = self.atom()
        while True:
            if self.at(OP, "("):
                self.advance()
                args = []
                if not self.at(OP, ")"):
                    args.append(self.expression())
                    while self.at(OP, ","):
                        self.advance()
                        args.append(self.expression())
                self.expect(OP, ")")
                node = AstNode("Call", children=[node] + args)
            elif self.at(OP, "["):
                self.advance()
                index = self.expression()
                self.expect(OP, "]")
                node = AstNode("Subscript", children=[node, index])
            else:
                return node

    def atom(self):
        tok = self.peek()
        if tok.kind == IDENT:
            self.advance()
            return AstNode("Name", tok.lexeme)
        if tok.kind == INT:
            self.advance()
            return AstNode("Num", tok.lexeme)
        if tok.kind == STRING:
            self.advance()
            return AstNode("Str", tok.lexeme)
        if self.at(OP, "("):
            self.advance()
            node = self.expression()
            self.expect(OP, ")")
            return node
        if self.at(OP, "["):
            self.advance()
            elts = []
            if not self.at(OP, "]"):
                elts.append(self.expression())
                while self.at(OP, ","):
                    self.advance()
                    elts.append(self.expression())
            self.expect(OP, "]")
            return AstNode("List", children=elts)
        self.error(f"unexpected {tok.lexeme or tok.kind!r}")


def parse_module(tokens: list[LexToken]) -> AstNode:
    """Parse a token stream (ending in eof) into a Module AST."""
    parser = _Parser(tokens)
    return parser.parse_module()


def parse_source(source: str) -> AstNode:
    """Convenience wrapper: tokenize then parse."""
    return parse_module(tokenize(source))


# ---------------------------------------------------------------------------
# JSON interchange


def ast_to_json(root: AstNode) -> str:
    def enc(node):
        obj = {"kind": node.kind}
        if node.value is not None:
            obj["value"] = node.value
        obj["children"] = [enc(c) for c in node.children]
        return obj

    return json.dumps(enc(root), indent=None, separators=(",", ":"))


def ast_from_json(text: str) -> AstNode:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc

    def dec(obj):
        if not isinstance(obj, dict):
            raise FormatError("AST node must be a JSON object")
        if "kind" not in obj or "children" not in obj:
            raise FormatError("AST node needs 'kind' and 'children' fields")
        extra = set(obj) - {"kind", "value", "children"}
        if extra:
            raise FormatError(f"unexpected fields {sorted(extra)}")
        kind = obj["kind"]
        value = obj.get("value")
        if value is not None and not isinstance(value, str):
            raise FormatError("'value' must be a string")
        if not isinstance(obj["children"], list):
            raise FormatError("'children' must be an array")
        node = AstNode(kind, value, [dec(c) for c in obj["children"]])
        _check_node(node)
        return node

    return dec(obj)


# ---------------------------------------------------------------------------
# Unparser (inverse of parse_source on the supported subset)

_BIN_SYMBOL = {"Add": "+", "Sub": "-", "Mult": "*", "Div": "/",
               "FloorDiv": "//", "Mod": "%"}
_CMP_SYMBOL = {v: k for k, v in CMP_OPS.items()}
_AUG_SYMBOL = {v: k for k, v in AUG_OPS.items()}

# Precedence levels for minimal parenthesization.
_LEVEL = {"BoolOp_Or": 1, "BoolOp_And": 2, "UnaryOp_Not": 3, "Compare": 4,
          "BinOp_add": 5, "BinOp_mul": 6, "UnaryOp_USub": 7, "postfix": 8}


def _expr_level(node):
    if node.kind == "BoolOp":
        return _LEVEL["BoolOp_Or"] if node.value == "Or" else _LEVEL["BoolOp_And"]
    if node.kind == "UnaryOp":
        return _LEVEL["UnaryOp_Not"] if node.value == "Not" else _LEVEL["UnaryOp_USub"]
    if node.kind == "Compare":
        return _LEVEL["Compare"]
    if node.kind == "BinOp":
        return _LEVEL["BinOp_add"] if node.value in ("Add", "Sub") else _LEVEL["BinOp_mul"]
    return 9  # atoms, calls, subscripts


def _unparse_expr(node, parent_level=0):
    level = _expr_level(node)
    if node.kind == "Name":
        text = node.value
    elif node.kind == "Num":
        text = node.value
    elif node.kind == "Str":
        body = node.value.replace("\\", "\\\\").replace('"', '\\"') \
            .replace("\n", "\\n").replace("\t", "\\t")
        text = f'"{body}"'
    elif node.kind == "List":
        text = "[" + ", ".join(_unparse_expr(c) for c in node.children) + "]"
    elif node.kind == "Call":
        func = _unparse_expr(node.children[0], 8)
        args = ", ".join(_unparse_expr(c) for c in node.children[1:])
        text = f"{func}({args})"
    elif node.kind == "Subscript":
        value = _unparse_expr(node.children[0], 8)
        text = f"{value}[{_unparse_expr(node.children[1])}]"
    elif node.kind == "BinOp":
        left = _unparse_expr(node.children[0], level)
        right = _unparse_expr(node.children[1], level + 1)
        text = f"{left} {_BIN_SYMBOL[node.value]} {right}"
    elif node.kind == "Compare":
        left = _unparse_expr(node.children[0], level + 1)
        right = _unparse_expr(node.children[1], level + 1)
        text = f"{left} {_CMP_SYMBOL[node.value]} {right}"
    elif node.kind == "BoolOp":
        joiner = " or " if node.value == "Or" else " and "
        text = joiner.join(_unparse_expr(c, level + 1) for c in node.children)
    elif node.kind == "UnaryOp":
        op = "not " if node.value == "Not" else "-"
        text = op + _unparse_expr(node.children[0], level)
    else:
        raise FormatError(f"cannot unparse {node.kind!r} as an expression")
    if level < parent_level:
        return f"({text})"
    return text


def _unparse_stmt(node, indent, out):
    pad = "    " * indent
    if node.kind == "Assign":
        out.append(f"{pad}{_unparse_expr(node.children[0])} = "
                   f"{_unparse_expr(node.children[1])}")
    elif node.kind == "AugAssign":
        out.append(f"{pad}{_unparse_expr(node.children[0])} "
                   f"{_AUG_SYMBOL[node.value]} {_unparse_expr(node.children[1])}")
    elif node.kind == "Expr":
        out.append(pad + _unparse_expr(node.children[0]))
    elif node.kind == "Return":
        if node.children:
            out.append(f"{pad}return {_unparse_expr(node.children[0])}")
        else:
            out.append(pad + "return")
    elif node.kind == "If":
        out.append(f"{pad}if {_unparse_expr(node.children[0])}:")
        for stmt in node.children[1].children:
            _unparse_stmt(stmt, indent + 1, out)
        orelse = node.children[2].children
        if orelse:
            out.append(pad + "else:")
            for stmt in orelse:
                _unparse_stmt(stmt, indent + 1, out)
    elif node.kind == "While":
        out.append(f"{pad}while {_unparse_expr(node.children[0])}:")
        for stmt in node.children[1:]:
            _unparse_stmt(stmt, indent + 1, out)
    elif node.kind == "For":
        out.append(f"{pad}for {node.children[0].value} in "
                   f"{_unparse_expr(node.children[1])}:")
        for stmt in node.children[2:]:
            _unparse_stmt(stmt, indent + 1, out)
    elif node.kind == "FunctionDef":
        params = ", ".join(a.value for a in node.children[0].children)
        out.append(f"{pad}def {node.value}({params}):")
        for stmt in node.children[1:]:
            _unparse_stmt(stmt, indent + 1, out)
    else:
        raise FormatError(f"cannot unparse {node.kind!r} as a statement")


def unparse(module: AstNode) -> str:
    """Source text for a Module AST; parse_source(unparse(t)) == t."""
    if module.kind != "Module":
        raise InvalidRoot(f"expected Module root, got {module.kind}")
    out = []
    for stmt in module.children:
        _unparse_stmt(stmt, 0, out)
    return "\n".join(out) + "\n"


def wrap_in_function(module: AstNode, name: str = "solution") -> AstNode:
    """Move all module statements into a parameterless function definition."""
    if module.kind != "Module":
        raise InvalidRoot(f"expected Module root, got {module.kind}")
    fn = AstNode("FunctionDef", name,
                 [AstNode("arguments")] + list(module.children))
    return AstNode("Module", children=[fn])
