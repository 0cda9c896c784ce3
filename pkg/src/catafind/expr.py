"""Immutable symbolic expression trees over declared variables and parameters.

Expressions are hash-consed: structurally identical subtrees are the same
object, so equality and hashing are identity-based and subtree sharing is
maximal.  Sums and products are kept flattened and sorted in a canonical
order, with like terms and like factors merged, which keeps the nested
determinant constructions from swelling.

The grammar is restricted to polynomial/rational operations with integer
powers; there are no transcendental functions.
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass

CONST = "const"
VAR = "var"
PAR = "par"
SUM = "sum"
PROD = "prod"
NEG = "neg"
QUOT = "quot"
POW = "pow"


class ExprError(ValueError):
    pass


class ParseError(ExprError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, col {col}: {message}")
        self.line = line
        self.col = col


class EvaluationError(ExprError):
    """Raised when evaluation hits a singular subexpression (division by zero)."""

    def __init__(self, message: str, subexpr: "Expression"):
        super().__init__(message)
        self.subexpr = subexpr


class Expression:
    """A node of an immutable expression tree.

    Instances must be created through the module-level constructors
    (const, var, par, add, mul, neg, div, pow_), never directly; the
    constructors intern nodes and maintain canonical form.
    """

    __slots__ = ("kind", "value", "index", "children", "exponent", "order_id")

    kind: str
    value: float  # CONST only
    index: int  # VAR / PAR only
    children: tuple
    exponent: int  # POW only

    def __repr__(self):
        return f"<expr {to_str(self)}>"


_intern_lock = threading.Lock()
_intern_table: dict = {}


def _node(kind, value=None, index=None, children=(), exponent=None) -> Expression:
    key = (kind, value, index, children, exponent)
    with _intern_lock:
        node = _intern_table.get(key)
        if node is None:
            node = object.__new__(Expression)
            node.kind = kind
            node.value = value
            node.index = index
            node.children = children
            node.exponent = exponent
            node.order_id = len(_intern_table)
            _intern_table[key] = node
    return node


def const(v) -> Expression:
    return _node(CONST, value=float(v))


def var(i: int) -> Expression:
    if i < 0:
        raise ExprError(f"negative variable index {i}")
    return _node(VAR, index=i)


def par(i: int) -> Expression:
    if i < 0:
        raise ExprError(f"negative parameter index {i}")
    return _node(PAR, index=i)


ZERO = const(0.0)
ONE = const(1.0)


def _coeff_core(t: Expression):
    """Split a term into (numeric coefficient, non-constant core or None)."""
    if t.kind == CONST:
        return t.value, None
    if t.kind == NEG:
        c, core = _coeff_core(t.children[0])
        return -c, core
    if t.kind == PROD and t.children[0].kind == CONST:
        rest = t.children[1:]
        core = rest[0] if len(rest) == 1 else _node(PROD, children=rest)
        return t.children[0].value, core
    return 1.0, t


def _scale(c: float, core: Expression) -> Expression:
    if c == 1.0:
        return core
    if c == -1.0:
        return _node(NEG, children=(core,))
    if core.kind == PROD:
        return _node(PROD, children=(const(c),) + core.children)
    return _node(PROD, children=(const(c), core))


def add(*terms: Expression) -> Expression:
    const_acc = 0.0
    coeffs: dict = {}
    stack = list(terms)
    stack.reverse()
    while stack:
        t = stack.pop()
        if t.kind == SUM:
            stack.extend(reversed(t.children))
            continue
        c, core = _coeff_core(t)
        if core is None:
            const_acc += c
        else:
            coeffs[core] = coeffs.get(core, 0.0) + c
    out = []
    for core in sorted(coeffs, key=lambda e: e.order_id):
        c = coeffs[core]
        if c != 0.0:
            out.append(_scale(c, core))
    if const_acc != 0.0 or not out:
        out.append(const(const_acc))
    if len(out) == 1:
        return out[0]
    return _node(SUM, children=tuple(out))


def neg(e: Expression) -> Expression:
    if e.kind == CONST:
        return const(-e.value)
    if e.kind == NEG:
        return e.children[0]
    if e.kind == SUM:
        return add(*[neg(c) for c in e.children])
    if e.kind == PROD:
        return mul(const(-1.0), e)
    return _node(NEG, children=(e,))


def _pow_node(base: Expression, k: int) -> Expression:
    return base if k == 1 else _node(POW, children=(base,), exponent=k)


def mul(*factors: Expression) -> Expression:
    const_acc = 1.0
    powers: dict = {}
    stack = list(factors)
    stack.reverse()
    while stack:
        f = stack.pop()
        if f.kind == PROD:
            stack.extend(reversed(f.children))
        elif f.kind == CONST:
            const_acc *= f.value
        elif f.kind == NEG:
            const_acc = -const_acc
            stack.append(f.children[0])
        elif f.kind == POW:
            powers[f.children[0]] = powers.get(f.children[0], 0) + f.exponent
        else:
            powers[f] = powers.get(f, 0) + 1
    if const_acc == 0.0:
        return ZERO
    parts = []
    for base in sorted(powers, key=lambda e: e.order_id):
        k = powers[base]
        if k != 0:
            parts.append(_pow_node(base, k))
    if not parts:
        return const(const_acc)
    body = parts[0] if len(parts) == 1 else _node(PROD, children=tuple(parts))
    if const_acc == 1.0:
        return body
    if const_acc == -1.0:
        return _node(NEG, children=(body,))
    if body.kind == PROD:
        return _node(PROD, children=(const(const_acc),) + body.children)
    return _node(PROD, children=(const(const_acc), body))


def pow_(base: Expression, k: int) -> Expression:
    if int(k) != k:
        raise ExprError(f"non-integer exponent {k!r}")
    k = int(k)
    if k == 1:
        return base
    if k == 0:
        return ONE
    if base.kind == CONST:
        if base.value == 0.0 and k < 0:
            return _node(POW, children=(base,), exponent=k)
        return const(base.value ** k)
    if base.kind == POW:
        return pow_(base.children[0], base.exponent * k)
    if base.kind == NEG:
        inner = pow_(base.children[0], k)
        return inner if k % 2 == 0 else neg(inner)
    if base.kind == PROD:
        return mul(*[pow_(c, k) for c in base.children])
    return _node(POW, children=(base,), exponent=k)


def div(num: Expression, den: Expression) -> Expression:
    if den.kind == CONST:
        if den.value != 0.0:
            return mul(num, const(1.0 / den.value))
        return _node(QUOT, children=(num, den))
    if num.kind == CONST and num.value == 0.0:
        return ZERO
    if num is den:
        return ONE
    return _node(QUOT, children=(num, den))


def sub(a: Expression, b: Expression) -> Expression:
    return add(a, neg(b))


def simplify(e: Expression, _memo=None) -> Expression:
    """Rebuild a tree through the canonicalizing constructors.

    Trees built by this module are canonical already, so this is the
    identity for them; it normalizes externally assembled trees.
    """
    if _memo is None:
        _memo = {}
    got = _memo.get(e)
    if got is not None:
        return got
    k = e.kind
    if k in (CONST, VAR, PAR):
        out = e
    elif k == SUM:
        out = add(*[simplify(c, _memo) for c in e.children])
    elif k == PROD:
        out = mul(*[simplify(c, _memo) for c in e.children])
    elif k == NEG:
        out = neg(simplify(e.children[0], _memo))
    elif k == QUOT:
        out = div(simplify(e.children[0], _memo), simplify(e.children[1], _memo))
    elif k == POW:
        out = pow_(simplify(e.children[0], _memo), e.exponent)
    else:  # pragma: no cover
        raise ExprError(f"unknown node kind {k!r}")
    _memo[e] = out
    return out


def differentiate(e: Expression, wrt: Expression, _memo=None) -> Expression:
    """Exact symbolic derivative of e with respect to a var/par node."""
    if wrt.kind not in (VAR, PAR):
        raise ExprError("differentiation target must be a variable or parameter node")
    if _memo is None:
        _memo = {}
    key = (e, wrt)
    got = _memo.get(key)
    if got is not None:
        return got
    k = e.kind
    if k == CONST:
        out = ZERO
    elif k in (VAR, PAR):
        out = ONE if e is wrt else ZERO
    elif k == SUM:
        out = add(*[differentiate(c, wrt, _memo) for c in e.children])
    elif k == NEG:
        out = neg(differentiate(e.children[0], wrt, _memo))
    elif k == PROD:
        terms = []
        cs = e.children
        for i, c in enumerate(cs):
            dc = differentiate(c, wrt, _memo)
            if dc is not ZERO:
                terms.append(mul(*cs[:i], dc, *cs[i + 1:]))
        out = add(*terms) if terms else ZERO
    elif k == QUOT:
        u, v = e.children
        du = differentiate(u, wrt, _memo)
        dv = differentiate(v, wrt, _memo)
        out = div(sub(mul(du, v), mul(u, dv)), pow_(v, 2))
    elif k == POW:
        b = e.children[0]
        db = differentiate(b, wrt, _memo)
        out = mul(const(e.exponent), pow_(b, e.exponent - 1), db)
    else:  # pragma: no cover
        raise ExprError(f"unknown node kind {k!r}")
    _memo[key] = out
    return out


@dataclass(frozen=True)
class VectorField:
    """n component expressions over declared variable and parameter names."""

    name: str
    var_names: tuple
    param_names: tuple
    components: tuple

    def __post_init__(self):
        if len(self.components) != len(self.var_names):
            raise ExprError(
                f"field has {len(self.var_names)} variables but "
                f"{len(self.components)} components"
            )
        if len(self.var_names) < 1:
            raise ExprError("a vector field needs at least one variable")

    @property
    def n(self) -> int:
        return len(self.var_names)

    @property
    def r(self) -> int:
        return len(self.param_names)

    def point(self, x, alpha=()) -> "Point":
        return Point(tuple(float(v) for v in x), tuple(float(a) for a in alpha))


@dataclass(frozen=True)
class Point:
    x: tuple
    alpha: tuple

    def vals(self) -> tuple:
        return self.x + self.alpha


def evaluate(e: Expression, p: Point, _memo=None) -> float:
    """IEEE double value of e at p; raises EvaluationError on division by zero."""
    if _memo is None:
        _memo = {}
    got = _memo.get(e)
    if got is not None:
        return got
    k = e.kind
    if k == CONST:
        out = e.value
    elif k == VAR:
        if e.index >= len(p.x):
            raise EvaluationError(
                f"point has {len(p.x)} state values, need index {e.index}", e)
        out = p.x[e.index]
    elif k == PAR:
        if e.index >= len(p.alpha):
            raise EvaluationError(
                f"point has {len(p.alpha)} parameter values, need index {e.index}", e)
        out = p.alpha[e.index]
    elif k == SUM:
        out = 0.0
        for c in e.children:
            out += evaluate(c, p, _memo)
    elif k == PROD:
        out = 1.0
        for c in e.children:
            out *= evaluate(c, p, _memo)
    elif k == NEG:
        out = -evaluate(e.children[0], p, _memo)
    elif k == QUOT:
        den = evaluate(e.children[1], p, _memo)
        if den == 0.0:
            raise EvaluationError("division by zero", e)
        out = evaluate(e.children[0], p, _memo) / den
    elif k == POW:
        b = evaluate(e.children[0], p, _memo)
        if b == 0.0 and e.exponent < 0:
            raise EvaluationError("zero raised to a negative power", e)
        out = b ** e.exponent
    else:  # pragma: no cover
        raise ExprError(f"unknown node kind {k!r}")
    _memo[e] = out
    return out


def substitute_params(e: Expression, values, _memo=None) -> Expression:
    """Replace every parameter reference with a numeric constant."""
    if _memo is None:
        _memo = {}
    got = _memo.get(e)
    if got is not None:
        return got
    k = e.kind
    if k == PAR:
        out = const(values[e.index])
    elif k in (CONST, VAR):
        out = e
    elif k == SUM:
        out = add(*[substitute_params(c, values, _memo) for c in e.children])
    elif k == PROD:
        out = mul(*[substitute_params(c, values, _memo) for c in e.children])
    elif k == NEG:
        out = neg(substitute_params(e.children[0], values, _memo))
    elif k == QUOT:
        out = div(substitute_params(e.children[0], values, _memo),
                  substitute_params(e.children[1], values, _memo))
    else:  # POW
        out = pow_(substitute_params(e.children[0], values, _memo), e.exponent)
    _memo[e] = out
    return out


def fix_parameters(field: VectorField, alpha) -> VectorField:
    """A parameter-free copy of the field with alpha substituted numerically."""
    alpha = tuple(float(a) for a in alpha)
    if len(alpha) != field.r:
        raise ExprError(f"expected {field.r} parameter values, got {len(alpha)}")
    memo: dict = {}
    comps = tuple(substitute_params(c, alpha, memo) for c in field.components)
    return VectorField(field.name, field.var_names, (), comps)


# ---------------------------------------------------------------------------
# parsing

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUM_RE = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_INT_RE = re.compile(r"[+-]?\d+")


class _ExprParser:
    def __init__(self, text: str, line: int, col_offset: int, env: dict):
        self.text = text
        self.line = line
        self.col_offset = col_offset
        self.env = env
        self.pos = 0

    def error(self, msg, pos=None):
        p = self.pos if pos is None else pos
        raise ParseError(msg, self.line, self.col_offset + p + 1)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Expression:
        e = self.parse_sum()
        self.skip_ws()
        if self.pos != len(self.text):
            self.error(f"unexpected character {self.text[self.pos]!r}")
        return e

    def parse_sum(self) -> Expression:
        terms = [self.parse_term()]
        while True:
            c = self.peek()
            if c == "+":
                self.pos += 1
                terms.append(self.parse_term())
            elif c == "-":
                self.pos += 1
                terms.append(neg(self.parse_term()))
            else:
                return add(*terms)

    def parse_term(self) -> Expression:
        e = self.parse_unary()
        while True:
            c = self.peek()
            if c == "*":
                self.pos += 1
                e = mul(e, self.parse_unary())
            elif c == "/":
                self.pos += 1
                e = div(e, self.parse_unary())
            else:
                return e

    def parse_unary(self) -> Expression:
        if self.peek() == "-":
            self.pos += 1
            return neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expression:
        base = self.parse_atom()
        if self.peek() == "^":
            self.pos += 1
            self.skip_ws()
            m = _INT_RE.match(self.text, self.pos)
            if not m:
                self.error("expected an integer exponent after '^'")
            self.pos = m.end()
            return pow_(base, int(m.group()))
        return base

    def parse_atom(self) -> Expression:
        c = self.peek()
        if c == "(":
            self.pos += 1
            e = self.parse_sum()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return e
        m = _NUM_RE.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return const(float(m.group()))
        m = _IDENT_RE.match(self.text, self.pos)
        if m:
            name = m.group()
            node = self.env.get(name)
            if node is None:
                self.error(f"unknown identifier {name!r}", m.start())
            self.pos = m.end()
            return node
        if c == "":
            self.error("unexpected end of expression")
        self.error(f"unexpected character {c!r}")


def parse_expression(text: str, env: dict, line: int = 1, col_offset: int = 0) -> Expression:
    return _ExprParser(text, line, col_offset, env).parse()


def parse_vector_field(text: str, name: str = "field") -> VectorField:
    """Parse the line-oriented vector-field file format.

    `#` starts a comment; one `vars:` line and one `params:` line precede
    the `eq:` lines (one per component, in order).
    """
    var_names = None
    param_names = None
    eqs = []
    eq_lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        hash_pos = raw.find("#")
        line = raw if hash_pos < 0 else raw[:hash_pos]
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("vars:"):
            if var_names is not None:
                raise ParseError("duplicate 'vars:' line", lineno, 1)
            if eq_lines:
                raise ParseError("'vars:' must precede all 'eq:' lines", lineno, 1)
            var_names = stripped[len("vars:"):].split()
        elif stripped.startswith("params:"):
            if param_names is not None:
                raise ParseError("duplicate 'params:' line", lineno, 1)
            if eq_lines:
                raise ParseError("'params:' must precede all 'eq:' lines", lineno, 1)
            param_names = stripped[len("params:"):].split()
        elif stripped.startswith("eq:"):
            body_start = line.index("eq:") + len("eq:")
            eq_lines.append((lineno, body_start, line[body_start:]))
        else:
            raise ParseError(f"unrecognized line {stripped.split()[0]!r}", lineno, 1)
    if var_names is None:
        raise ParseError("missing 'vars:' line", 1, 1)
    if param_names is None:
        raise ParseError("missing 'params:' line", 1, 1)
    if not eq_lines:
        raise ParseError("no 'eq:' lines (component count is zero)", 1, 1)

    seen = set()
    for nm in list(var_names) + list(param_names):
        if not _IDENT_RE.fullmatch(nm):
            raise ParseError(f"invalid identifier {nm!r}", 1, 1)
        if nm in seen:
            raise ParseError(f"duplicate identifier {nm!r}", 1, 1)
        seen.add(nm)

    env = {nm: var(i) for i, nm in enumerate(var_names)}
    env.update({nm: par(i) for i, nm in enumerate(param_names)})
    for lineno, col_offset, body in eq_lines:
        eqs.append(parse_expression(body, env, lineno, col_offset))
    if len(eqs) != len(var_names):
        raise ParseError(
            f"{len(var_names)} variables but {len(eqs)} 'eq:' lines", 1, 1)
    return VectorField(name, tuple(var_names), tuple(param_names), tuple(eqs))


# ---------------------------------------------------------------------------
# printing

def _fmt_const(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def to_str(e: Expression, var_names=None, param_names=None) -> str:
    def name(node):
        if node.kind == VAR:
            return var_names[node.index] if var_names else f"x{node.index + 1}"
        return param_names[node.index] if param_names else f"a{node.index + 1}"

    def rec(node):
        k = node.kind
        if k == CONST:
            return _fmt_const(node.value)
        if k in (VAR, PAR):
            return name(node)
        if k == SUM:
            parts = [rec(node.children[0])]
            for c in node.children[1:]:
                s = rec(c)
                if s.startswith("-"):
                    parts.append(" - " + s[1:])
                else:
                    parts.append(" + " + s)
            return "".join(parts)
        if k == PROD:
            return "*".join(
                f"({rec(c)})" if c.kind == SUM else rec(c) for c in node.children)
        if k == NEG:
            c = node.children[0]
            s = rec(c)
            return f"-({s})" if c.kind == SUM else "-" + s
        if k == QUOT:
            num, den = node.children
            ns = f"({rec(num)})" if num.kind == SUM else rec(num)
            ds = f"({rec(den)})" if den.kind in (SUM, PROD, QUOT) else rec(den)
            return f"{ns}/{ds}"
        if k == POW:
            b = node.children[0]
            bs = rec(b)
            if b.kind not in (VAR, PAR) and not (b.kind == CONST and b.value >= 0):
                bs = f"({bs})"
            return f"{bs}^{node.exponent}"
        raise ExprError(f"unknown node kind {k!r}")  # pragma: no cover

    return rec(e)


def format_vector_field(field: VectorField) -> str:
    lines = [
        "vars: " + " ".join(field.var_names),
        "params: " + " ".join(field.param_names),
    ]
    for comp in field.components:
        lines.append("eq: " + to_str(comp, field.var_names, field.param_names))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# compiled evaluation

def compile_evaluator(exprs, n_vars: int):
    """Compile a list of expressions into one fast function of a flat value
    vector (variables first, then parameters).  Shared subtrees are computed
    once.  Division by zero raises ZeroDivisionError."""
    order = []
    seen = set()
    for root in exprs:
        stack = [(root, False)]
        while stack:
            node, done = stack.pop()
            if node in seen:
                continue
            if done:
                seen.add(node)
                order.append(node)
                continue
            stack.append((node, True))
            for c in node.children:
                if c not in seen:
                    stack.append((c, False))
    names: dict = {}
    lines = []
    for i, node in enumerate(order):
        k = node.kind
        if k == CONST:
            names[node] = repr(node.value)
            continue
        if k == VAR:
            names[node] = f"v[{node.index}]"
            continue
        if k == PAR:
            names[node] = f"v[{n_vars + node.index}]"
            continue
        nm = f"t{i}"
        if k == SUM:
            rhs = " + ".join(names[c] for c in node.children)
        elif k == PROD:
            rhs = "*".join(names[c] for c in node.children)
        elif k == NEG:
            rhs = f"-({names[node.children[0]]})"
        elif k == QUOT:
            rhs = f"({names[node.children[0]]})/({names[node.children[1]]})"
        elif k == POW:
            rhs = f"({names[node.children[0]]})**({node.exponent})"
        else:  # pragma: no cover
            raise ExprError(f"unknown node kind {k!r}")
        lines.append(f"    {nm} = {rhs}")
        names[node] = nm
    ret = ", ".join(names[r] for r in exprs)
    src = "def _compiled(v):\n" + "\n".join(lines) + f"\n    return ({ret},)\n"
    ns: dict = {}
    exec(src, ns)
    return ns["_compiled"]
