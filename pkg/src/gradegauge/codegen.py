"""Decision tree to nested-conditional source text, plus a reference
evaluator that runs the emitted text so tree and code can be compared
input-for-input.

Each internal node becomes an if/else-if chain over its branches, ordered
by training weight (heaviest first, ties keep branch order); the lightest
branch is emitted as the chain's final else, so a tree with N leaves emits
exactly N returns. Emission is deterministic byte-for-byte for a given
(model, dialect, function name).
"""

from __future__ import annotations

import re
from enum import Enum
from typing import Callable

from .dataset import CellValue
from .errors import CorruptDocument, InvalidIdentifier, MissingFeature
from .induction import (
    CategoricalSplit,
    Internal,
    Leaf,
    TrainedModel,
    TreeNode,
    classify,
)
from .preprocess import ProcessedStudentRecord

Record = dict[str, CellValue]

_IDENTIFIER = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class EmitDialect(Enum):
    PSEUDO_CODE = "pseudo"
    C_STYLE = "c"
    PYTHON_STYLE = "python"


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _unquote(escaped: str) -> str:
    return re.sub(r"\\(.)", r"\1", escaped)


def _branch_weight(node: TreeNode) -> float:
    return node.distribution.total()


def _ordered_branches(node: Internal) -> list[tuple[str, TreeNode]]:
    items = list(node.branches.items())
    order = sorted(range(len(items)),
                   key=lambda i: (-_branch_weight(items[i][1]), i))
    return [items[i] for i in order]


def tested_features(root: TreeNode) -> list[str]:
    """Attributes the tree actually tests, in first-emitted order."""
    seen: list[str] = []

    def walk(node: TreeNode) -> None:
        if isinstance(node, Leaf):
            return
        if node.test.attribute not in seen:
            seen.append(node.test.attribute)
        for _, sub in _ordered_branches(node):
            walk(sub)

    walk(root)
    return seen


def _condition(test, key: str, dialect: EmitDialect) -> str:
    name = test.attribute
    if isinstance(test, CategoricalSplit):
        if dialect is EmitDialect.C_STYLE:
            return f"strcmp({name}, {_quote(key)}) == 0"
        return f"{name} == {_quote(key)}"
    return f"{name} {key} {test.threshold!r}"


def emit(model: TrainedModel, dialect: EmitDialect, function_name: str,
         include_untested: bool = False) -> str:
    """Render the model as one self-contained function returning a class
    label. ``include_untested`` keeps never-tested features in the
    parameter list (appended in schema order)."""
    if not _IDENTIFIER.match(function_name):
        raise InvalidIdentifier(function_name)
    params = tested_features(model.root)
    if include_untested:
        params += [f for f in model.schema.feature_names if f not in params]

    lines: list[str] = []
    if dialect is EmitDialect.PSEUDO_CODE:
        lines.append(f"FUNCTION {function_name}({', '.join(params)})")
        _emit_node(model.root, dialect, 1, lines)
        lines.append("END FUNCTION")
    elif dialect is EmitDialect.PYTHON_STYLE:
        lines.append(f"def {function_name}({', '.join(params)}):")
        _emit_node(model.root, dialect, 1, lines)
    else:
        typed = ", ".join(
            (f"double {p}" if _is_continuous(model, p) else f"const char *{p}")
            for p in params)
        lines.append(f"const char *{function_name}({typed}) {{")
        _emit_node(model.root, dialect, 1, lines)
        lines.append("}")
    return "\n".join(lines) + "\n"


def _is_continuous(model: TrainedModel, name: str) -> bool:
    from .dataset import Continuous
    return isinstance(model.schema.attribute(name).kind, Continuous)


def _emit_node(node: TreeNode, dialect: EmitDialect, depth: int,
               lines: list[str]) -> None:
    indent = ("  " if dialect is EmitDialect.PSEUDO_CODE else "    ") * depth

    if isinstance(node, Leaf):
        if dialect is EmitDialect.PSEUDO_CODE:
            lines.append(f"{indent}RETURN {_quote(node.label)}")
        elif dialect is EmitDialect.PYTHON_STYLE:
            lines.append(f"{indent}return {_quote(node.label)}")
        else:
            lines.append(f"{indent}return {_quote(node.label)};")
        return

    ordered = _ordered_branches(node)
    if len(ordered) == 1:
        # degenerate single-branch node: unconditional descent
        _emit_node(ordered[0][1], dialect, depth, lines)
        return

    for i, (key, sub) in enumerate(ordered[:-1]):
        cond = _condition(node.test, key, dialect)
        if dialect is EmitDialect.PSEUDO_CODE:
            lead = "IF" if i == 0 else "ELSE IF"
            lines.append(f"{indent}{lead} {cond} THEN")
        elif dialect is EmitDialect.PYTHON_STYLE:
            lead = "if" if i == 0 else "elif"
            lines.append(f"{indent}{lead} {cond}:")
        else:
            lead = "if" if i == 0 else "} else if"
            lines.append(f"{indent}{lead} ({cond}) {{")
        _emit_node(sub, dialect, depth + 1, lines)

    if dialect is EmitDialect.PSEUDO_CODE:
        lines.append(f"{indent}ELSE")
        _emit_node(ordered[-1][1], dialect, depth + 1, lines)
        lines.append(f"{indent}END IF")
    elif dialect is EmitDialect.PYTHON_STYLE:
        lines.append(f"{indent}else:")
        _emit_node(ordered[-1][1], dialect, depth + 1, lines)
    else:
        lines.append(f"{indent}}} else {{")
        _emit_node(ordered[-1][1], dialect, depth + 1, lines)
        lines.append(f"{indent}}}")


def interpret(model: TrainedModel,
              record: ProcessedStudentRecord | Record) -> str:
    """Tree-walking twin of the emitted code, for differential testing."""
    return classify(model.root, record).label


# ---------------------------------------------------------------- evaluator

_Cond = tuple[str, str, object]  # op, attribute, operand
_Stmt = tuple  # ("return", label) | ("chain", [(cond, stmt), ...], else_stmt)


def compile_source(source: str, dialect: EmitDialect) -> Callable[[Record], str]:
    """Parse emitted source once and return a callable running it against
    a record. The grammar accepted is exactly the shape emit() produces."""
    if dialect is EmitDialect.PYTHON_STYLE:
        return _compile_python(source)
    lines = [ln.strip() for ln in source.splitlines() if ln.strip()]
    if dialect is EmitDialect.PSEUDO_CODE:
        stmt = _parse_pseudo(lines)
    else:
        stmt = _parse_c(lines)
    return lambda record: _run(stmt, record)


def evaluate_source(source: str, dialect: EmitDialect, record: Record) -> str:
    return compile_source(source, dialect)(record)


def _compile_python(source: str) -> Callable[[Record], str]:
    head = re.match(r"def (\w+)\((.*?)\):", source)
    if not head:
        raise CorruptDocument("no function definition found")
    name = head.group(1)
    params = [p.strip() for p in head.group(2).split(",") if p.strip()]
    namespace: dict = {}
    exec(compile(source, "<emitted>", "exec"), {"__builtins__": {}}, namespace)
    fn = namespace[name]

    def run(record: Record) -> str:
        for p in params:
            if p not in record:
                raise MissingFeature(p)
        return fn(**{p: record[p] for p in params})

    return run


_QUOTED = r'"((?:[^"\\]|\\.)*)"'
_PSEUDO_COND = re.compile(
    rf"(\w+) == {_QUOTED}\Z|(\w+) (<=|>) ([-+0-9.eE]+)\Z")
_C_COND = re.compile(
    rf"strcmp\((\w+), {_QUOTED}\) == 0\Z|(\w+) (<=|>) ([-+0-9.eE]+)\Z")


def _parse_cond(text: str, pattern: re.Pattern) -> _Cond:
    m = pattern.match(text)
    if not m:
        raise CorruptDocument(f"unparseable condition: {text!r}")
    if m.group(1) is not None:
        return ("eq", m.group(1), _unquote(m.group(2)))
    return (m.group(4), m.group(3), float(m.group(5)))


class _Cursor:
    def __init__(self, lines: list[str]):
        self.lines = lines
        self.pos = 0

    def peek(self) -> str:
        if self.pos >= len(self.lines):
            raise CorruptDocument("unexpected end of source")
        return self.lines[self.pos]

    def take(self) -> str:
        line = self.peek()
        self.pos += 1
        return line

    def expect(self, literal: str) -> None:
        line = self.take()
        if line != literal:
            raise CorruptDocument(f"expected {literal!r}, got {line!r}")


def _parse_pseudo(lines: list[str]) -> _Stmt:
    cur = _Cursor(lines)
    if not re.match(r"FUNCTION \w+\(.*\)\Z", cur.take()):
        raise CorruptDocument("missing FUNCTION header")
    stmt = _parse_pseudo_stmt(cur)
    cur.expect("END FUNCTION")
    return stmt


def _parse_pseudo_stmt(cur: _Cursor) -> _Stmt:
    line = cur.take()
    m = re.match(rf"RETURN {_QUOTED}\Z", line)
    if m:
        return ("return", _unquote(m.group(1)))
    m = re.match(r"IF (.+) THEN\Z", line)
    if not m:
        raise CorruptDocument(f"unexpected statement: {line!r}")
    arms = [(_parse_cond(m.group(1), _PSEUDO_COND), _parse_pseudo_stmt(cur))]
    while True:
        m = re.match(r"ELSE IF (.+) THEN\Z", cur.peek())
        if not m:
            break
        cur.take()
        arms.append((_parse_cond(m.group(1), _PSEUDO_COND),
                     _parse_pseudo_stmt(cur)))
    cur.expect("ELSE")
    orelse = _parse_pseudo_stmt(cur)
    cur.expect("END IF")
    return ("chain", arms, orelse)


def _parse_c(lines: list[str]) -> _Stmt:
    cur = _Cursor(lines)
    if not re.match(r"const char \*\w+\(.*\) \{\Z", cur.take()):
        raise CorruptDocument("missing function header")
    stmt = _parse_c_stmt(cur)
    cur.expect("}")
    return stmt


def _parse_c_stmt(cur: _Cursor) -> _Stmt:
    line = cur.take()
    m = re.match(rf"return {_QUOTED};\Z", line)
    if m:
        return ("return", _unquote(m.group(1)))
    m = re.match(r"if \((.+)\) \{\Z", line)
    if not m:
        raise CorruptDocument(f"unexpected statement: {line!r}")
    arms = [(_parse_cond(m.group(1), _C_COND), _parse_c_stmt(cur))]
    while True:
        m = re.match(r"\} else if \((.+)\) \{\Z", cur.peek())
        if not m:
            break
        cur.take()
        arms.append((_parse_cond(m.group(1), _C_COND), _parse_c_stmt(cur)))
    cur.expect("} else {")
    orelse = _parse_c_stmt(cur)
    cur.expect("}")
    return ("chain", arms, orelse)


def _run(stmt: _Stmt, record: Record) -> str:
    while stmt[0] == "chain":
        _, arms, orelse = stmt
        for cond, sub in arms:
            if _holds(cond, record):
                stmt = sub
                break
        else:
            stmt = orelse
    return stmt[1]


def _holds(cond: _Cond, record: Record) -> bool:
    op, name, operand = cond
    if name not in record:
        raise MissingFeature(name)
    value = record[name]
    if op == "eq":
        return value == operand
    if value is None:
        return False
    if op == "<=":
        return value <= operand
    return value > operand
