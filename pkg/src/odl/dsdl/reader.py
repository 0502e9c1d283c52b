"""Reader for the restricted document syntax.

The on-disk format is a YAML subset: block maps, block sequences, flow
sequences/maps on a single line, plain scalars, and JSON-style double-quoted
strings. Anchors, aliases, tags, block scalars, and multi-line flow are not
part of the subset and are rejected. Duplicate keys are errors. Indentation
is spaces only.

The reader produces a generic `Node` tree with line/column positions; the
document parser turns that tree into the typed model.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from ..diagnostics import DUPLICATE_KEY, PARSE_ERROR

INT_RE = re.compile(r"^[+-]?[0-9]+$")
FLOAT_RE = re.compile(
    r"^[+-]?(?:[0-9]+\.[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?$|^[+-]?[0-9]+[eE][+-]?[0-9]+$"
)
PLAIN_KEY_RE = re.compile(r"^[^\s:#\"\[\]{},]+$")

_FLOW_TERMINATORS = ",]}"


class ReadError(Exception):
    def __init__(self, message: str, line: int, column: int, code: str = PARSE_ERROR):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column
        self.code = code


@dataclass
class Node:
    """A parsed value (dict[str, Node] | list[Node] | scalar) plus its source position."""

    value: object
    line: int
    column: int


def plain(node: Node) -> object:
    """Strip positions, returning plain Python values."""
    v = node.value
    if isinstance(v, dict):
        return {k: plain(child) for k, child in v.items()}
    if isinstance(v, list):
        return [plain(child) for child in v]
    return v


def typed_scalar(token: str):
    """Interpret an unquoted scalar token: bool, null, int, float, else string."""
    if token == "true":
        return True
    if token == "false":
        return False
    if token == "null":
        return None
    if INT_RE.match(token):
        return int(token)
    if FLOAT_RE.match(token):
        return float(token)
    return token


@dataclass
class _Line:
    indent: int
    text: str
    lineno: int
    column: int  # 1-based column of the first content character


def _strip_comment(raw: str, lineno: int) -> str:
    out = []
    in_quote = False
    escaped = False
    for i, ch in enumerate(raw):
        if in_quote:
            out.append(ch)
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_quote = False
            continue
        if ch == '"':
            in_quote = True
            out.append(ch)
            continue
        if ch == "#" and (i == 0 or raw[i - 1] in " \t"):
            break
        out.append(ch)
    return "".join(out).rstrip(" \t")


def _logical_lines(text: str) -> list[_Line]:
    lines = []
    for lineno, raw in enumerate(text.split("\n"), start=1):
        raw = raw.rstrip("\r")
        content = _strip_comment(raw, lineno)
        if not content.strip():
            continue
        stripped = content.lstrip(" ")
        indent = len(content) - len(stripped)
        if "\t" in content[: indent + 1]:
            raise ReadError("tab characters are not allowed in indentation", lineno, indent + 1)
        lines.append(_Line(indent, stripped, lineno, indent + 1))
    return lines


def _split_key(text: str) -> tuple[str, str, int] | None:
    """Split a `key: rest` line; returns (key, rest, rest_offset) or None."""
    if text.startswith('"'):
        end = _scan_quoted(text, 0)
        if end is None:
            return None
        key = json.loads(text[: end + 1])
        after = text[end + 1 :]
        if not after.startswith(":"):
            return None
        rest = after[1:]
        if rest and not rest.startswith(" "):
            return None
        return key, rest.lstrip(" "), end + 3 + (len(rest) - len(rest.lstrip(" ")))
    idx = 0
    while True:
        idx = text.find(":", idx)
        if idx < 0:
            return None
        if idx + 1 == len(text) or text[idx + 1] == " ":
            break
        idx += 1
    key = text[:idx]
    if not PLAIN_KEY_RE.match(key):
        return None
    rest = text[idx + 1 :]
    offset = idx + 2 + (len(rest) - len(rest.lstrip(" ")))
    return key, rest.lstrip(" "), offset


def _scan_quoted(text: str, start: int) -> int | None:
    """Index of the closing quote of a double-quoted string opening at `start`."""
    escaped = False
    for i in range(start + 1, len(text)):
        ch = text[i]
        if escaped:
            escaped = False
        elif ch == "\\":
            escaped = True
        elif ch == '"':
            return i
    return None


def _is_seq_item(text: str) -> bool:
    return text == "-" or text.startswith("- ")


class _FlowParser:
    """Parses a single-line flow value: scalar, [..], {..}, or "..."."""

    def __init__(self, s: str, lineno: int, base_col: int):
        self.s = s
        self.pos = 0
        self.lineno = lineno
        self.base_col = base_col

    def fail(self, message: str):
        raise ReadError(message, self.lineno, self.base_col + self.pos)

    def col(self) -> int:
        return self.base_col + self.pos

    def skip_spaces(self):
        while self.pos < len(self.s) and self.s[self.pos] == " ":
            self.pos += 1

    def parse_whole(self) -> Node:
        node = self.parse_value(top=True)
        self.skip_spaces()
        if self.pos != len(self.s):
            self.fail("unexpected trailing content")
        return node

    def parse_value(self, top: bool = False) -> Node:
        self.skip_spaces()
        if self.pos >= len(self.s):
            self.fail("expected a value")
        ch = self.s[self.pos]
        if ch == "[":
            return self.parse_seq()
        if ch == "{":
            return self.parse_map()
        if ch == '"':
            return self.parse_quoted()
        return self.parse_plain(top)

    def parse_quoted(self) -> Node:
        start = self.pos
        end = _scan_quoted(self.s, start)
        if end is None:
            self.fail("unterminated quoted string")
        token = self.s[start : end + 1]
        try:
            value = json.loads(token)
        except json.JSONDecodeError:
            self.fail("invalid escape in quoted string")
        node = Node(value, self.lineno, self.base_col + start)
        self.pos = end + 1
        return node

    def parse_plain(self, top: bool) -> Node:
        start = self.pos
        if top:
            end = len(self.s)
        else:
            end = start
            while end < len(self.s) and self.s[end] not in _FLOW_TERMINATORS:
                end += 1
        token = self.s[start:end].strip()
        if not token:
            self.fail("empty scalar")
        self.pos = end
        return Node(typed_scalar(token), self.lineno, self.base_col + start)

    def parse_seq(self) -> Node:
        start_col = self.col()
        self.pos += 1  # [
        items: list[Node] = []
        self.skip_spaces()
        if self.pos < len(self.s) and self.s[self.pos] == "]":
            self.pos += 1
            return Node(items, self.lineno, start_col)
        while True:
            items.append(self.parse_value())
            self.skip_spaces()
            if self.pos >= len(self.s):
                self.fail("unterminated flow sequence")
            ch = self.s[self.pos]
            if ch == ",":
                self.pos += 1
                continue
            if ch == "]":
                self.pos += 1
                return Node(items, self.lineno, start_col)
            self.fail("expected ',' or ']' in flow sequence")

    def parse_map(self) -> Node:
        start_col = self.col()
        self.pos += 1  # {
        entries: dict[str, Node] = {}
        self.skip_spaces()
        if self.pos < len(self.s) and self.s[self.pos] == "}":
            self.pos += 1
            return Node(entries, self.lineno, start_col)
        while True:
            self.skip_spaces()
            key = self.parse_flow_key()
            self.skip_spaces()
            if self.pos >= len(self.s) or self.s[self.pos] != ":":
                self.fail("expected ':' in flow mapping")
            self.pos += 1
            value = self.parse_value()
            if key in entries:
                raise ReadError(f"duplicate key {key!r}", self.lineno, self.col(), DUPLICATE_KEY)
            entries[key] = value
            self.skip_spaces()
            if self.pos >= len(self.s):
                self.fail("unterminated flow mapping")
            ch = self.s[self.pos]
            if ch == ",":
                self.pos += 1
                continue
            if ch == "}":
                self.pos += 1
                return Node(entries, self.lineno, start_col)
            self.fail("expected ',' or '}' in flow mapping")

    def parse_flow_key(self) -> str:
        if self.pos < len(self.s) and self.s[self.pos] == '"':
            return str(self.parse_quoted().value)
        start = self.pos
        end = start
        while end < len(self.s) and self.s[end] not in ":,}{[]":
            end += 1
        token = self.s[start:end].strip()
        if not PLAIN_KEY_RE.match(token or " "):
            self.fail("invalid flow mapping key")
        self.pos = end
        return token


class _BlockReader:
    def __init__(self, lines: list[_Line]):
        self.lines = lines
        self.i = 0

    def peek(self) -> _Line | None:
        return self.lines[self.i] if self.i < len(self.lines) else None

    def advance(self) -> _Line:
        line = self.lines[self.i]
        self.i += 1
        return line

    def parse_block(self) -> Node:
        line = self.peek()
        assert line is not None
        if _is_seq_item(line.text):
            return self.parse_sequence(line.indent)
        if _split_key(line.text) is not None:
            return self.parse_map(line.indent)
        self.advance()
        node = _FlowParser(line.text, line.lineno, line.column).parse_whole()
        nxt = self.peek()
        if nxt is not None and nxt.indent > line.indent:
            raise ReadError("unexpected indentation after scalar", nxt.lineno, nxt.column)
        return node

    def parse_map(self, indent: int) -> Node:
        first = self.peek()
        assert first is not None
        entries: dict[str, Node] = {}
        while True:
            line = self.peek()
            if line is None or line.indent < indent:
                break
            if line.indent > indent:
                raise ReadError("unexpected indentation", line.lineno, line.column)
            if _is_seq_item(line.text):
                raise ReadError("sequence item inside a mapping", line.lineno, line.column)
            split = _split_key(line.text)
            if split is None:
                raise ReadError("expected 'key: value'", line.lineno, line.column)
            key, rest, rest_offset = split
            if key in entries:
                raise ReadError(f"duplicate key {key!r}", line.lineno, line.column, DUPLICATE_KEY)
            self.advance()
            if rest:
                value = _FlowParser(rest, line.lineno, line.column + rest_offset - 1).parse_whole()
            else:
                nxt = self.peek()
                if nxt is not None and nxt.indent > indent:
                    value = self.parse_block()
                else:
                    value = Node(None, line.lineno, line.column)
            entries[key] = value
        return Node(entries, first.lineno, first.column)

    def parse_sequence(self, indent: int) -> Node:
        first = self.peek()
        assert first is not None
        items: list[Node] = []
        while True:
            line = self.peek()
            if line is None or line.indent < indent:
                break
            if line.indent > indent:
                raise ReadError("unexpected indentation", line.lineno, line.column)
            if not _is_seq_item(line.text):
                raise ReadError("expected '- ' sequence item", line.lineno, line.column)
            if line.text == "-":
                self.advance()
                nxt = self.peek()
                if nxt is not None and nxt.indent > indent:
                    items.append(self.parse_block())
                else:
                    items.append(Node(None, line.lineno, line.column))
            else:
                # Treat the dash as two columns of indentation and re-parse.
                self.lines[self.i] = _Line(
                    line.indent + 2, line.text[2:], line.lineno, line.column + 2
                )
                items.append(self.parse_block())
        return Node(items, first.lineno, first.column)


def read_tree(text: str) -> Node:
    """Read a full document into a node tree; raises ReadError on bad syntax."""
    lines = _logical_lines(text)
    if not lines:
        raise ReadError("document is empty", 1, 1)
    reader = _BlockReader(lines)
    node = reader.parse_block()
    leftover = reader.peek()
    if leftover is not None:
        raise ReadError("unexpected content after document", leftover.lineno, leftover.column)
    return node
