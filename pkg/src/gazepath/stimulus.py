"""Java lexing and monospace layout into pixel-space areas of interest.

Lexing is lossless and parse-free: it only needs token boundaries and
positions, never an AST. Block comments are split into one token per line
so every token occupies a single grid row. Layout expands tabs and turns
(line, column) spans into pixel bounding boxes on a monospace code pane.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

KIND_IDENTIFIER = "identifier"
KIND_KEYWORD = "keyword"
KIND_LITERAL = "literal"
KIND_OPERATOR = "operator"
KIND_PUNCTUATION = "punctuation"
KIND_COMMENT = "comment"

JAVA_KEYWORDS = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try var void volatile while""".split()
)

# Word-shaped literals.
_WORD_LITERALS = frozenset({"true", "false", "null"})

_PUNCTUATION = frozenset("()[]{};,.@")

# Multi-character operators, longest first for maximal-munch matching.
_OPERATORS = sorted(
    [
        ">>>=", "<<=", ">>=", ">>>", "...", "==", "!=", "<=", ">=", "&&", "||",
        "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
        "->", "::", "+", "-", "*", "/", "%", "=", "<", ">", "!", "&", "|", "^",
        "~", "?", ":",
    ],
    key=len,
    reverse=True,
)


class LexError(ValueError):
    """Raised on unterminated strings, chars, or block comments."""


class LexedToken(NamedTuple):
    """Token with raw (pre-tab-expansion) source coordinates."""

    lexeme: str
    kind: str
    line: int
    col_start: int
    col_end: int


@dataclass(frozen=True)
class CodePane:
    """Monospace grid geometry of the code display area."""

    origin_x_px: float = 64.0
    origin_y_px: float = 64.0
    cell_w_px: float = 10.0
    cell_h_px: float = 21.0
    tab_width: int = 4

    def __post_init__(self) -> None:
        if self.cell_w_px <= 0 or self.cell_h_px <= 0:
            raise ValueError("cell dimensions must be strictly positive")
        if self.tab_width < 1:
            raise ValueError("tab_width must be >= 1")


@dataclass(frozen=True)
class Token:
    """Laid-out token: tab-expanded grid span plus pixel bounding box."""

    lexeme: str
    kind: str
    line: int
    col_start: int
    col_end: int
    bbox: Tuple[float, float, float, float]  # (x0, y0, x1, y1), end-exclusive

    @property
    def center_px(self) -> Tuple[float, float]:
        x0, y0, x1, y1 = self.bbox
        return ((x0 + x1) / 2.0, (y0 + y1) / 2.0)


@dataclass(frozen=True)
class StimulusLayout:
    method_id: str
    source: str
    tokens: Tuple[Token, ...]
    pane: CodePane


def _word_kind(word: str) -> str:
    if word in JAVA_KEYWORDS:
        return KIND_KEYWORD
    if word in _WORD_LITERALS:
        return KIND_LITERAL
    return KIND_IDENTIFIER


def tokenize_java(source: str) -> List[LexedToken]:
    """Lex Java source into position-annotated tokens.

    Covers every non-whitespace character exactly once. Columns are raw
    character offsets; tab expansion is the layout stage's job.
    """
    tokens: List[LexedToken] = []
    lines = source.split("\n")
    line_idx = 0
    col = 0

    def cur_line() -> str:
        return lines[line_idx]

    while line_idx < len(lines):
        text = cur_line()
        if col >= len(text):
            line_idx += 1
            col = 0
            continue
        ch = text[col]
        if ch in " \t\r":
            col += 1
            continue
        two = text[col : col + 2]
        if two == "//":
            tokens.append(LexedToken(text[col:].rstrip(), KIND_COMMENT, line_idx, col, len(text.rstrip())))
            line_idx += 1
            col = 0
            continue
        if two == "/*":
            start_line = line_idx
            end = text.find("*/", col + 2)
            if end >= 0:
                tokens.append(LexedToken(text[col : end + 2], KIND_COMMENT, line_idx, col, end + 2))
                col = end + 2
                continue
            # Multi-line: one comment token per line.
            tokens.append(LexedToken(text[col:].rstrip(), KIND_COMMENT, line_idx, col, len(text.rstrip())))
            line_idx += 1
            while line_idx < len(lines):
                text = cur_line()
                end = text.find("*/")
                if end >= 0:
                    stripped_start = len(text[: end + 2]) - len(text[: end + 2].lstrip())
                    tokens.append(
                        LexedToken(text[stripped_start : end + 2], KIND_COMMENT, line_idx, stripped_start, end + 2)
                    )
                    col = end + 2
                    break
                stripped = text.strip()
                if stripped:
                    start = len(text) - len(text.lstrip())
                    tokens.append(LexedToken(stripped, KIND_COMMENT, line_idx, start, start + len(stripped)))
                line_idx += 1
            else:
                raise LexError(f"line {start_line + 1}: unterminated block comment")
            continue
        if ch in "\"'":
            quote = ch
            j = col + 1
            while j < len(text):
                if text[j] == "\\":
                    j += 2
                    continue
                if text[j] == quote:
                    break
                j += 1
            if j >= len(text):
                raise LexError(f"line {line_idx + 1}: unterminated {'string' if quote == chr(34) else 'char'} literal")
            tokens.append(LexedToken(text[col : j + 1], KIND_LITERAL, line_idx, col, j + 1))
            col = j + 1
            continue
        if ch.isdigit() or (ch == "." and col + 1 < len(text) and text[col + 1].isdigit()):
            j = col
            if text[j : j + 2].lower() in ("0x", "0b"):
                j += 2
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
            else:
                seen_exp = False
                while j < len(text):
                    c = text[j]
                    if c.isdigit() or c == "_" or c == ".":
                        j += 1
                    elif c in "eE" and not seen_exp:
                        seen_exp = True
                        j += 1
                        if j < len(text) and text[j] in "+-":
                            j += 1
                    elif c in "fFdDlL":
                        j += 1
                        break
                    else:
                        break
            tokens.append(LexedToken(text[col:j], KIND_LITERAL, line_idx, col, j))
            col = j
            continue
        if ch.isalpha() or ch in "_$":
            j = col
            while j < len(text) and (text[j].isalnum() or text[j] in "_$"):
                j += 1
            word = text[col:j]
            tokens.append(LexedToken(word, _word_kind(word), line_idx, col, j))
            col = j
            continue
        if ch in _PUNCTUATION:
            tokens.append(LexedToken(ch, KIND_PUNCTUATION, line_idx, col, col + 1))
            col += 1
            continue
        for op in _OPERATORS:
            if text.startswith(op, col):
                tokens.append(LexedToken(op, KIND_OPERATOR, line_idx, col, col + len(op)))
                col += len(op)
                break
        else:
            raise LexError(f"line {line_idx + 1}, col {col + 1}: unexpected character {ch!r}")
    return tokens


def _expansion_map(line: str, tab_width: int) -> List[int]:
    """Map raw column index -> expanded (display) column, length len(line)+1."""
    mapping = [0]
    display = 0
    for ch in line:
        if ch == "\t":
            display += tab_width - (display % tab_width)
        else:
            display += 1
        mapping.append(display)
    return mapping


def layout(
    tokens: List[LexedToken],
    pane: CodePane,
    *,
    source: str,
    method_id: str,
) -> StimulusLayout:
    """Place lexed tokens on the pane grid, producing pixel bounding boxes."""
    lines = source.split("\n")
    maps = [_expansion_map(line, pane.tab_width) for line in lines]
    placed: List[Token] = []
    for t in tokens:
        m = maps[t.line]
        col_start = m[t.col_start]
        col_end = m[t.col_end]
        bbox = (
            pane.origin_x_px + col_start * pane.cell_w_px,
            pane.origin_y_px + t.line * pane.cell_h_px,
            pane.origin_x_px + col_end * pane.cell_w_px,
            pane.origin_y_px + (t.line + 1) * pane.cell_h_px,
        )
        placed.append(
            Token(
                lexeme=t.lexeme,
                kind=t.kind,
                line=t.line,
                col_start=col_start,
                col_end=col_end,
                bbox=bbox,
            )
        )
    return StimulusLayout(method_id=method_id, source=source, tokens=tuple(placed), pane=pane)


def build_layout(method_id: str, source: str, pane: CodePane) -> StimulusLayout:
    """Lex and lay out one method in a single call."""
    return layout(tokenize_java(source), pane, source=source, method_id=method_id)
