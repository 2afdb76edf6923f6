"""Tolerant lexical scanning of Java source.

Provides the shared substrate for two consumers: full-token streams (used
for similarity vectors and edit distance) and callable-declaration
extraction (methods and constructors with bodies). No grammar, no type
resolution; the scanner only has to survive real-world, possibly
uncompilable snapshots and stay deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

# Words that can never be a method or constructor name. `synchronized`,
# `switch`, `catch` etc. look exactly like `name ( ... ) {` otherwise.
RESERVED = frozenset(
    """abstract assert boolean break byte case catch char class const continue
    default do double else enum extends final finally float for goto if
    implements import instanceof int interface long native new package private
    protected public return short static strictfp super switch synchronized
    this throw throws transient try void volatile while""".split()
)

_MODIFIERS = frozenset(
    "public private protected static final abstract synchronized native strictfp default".split()
)

# Longest-match first; the lexer emits these as single operator tokens.
_OPERATORS = (
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "==", "!=", "<=", ">=",
    "&&", "||", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "<<", ">>",
)

_WORD_START = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_$")
_WORD_CHARS = _WORD_START | frozenset("0123456789")
_DIGITS = frozenset("0123456789")
# Maximal munch for numeric literals: covers hex, floats, exponents,
# suffixes and underscore separators without a sub-grammar.
_NUMBER_CHARS = _DIGITS | frozenset("abcdefABCDEFxXlLfFdDeEpP._")


class Token(NamedTuple):
    kind: str  # word | number | string | char | op
    text: str
    line: int  # 1-based
    start: int  # char offset into the source
    end: int  # char offset one past the token


def lex(source: str) -> list[Token]:
    """Lex Java source into tokens, dropping comments and whitespace.

    Total: never raises. Unterminated strings/comments run to end of file.
    String and char literals are kept as single tokens, quotes included.
    """
    tokens: list[Token] = []
    i = 0
    line = 1
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            i += 1
            continue
        if c in " \t\r\f\v":
            i += 1
            continue
        if c == "/" and i + 1 < n:
            nxt = source[i + 1]
            if nxt == "/":
                j = source.find("\n", i)
                i = n if j < 0 else j
                continue
            if nxt == "*":
                j = source.find("*/", i + 2)
                if j < 0:
                    line += source.count("\n", i)
                    i = n
                else:
                    line += source.count("\n", i, j + 2)
                    i = j + 2
                continue
        if c == '"' or c == "'":
            j = i + 1
            while j < n:
                if source[j] == "\\":
                    j += 2
                    continue
                if source[j] == c or source[j] == "\n":
                    break
                j += 1
            j = min(j + 1, n) if j < n and source[j] == c else min(j, n)
            text = source[i:j]
            tokens.append(Token("string" if c == '"' else "char", text, line, i, j))
            line += text.count("\n")
            i = j
            continue
        if c in _WORD_START:
            j = i + 1
            while j < n and source[j] in _WORD_CHARS:
                j += 1
            tokens.append(Token("word", source[i:j], line, i, j))
            i = j
            continue
        if c in _DIGITS:
            j = i + 1
            while j < n and source[j] in _NUMBER_CHARS:
                # `1.method()` is not a thing in Java sources we care about,
                # but `foo(1,2)` must not swallow the comma.
                if source[j] == "." and (j + 1 >= n or source[j + 1] not in _NUMBER_CHARS):
                    break
                j += 1
            tokens.append(Token("number", source[i:j], line, i, j))
            i = j
            continue
        for op in _OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("op", op, line, i, i + len(op)))
                i += len(op)
                break
        else:
            tokens.append(Token("op", c, line, i, i + 1))
            i += 1
    return tokens


def token_texts(source: str) -> list[str]:
    """Token texts only, for consumers that do not need positions."""
    return [t.text for t in lex(source)]


@dataclass(frozen=True)
class CallableDecl:
    """A method or constructor declaration with a body."""

    name: str
    param_types: tuple[str, ...]
    source_text: str  # full declaration, leading annotations included
    line_count: int  # signature through last body line; annotation-only and brace-only lines excluded
    start_line: int  # line of the signature (first non-annotation token)

    @property
    def signature(self) -> str:
        return format_signature(self.name, self.param_types)


def format_signature(name: str, param_types: tuple[str, ...]) -> str:
    return f"{name}({','.join(param_types)})"


def _match_braces(tokens: list[Token]) -> dict[int, int]:
    """Map each `{` token index to its matching `}` index. Unmatched opens are absent."""
    pairs: dict[int, int] = {}
    stack: list[int] = []
    for idx, tok in enumerate(tokens):
        if tok.kind != "op":
            continue
        if tok.text == "{":
            stack.append(idx)
        elif tok.text == "}" and stack:
            pairs[stack.pop()] = idx
    return pairs


def _matching_paren(tokens: list[Token], open_idx: int) -> int:
    depth = 0
    for idx in range(open_idx, len(tokens)):
        t = tokens[idx]
        if t.kind == "op":
            if t.text == "(":
                depth += 1
            elif t.text == ")":
                depth -= 1
                if depth == 0:
                    return idx
    return -1


def _parse_param_types(tokens: list[Token]) -> list[str] | None:
    """Parameter type texts from the tokens strictly inside the parens.

    Returns None when the token run cannot plausibly be a declaration
    parameter list (weeds out enum constants like `RED(5) { ... }`).
    Generic arguments are erased to the outer identifier; array brackets
    and varargs markers are kept.
    """
    if not tokens:
        return []
    segments: list[list[Token]] = [[]]
    depth = 0
    for t in tokens:
        if t.kind == "op":
            if t.text in ("(", "<", "["):
                depth += 1
            elif t.text in (")", "]"):
                depth -= 1
            elif t.text in (">", ">>", ">>>"):
                # The lexer folds nested generic closers into shift tokens.
                depth -= len(t.text)
            elif t.text == "," and depth == 0:
                segments.append([])
                continue
        segments[-1].append(t)

    types: list[str] = []
    for seg in segments:
        # Drop annotations and `final`.
        cleaned: list[Token] = []
        k = 0
        while k < len(seg):
            t = seg[k]
            if t.kind == "op" and t.text == "@":
                k += 1
                if k < len(seg) and seg[k].kind == "word":
                    k += 1
                    while k + 1 < len(seg) and seg[k].text == "." and seg[k + 1].kind == "word":
                        k += 2
                if k < len(seg) and seg[k].text == "(":
                    d = 0
                    while k < len(seg):
                        if seg[k].text == "(":
                            d += 1
                        elif seg[k].text == ")":
                            d -= 1
                            if d == 0:
                                k += 1
                                break
                        k += 1
                continue
            if t.kind == "word" and t.text == "final":
                k += 1
                continue
            cleaned.append(t)
            k += 1
        if not cleaned:
            return None
        # C-style arrays put brackets after the name: `int xs[]`.
        trailing = 0
        while (
            len(cleaned) >= 2
            and cleaned[-1].text == "]"
            and cleaned[-2].text == "["
        ):
            cleaned = cleaned[:-2]
            trailing += 1
        if not cleaned or cleaned[-1].kind != "word" or cleaned[-1].text in RESERVED:
            return None
        type_tokens = cleaned[:-1]
        if not type_tokens:
            return None
        if type_tokens[0].kind != "word":
            return None
        types.append(_erase_generics(type_tokens) + "[]" * trailing)
    return types


def _erase_generics(tokens: list[Token]) -> str:
    parts: list[str] = []
    depth = 0
    for t in tokens:
        if t.kind == "op" and t.text == "<":
            depth += 1
            continue
        if t.kind == "op" and t.text in (">", ">>", ">>>"):
            depth = max(depth - len(t.text), 0)
            continue
        if depth == 0:
            parts.append(t.text)
    return "".join(parts)


def _is_annotation_only(line_text: str) -> bool:
    stripped = line_text.strip()
    return stripped.startswith("@")


def scan_callables(source: str) -> tuple[list[CallableDecl], list[str]]:
    """Find every method and constructor declaration that has a body.

    Works at any nesting depth (inner and anonymous classes included) and
    returns declarations in textual order. Bodyless declarations (abstract,
    interface members) are skipped. A declaration whose body brace never
    closes is dropped with a diagnostic; everything that closed is kept.
    """
    tokens = lex(source)
    brace_match = _match_braces(tokens)
    lines = source.splitlines()
    found: list[CallableDecl] = []
    diagnostics: list[str] = []

    # `anchor` is the token index where the current declaration could begin:
    # just past the most recent `;`, `{` or `}` that is not inside an
    # annotation argument list (those may legally contain braces).
    anchor = 0
    idx = 0
    n = len(tokens)
    while idx < n:
        tok = tokens[idx]
        if tok.kind == "op" and tok.text == "@":
            # Skip the annotation name and any argument list wholesale so
            # its braces/semicolons cannot move the anchor.
            idx += 1
            if idx < n and tokens[idx].kind == "word":
                idx += 1
                while idx + 1 < n and tokens[idx].text == "." and tokens[idx + 1].kind == "word":
                    idx += 2
            if idx < n and tokens[idx].text == "(":
                close = _matching_paren(tokens, idx)
                idx = idx + 1 if close < 0 else close + 1
            continue
        if tok.kind == "op" and tok.text in ";{}":
            anchor = idx + 1
            idx += 1
            continue
        if (
            tok.kind == "word"
            and tok.text not in RESERVED
            and idx + 1 < n
            and tokens[idx + 1].text == "("
        ):
            prev = tokens[idx - 1] if idx > 0 else None
            if prev is not None and prev.text in ("new", ".", "record", "@"):
                idx += 1
                continue
            close_paren = _matching_paren(tokens, idx + 1)
            if close_paren < 0:
                idx += 1
                continue
            after = close_paren + 1
            if after < n and tokens[after].kind == "word" and tokens[after].text == "throws":
                after += 1
                while after < n and (
                    tokens[after].kind == "word"
                    or tokens[after].text in (".", ",", "<", ">", ">>", ">>>")
                ):
                    after += 1
            if after >= n or tokens[after].text != "{":
                idx += 1
                continue
            param_types = _parse_param_types(tokens[idx + 2 : close_paren])
            if param_types is None:
                idx += 1
                continue
            body_close = brace_match.get(after)
            if body_close is None:
                diagnostics.append(
                    f"line {tok.line}: body of {tok.text}(...) never closes; declaration dropped"
                )
                idx += 1
                continue
            decl = _build_decl(source, lines, tokens, anchor, idx, param_types, body_close)
            found.append(decl)
            # Continue INSIDE the body so nested callables are found too.
            idx += 1
            continue
        idx += 1
    found.sort(key=lambda d: d.start_line)
    return found, diagnostics


def _build_decl(
    source: str,
    lines: list[str],
    tokens: list[Token],
    anchor: int,
    name_idx: int,
    param_types: list[str],
    body_close: int,
) -> CallableDecl:
    # Leading annotations belong to the declaration text but not to the
    # line count. Find where they end.
    sig_start = anchor
    while sig_start < name_idx and tokens[sig_start].text == "@":
        k = sig_start + 1
        if k < name_idx and tokens[k].kind == "word":
            k += 1
            while k + 1 < name_idx and tokens[k].text == "." and tokens[k + 1].kind == "word":
                k += 2
        if k < name_idx and tokens[k].text == "(":
            close = _matching_paren(tokens, k)
            k = k + 1 if close < 0 else close + 1
        sig_start = k

    decl_start_tok = tokens[anchor]
    sig_tok = tokens[sig_start]
    close_tok = tokens[body_close]
    source_text = source[decl_start_tok.start : close_tok.end]

    last_line = close_tok.line
    count = last_line - sig_tok.line + 1
    if last_line - 1 < len(lines) and lines[last_line - 1].strip() == "}":
        count -= 1
    return CallableDecl(
        name=tokens[name_idx].text,
        param_types=tuple(param_types),
        source_text=source_text,
        line_count=max(count, 1),
        start_line=sig_tok.line,
    )


def extract_callables(source: str) -> list[CallableDecl]:
    """Callable declarations in textual order; diagnostics discarded."""
    return scan_callables(source)[0]
