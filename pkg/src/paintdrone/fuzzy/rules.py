"""Rule-table files: one Mamdani rule per line.

Grammar (``#`` starts a comment, blank lines ignored)::

    <theta-label> <phi-label> -> <dW1R> <dW1L> <dW2R> <dW2L> <dW3R> <dW3L> <dW4R> <dW4L>

Labels are NL, NM, NS, Z, PS, PM, PL.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

from .membership import Label

ROTORS = ("1R", "1L", "2R", "2L", "3R", "3L", "4R", "4L")
# Diametrically opposed rotor pairs, as indices into ROTORS.
OPPOSITE_PAIRS = ((0, 4), (1, 5), (2, 6), (3, 7))


class RuleTableError(ValueError):
    """Base class; ``line`` is the 1-based source line when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class RuleSyntaxError(RuleTableError):
    def __init__(self, message: str, line: int, column: int):
        self.column = column
        super().__init__(f"column {column}: {message}", line)


class DuplicateRuleError(RuleTableError):
    pass


class MissingRuleError(RuleTableError):
    def __init__(self, missing: Sequence[tuple[Label, Label]]):
        self.missing = list(missing)
        names = ", ".join(f"({t.name}, {p.name})" for t, p in self.missing)
        super().__init__(f"{len(self.missing)} of 49 input pairs have no rule: {names}")


class AntisymmetryError(RuleTableError):
    def __init__(self, row: "RuleRow", pair: tuple[int, int], line: int | None):
        self.row = row
        self.pair = pair
        i, j = pair
        super().__init__(
            f"rule {row.in_theta.name} {row.in_phi.name}: dW{ROTORS[i]}={row.out[i].name} "
            f"but opposite dW{ROTORS[j]}={row.out[j].name} (expected {row.out[i].negate().name})",
            line,
        )


@dataclass(frozen=True)
class RuleRow:
    in_theta: Label
    in_phi: Label
    out: tuple[Label, ...]
    line: int | None = None

    def antisymmetry_violation(self) -> tuple[int, int] | None:
        for i, j in OPPOSITE_PAIRS:
            if self.out[j] is not self.out[i].negate():
                return i, j
        return None

    def format(self) -> str:
        outs = " ".join(l.name for l in self.out)
        return f"{self.in_theta.name} {self.in_phi.name} -> {outs}"


@dataclass(frozen=True)
class RuleTable:
    rows: tuple[RuleRow, ...]

    def __post_init__(self) -> None:
        seen: dict[tuple[Label, Label], RuleRow] = {}
        for row in self.rows:
            key = (row.in_theta, row.in_phi)
            if key in seen:
                first = seen[key].line
                where = f" (first defined on line {first})" if first else ""
                raise DuplicateRuleError(
                    f"duplicate rule for ({key[0].name}, {key[1].name}){where}", row.line)
            seen[key] = row
        missing = [p for p in itertools.product(Label, Label) if p not in seen]
        if missing:
            raise MissingRuleError(missing)
        for row in self.rows:
            pair = row.antisymmetry_violation()
            if pair is not None:
                raise AntisymmetryError(row, pair, row.line)

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[RuleRow]:
        return iter(self.rows)

    def lookup(self, theta: Label, phi: Label) -> RuleRow:
        for row in self.rows:
            if row.in_theta is theta and row.in_phi is phi:
                return row
        raise KeyError((theta, phi))

    def dumps(self) -> str:
        return "".join(row.format() + "\n" for row in self.rows)


def _tokens(text: str) -> Iterator[tuple[str, int]]:
    col = 0
    for part in text.split(" "):
        if part:
            yield part, col + 1
        col += len(part) + 1


def parse_rule_rows(text: str) -> list[RuleRow]:
    """Parse rule lines without checking table-level invariants."""
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].replace("\t", " ").rstrip()
        toks = list(_tokens(line))
        if not toks:
            continue
        if len(toks) < 3 or toks[2][0] != "->":
            col = toks[2][1] if len(toks) >= 3 else len(line) + 1
            raise RuleSyntaxError("expected '<label> <label> -> <8 labels>'", lineno, col)
        if len(toks) != 11:
            col = toks[11][1] if len(toks) > 11 else len(line) + 1
            raise RuleSyntaxError(f"expected 8 output labels, found {len(toks) - 3}", lineno, col)
        labels = []
        for tok, col in toks[:2] + toks[3:]:
            try:
                labels.append(Label.parse(tok))
            except ValueError:
                raise RuleSyntaxError(f"unknown label {tok!r}", lineno, col) from None
        rows.append(RuleRow(labels[0], labels[1], tuple(labels[2:]), lineno))
    return rows


def parse_rule_table(text: str) -> RuleTable:
    return RuleTable(tuple(parse_rule_rows(text)))


def load_rule_table(path: str | Path) -> RuleTable:
    return parse_rule_table(Path(path).read_text(encoding="utf-8"))


def validation_report(text: str) -> tuple[bool, list[str]]:
    """Collect every problem in a rule file instead of stopping at the first."""
    try:
        rows = parse_rule_rows(text)
    except RuleSyntaxError as exc:
        return False, [f"syntax error: {exc}"]
    lines = []
    ok = True
    seen: dict[tuple[Label, Label], RuleRow] = {}
    for row in rows:
        key = (row.in_theta, row.in_phi)
        if key in seen:
            ok = False
            lines.append(f"duplicate: line {row.line}: ({key[0].name}, {key[1].name}) "
                         f"already defined on line {seen[key].line}")
        else:
            seen[key] = row
    missing = [p for p in itertools.product(Label, Label) if p not in seen]
    lines.insert(0, f"{len(rows)} rules")
    if missing:
        ok = False
        names = ", ".join(f"({t.name}, {p.name})" for t, p in missing)
        lines.append(f"coverage: FAIL, {len(missing)} of 49 pairs missing: {names}")
    else:
        lines.append("coverage: 7x7 OK")
    bad = 0
    for row in rows:
        pair = row.antisymmetry_violation()
        if pair is not None:
            bad += 1
            lines.append(f"antisymmetry: {AntisymmetryError(row, pair, row.line)}")
    if bad:
        ok = False
    else:
        lines.append("antisymmetry OK")
    return ok, lines


def default_rules_path() -> Path:
    return Path(__file__).resolve().parent.parent / "data" / "rules.txt"
