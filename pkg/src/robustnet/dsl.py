"""A small line-oriented rule language for graph rewiring heuristics.

A program names itself, fixes an acceptance rule, and lists one or more rules.
Each rule binds variables to nodes through selectors and finishes with a move
on the bound variables::

    HEURISTIC "hc"
    ACCEPT improve
    RULE
      a := random_node
      b := neighbor_of(a)
      c := random_node
      d := neighbor_of(c)
      MOVE swap_edges(a, b, c, d)
    END

Keywords are case-sensitive. Variables are identifiers (an optional leading
'$' is tolerated and kept as part of the name) and are scoped to their rule;
every reference must be bound earlier in the same rule. Programs are capped at
8 rules and 8 bindings per rule.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

MAX_RULES = 8
MAX_BINDINGS = 8

# selector name -> number of node references it takes
SELECTOR_REFS = {
    "highest_degree": 0,
    "lowest_degree": 0,
    "random_node": 0,
    "highest_betweenness": 0,
    "similar_degree": 1,  # plus an integer max_diff argument
    "neighbor_of": 1,
    "highest_degree_neighbor_of": 1,
    "non_adjacent_to": 1,
}

# move name -> arity
MOVE_ARITY = {
    "add_edge": 2,
    "remove_edge": 2,
    "relocate_edge": 3,  # remove (a,b), add (c,b)
    "swap_edges": 4,     # remove (a,b),(c,d), add (a,d),(c,b)
}

RANDOMIZED_SELECTORS = {"random_node", "neighbor_of", "similar_degree", "non_adjacent_to"}


class DslParseError(ValueError):
    """Syntax or structural error, with 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Selector:
    kind: str
    ref: str | None = None
    max_diff: int | None = None


@dataclass(frozen=True)
class Binding:
    var: str
    selector: Selector


@dataclass(frozen=True)
class Move:
    kind: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class Acceptance:
    kind: str  # "improve" | "anneal"
    t0: float | None = None
    alpha: float | None = None


@dataclass(frozen=True)
class Rule:
    bindings: tuple[Binding, ...]
    move: Move


@dataclass(frozen=True)
class HeuristicProgram:
    name: str
    acceptance: Acceptance
    rules: tuple[Rule, ...]


_IDENT = re.compile(r"\$?[A-Za-z_][A-Za-z0-9_]*")


class _Lines:
    def __init__(self, text: str):
        self.lines = text.splitlines()
        self.pos = 0

    def next_significant(self) -> tuple[int, str] | None:
        while self.pos < len(self.lines):
            lineno = self.pos + 1
            line = self.lines[self.pos]
            self.pos += 1
            if line.strip():
                return lineno, line
        return None


def _col(line: str, offset: int) -> int:
    return offset + 1


def parse(text: str) -> HeuristicProgram:
    """Parse program text; raises DslParseError with location on any problem."""
    src = _Lines(text)

    item = src.next_significant()
    if item is None:
        raise DslParseError("empty program, expected HEURISTIC header", 1)
    lineno, line = item
    stripped = line.strip()
    if not stripped.startswith("HEURISTIC"):
        raise DslParseError("expected HEURISTIC header", lineno, _col(line, line.find(stripped[0])))
    rest = stripped[len("HEURISTIC"):].strip()
    m = re.fullmatch(r'"([^"]*)"', rest)
    if not m:
        raise DslParseError('expected quoted heuristic name after HEURISTIC', lineno)
    name = m.group(1)

    item = src.next_significant()
    if item is None:
        raise DslParseError("missing ACCEPT line", lineno + 1)
    lineno, line = item
    stripped = line.strip()
    if not stripped.startswith("ACCEPT"):
        raise DslParseError("expected ACCEPT line", lineno)
    acceptance = _parse_acceptance(stripped[len("ACCEPT"):].strip(), lineno)

    rules: list[Rule] = []
    while True:
        item = src.next_significant()
        if item is None:
            break
        lineno, line = item
        stripped = line.strip()
        if stripped != "RULE":
            raise DslParseError(f"expected RULE, got {stripped!r}", lineno)
        rules.append(_parse_rule(src, lineno))
        if len(rules) > MAX_RULES:
            raise DslParseError(f"too many rules (limit {MAX_RULES})", lineno)
    if not rules:
        raise DslParseError("program needs at least one RULE", lineno)
    return HeuristicProgram(name, acceptance, tuple(rules))


def _parse_acceptance(rest: str, lineno: int) -> Acceptance:
    if rest == "improve":
        return Acceptance("improve")
    m = re.fullmatch(r"anneal\s+t0=(\S+)\s+alpha=(\S+)", rest)
    if not m:
        raise DslParseError(
            "expected 'improve' or 'anneal t0=<real> alpha=<real>' after ACCEPT", lineno)
    try:
        t0, alpha = float(m.group(1)), float(m.group(2))
    except ValueError:
        raise DslParseError("anneal parameters must be real numbers", lineno) from None
    if not t0 > 0:
        raise DslParseError(f"anneal t0 must be > 0, got {m.group(1)}", lineno)
    if not 0 < alpha < 1:
        raise DslParseError(f"anneal alpha must be in (0,1), got {m.group(2)}", lineno)
    return Acceptance("anneal", t0, alpha)


def _parse_rule(src: _Lines, rule_line: int) -> Rule:
    bindings: list[Binding] = []
    bound: set[str] = set()
    move: Move | None = None
    while True:
        item = src.next_significant()
        if item is None:
            raise DslParseError("unterminated RULE, expected END", rule_line)
        lineno, line = item
        stripped = line.strip()
        if stripped == "END":
            if move is None:
                raise DslParseError("RULE has no MOVE", lineno)
            if not bindings:
                raise DslParseError("RULE has no bindings", lineno)
            return Rule(tuple(bindings), move)
        if stripped.startswith("MOVE"):
            if move is not None:
                raise DslParseError("RULE already has a MOVE", lineno)
            move = _parse_move(stripped[len("MOVE"):].strip(), lineno, line, bound)
            continue
        if move is not None:
            raise DslParseError("bindings must precede MOVE", lineno)
        binding = _parse_binding(stripped, lineno, line, bound)
        bindings.append(binding)
        bound.add(binding.var)
        if len(bindings) > MAX_BINDINGS:
            raise DslParseError(f"too many bindings (limit {MAX_BINDINGS})", lineno)


def _parse_binding(stripped: str, lineno: int, line: str, bound: set[str]) -> Binding:
    if ":=" not in stripped:
        raise DslParseError(f"expected binding 'name := selector', got {stripped!r}", lineno)
    var_part, sel_part = stripped.split(":=", 1)
    var = var_part.strip()
    if not _IDENT.fullmatch(var):
        raise DslParseError(f"invalid variable name {var!r}", lineno, _col(line, line.find(var_part)))
    selector = _parse_selector(sel_part.strip(), lineno, line, bound)
    return Binding(var, selector)


def _parse_selector(text: str, lineno: int, line: str, bound: set[str]) -> Selector:
    m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)(?:\((.*)\))?", text)
    if not m:
        raise DslParseError(f"malformed selector {text!r}", lineno, _col(line, line.find(text)))
    kind, argtext = m.group(1), m.group(2)
    if kind not in SELECTOR_REFS:
        raise DslParseError(f"unknown selector {kind!r}", lineno, _col(line, line.find(kind)))
    args = [a.strip() for a in argtext.split(",")] if argtext is not None else []
    if argtext is not None and argtext.strip() == "":
        raise DslParseError(f"empty argument list for {kind}", lineno)
    nrefs = SELECTOR_REFS[kind]
    want = nrefs + (1 if kind == "similar_degree" else 0)
    if len(args) != want:
        raise DslParseError(
            f"selector {kind} takes {want} argument(s), got {len(args)}", lineno)
    ref = None
    max_diff = None
    if nrefs:
        ref = args[0]
        if not _IDENT.fullmatch(ref):
            raise DslParseError(f"invalid reference {ref!r}", lineno, _col(line, line.find(ref)))
        if ref not in bound:
            raise DslParseError(f"unbound variable {ref!r}", lineno, _col(line, line.find(ref)))
    if kind == "similar_degree":
        try:
            max_diff = int(args[1])
        except ValueError:
            raise DslParseError(
                f"similar_degree max_diff must be an integer, got {args[1]!r}", lineno) from None
        if max_diff < 0:
            raise DslParseError(f"similar_degree max_diff must be >= 0, got {max_diff}", lineno)
    return Selector(kind, ref, max_diff)


def _parse_move(text: str, lineno: int, line: str, bound: set[str]) -> Move:
    m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_]*)\((.*)\)", text)
    if not m:
        raise DslParseError(f"malformed move {text!r}", lineno, _col(line, line.find(text)))
    kind, argtext = m.group(1), m.group(2)
    if kind not in MOVE_ARITY:
        raise DslParseError(f"unknown move {kind!r}", lineno, _col(line, line.find(kind)))
    args = [a.strip() for a in argtext.split(",")] if argtext.strip() else []
    if len(args) != MOVE_ARITY[kind]:
        raise DslParseError(
            f"move {kind} takes {MOVE_ARITY[kind]} argument(s), got {len(args)}", lineno)
    for a in args:
        if not _IDENT.fullmatch(a):
            raise DslParseError(f"invalid reference {a!r}", lineno, _col(line, line.find(a)))
        if a not in bound:
            raise DslParseError(f"unbound variable {a!r}", lineno, _col(line, line.find(a)))
    return Move(kind, tuple(args))


def render(program: HeuristicProgram) -> str:
    """Canonical text: two-space indents, no tabs, trailing newline.
    parse(render(p)) is structurally equal to p, and structurally equal
    programs render to identical bytes."""
    out = [f'HEURISTIC "{program.name}"']
    acc = program.acceptance
    if acc.kind == "improve":
        out.append("ACCEPT improve")
    else:
        out.append(f"ACCEPT anneal t0={acc.t0!r} alpha={acc.alpha!r}")
    for rule in program.rules:
        out.append("RULE")
        for b in rule.bindings:
            out.append(f"  {b.var} := {_render_selector(b.selector)}")
        out.append(f"  MOVE {rule.move.kind}({', '.join(rule.move.args)})")
        out.append("END")
    return "\n".join(out) + "\n"


def _render_selector(sel: Selector) -> str:
    if sel.kind == "similar_degree":
        return f"{sel.kind}({sel.ref}, {sel.max_diff})"
    if sel.ref is not None:
        return f"{sel.kind}({sel.ref})"
    return sel.kind


def validate(program: HeuristicProgram) -> list[str]:
    """Static lint: dead bindings, moves that can never be legal, and fully
    deterministic programs (which can stall on a fixed point)."""
    warnings: list[str] = []
    for ri, rule in enumerate(program.rules, start=1):
        used: set[str] = set(rule.move.args)
        for b in rule.bindings:
            if b.selector.ref is not None:
                used.add(b.selector.ref)
        for b in rule.bindings:
            if b.var not in used:
                warnings.append(f"rule {ri}: binding {b.var!r} is never used")
        warnings.extend(_impossible_move(rule.move, ri))
    if not any(
        b.selector.kind in RANDOMIZED_SELECTORS
        for rule in program.rules
        for b in rule.bindings
    ):
        warnings.append(
            "program draws no randomness; a deterministic proposal can stall on a fixed point")
    return warnings


def _impossible_move(move: Move, ri: int) -> list[str]:
    a = move.args
    kind = move.kind
    if kind == "add_edge" and a[0] == a[1]:
        return [f"rule {ri}: add_edge({a[0]}, {a[1]}) is always a self-loop"]
    if kind == "remove_edge" and a[0] == a[1]:
        return [f"rule {ri}: remove_edge({a[0]}, {a[1]}) can never match an edge"]
    if kind == "relocate_edge" and a[2] == a[1]:
        return [f"rule {ri}: relocate_edge target equals the kept endpoint; never legal"]
    if kind == "swap_edges" and (a[0] == a[3] or a[1] == a[2] or (a[0] == a[2] and a[1] == a[3])):
        return [f"rule {ri}: swap_edges arguments alias; never legal"]
    return []


HC_REFERENCE_TEXT = """\
HEURISTIC "hc"
ACCEPT improve
RULE
  a := random_node
  b := neighbor_of(a)
  c := random_node
  d := neighbor_of(c)
  MOVE swap_edges(a, b, c, d)
END
"""


def hc_reference_program() -> HeuristicProgram:
    """The random double-edge-swap hill climber expressed in the DSL."""
    return parse(HC_REFERENCE_TEXT)
