"""Chat-completion plumbing for heuristic generation.

Prompt builders are pure and byte-deterministic. Three transports sit behind
one interface: a live HTTP backend (chat-completions JSON wire format, retry
with exponential backoff on timeouts/429/5xx), a replay backend (one recorded
response file per request hash), and a deterministic mock that parses the
parent programs out of the prompt and applies a rule-level transformation.
The mock always answers with prose plus exactly one fenced program that
parses, so offline evolution runs never stall on extraction.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import re
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from .dsl import (
    HC_REFERENCE_TEXT,
    MOVE_ARITY,
    Acceptance,
    Binding,
    HeuristicProgram,
    Move,
    Rule,
    Selector,
    DslParseError,
    parse,
    render,
)
from .errors import ConfigError
from .strategies import StrategyEntry, render_strategies

log = logging.getLogger(__name__)

NOS_PER_PROMPT = 12


class BackendError(Exception):
    """Base for transport-level failures."""


class TransportError(BackendError):
    """HTTP failure that survived the retry policy."""


class ReplayMissError(BackendError):
    """No recorded response for this request hash."""


class CredentialsError(BackendError):
    """API key environment variable is not set."""


class ExtractionError(ValueError):
    """Response carries no parseable fenced program."""


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "system" | "user"
    content: str


@dataclass(frozen=True)
class ChatRequest:
    model: str
    temperature: float
    messages: tuple[ChatMessage, ...]

    def body(self) -> dict:
        return {
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": m.role, "content": m.content} for m in self.messages],
        }

    def request_hash(self) -> str:
        payload = json.dumps(self.body(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "mock"  # "live" | "replay" | "mock"
    endpoint: str = ""
    api_key_env: str = ""
    max_retries: int = 3
    backoff_base: float = 1.0
    timeout: float = 30.0
    replay_dir: str | None = None
    mock_seed: int = 0


@dataclass(frozen=True)
class TaskSpec:
    """Fixed prompt ingredients plus the sampling parameters of requests."""

    model: str = "gpt-4-turbo"
    temperature: float = 1.0
    problem: str = (
        "Improve a network's resistance to targeted attacks. The score removes "
        "nodes one at a time, always the currently highest-degree node, and "
        "averages the fraction of nodes still inside the largest connected "
        "component over the whole removal sequence. A heuristic repeatedly "
        "proposes one small edge modification; each applied modification spends "
        "one evaluation from a fixed budget and is kept or rolled back by the "
        "acceptance rule. Structural drift away from the original degree "
        "sequence and edge count is penalized during training, so prefer moves "
        "that conserve them."
    )
    facilities: str = (
        "The runtime provides: seeded random choices inside selectors, "
        "automatic legality filtering (self-loops and duplicate edges are "
        "skipped without cost), budgeted robustness evaluation after every "
        "applied move, and rollback of rejected moves."
    )


GRAMMAR_GUIDE = """\
A program is plain text:

    HEURISTIC "<name>"
    ACCEPT improve                      (or: ACCEPT anneal t0=<real> alpha=<real>)
    RULE
      <var> := <selector>               (one or more bindings)
      MOVE <move>(<vars>)
    END                                 (up to 8 rules, 8 bindings per rule)

Selectors bind node variables: highest_degree, lowest_degree, random_node,
highest_betweenness, similar_degree(ref, max_diff), neighbor_of(ref),
highest_degree_neighbor_of(ref), non_adjacent_to(ref). References must be
bound earlier in the same rule.

Moves: add_edge(a, b); remove_edge(a, b); relocate_edge(a, b, c) which removes
(a,b) and adds (c,b); swap_edges(a, b, c, d) which removes (a,b),(c,d) and
adds (a,d),(c,b) preserving all degrees.

Rules are tried in order each iteration; the first rule whose bindings and
move are legal is applied and evaluated. Example:

""" + "".join("    " + line + "\n" for line in HC_REFERENCE_TEXT.splitlines())


def _fenced(text: str) -> str:
    body = text if text.endswith("\n") else text + "\n"
    return f"```\n{body}```"


def _parent_section(title: str, individual) -> str:
    return (
        f"## {title}\n"
        f"{individual.description.strip()}\n\n"
        f"{_fenced(render(individual.program))}\n"
    )


SYSTEM_PROMPT = (
    "You design graph rewiring heuristics written in a small rule language. "
    "Reply with a short explanation of the idea followed by exactly one fenced "
    "code block containing the complete program."
)


def _request(task: TaskSpec, user: str) -> ChatRequest:
    return ChatRequest(
        model=task.model,
        temperature=task.temperature,
        messages=(ChatMessage("system", SYSTEM_PROMPT), ChatMessage("user", user)),
    )


def build_init_prompt(task: TaskSpec, seed_program: HeuristicProgram | None = None) -> ChatRequest:
    parts = [
        f"## Task\n{task.problem}\n",
        f"## Language\n{GRAMMAR_GUIDE}",
        f"## Facilities\n{task.facilities}\n",
    ]
    if seed_program is not None:
        parts.append(
            "## Seed\nA working program you may adapt:\n\n"
            f"{_fenced(render(seed_program))}\n"
        )
    parts.append(
        "## Instructions\n"
        "Write one new heuristic program in the language above. Aim for an "
        "approach that plausibly raises the attack score within a limited "
        "evaluation budget."
    )
    return _request(task, "\n".join(parts))


def build_e1_prompt(p1, p2, nos: list[StrategyEntry], task: TaskSpec = TaskSpec()) -> ChatRequest:
    _check_nos(nos)
    user = "\n".join([
        f"## Task\n{task.problem}\n",
        f"## Language\n{GRAMMAR_GUIDE}",
        f"## Strategies\n{render_strategies(nos)}",
        _parent_section("Parent 1", p1),
        _parent_section("Parent 2", p2),
        "## Instructions\n"
        "Design one entirely new heuristic that differs from both parents, "
        "drawing on the strategies above.",
    ])
    return _request(task, user)


def build_m1_prompt(p, nos: list[StrategyEntry], task: TaskSpec = TaskSpec()) -> ChatRequest:
    _check_nos(nos)
    user = "\n".join([
        f"## Task\n{task.problem}\n",
        f"## Language\n{GRAMMAR_GUIDE}",
        f"## Strategies\n{render_strategies(nos)}",
        _parent_section("Parent", p),
        "## Instructions\n"
        "Refine the parent heuristic by incorporating one of the strategies "
        "above; keep what already works.",
    ])
    return _request(task, user)


def build_m2_prompt(p, task: TaskSpec = TaskSpec()) -> ChatRequest:
    user = "\n".join([
        f"## Task\n{task.problem}\n",
        f"## Language\n{GRAMMAR_GUIDE}",
        _parent_section("Parent", p),
        "## Instructions\n"
        "Make one small adjustment to the parent heuristic (tune a numeric "
        "parameter or reorder bindings) without changing its overall approach.",
    ])
    return _request(task, user)


def _check_nos(nos) -> None:
    if len(nos) != NOS_PER_PROMPT:
        raise ValueError(f"expected exactly {NOS_PER_PROMPT} strategy entries, got {len(nos)}")


_FENCE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)


def extract_program(response: str) -> tuple[str, HeuristicProgram]:
    """Split a response into (prose description, parsed program).

    The first fenced block is the program; extra blocks are ignored with a
    warning. No block or an unparseable block raises ExtractionError.
    """
    blocks = _FENCE.findall(response)
    if not blocks:
        raise ExtractionError("response contains no fenced code block")
    if len(blocks) > 1:
        log.warning("response contains %d fenced blocks; using the first", len(blocks))
    try:
        program = parse(blocks[0])
    except DslParseError as exc:
        raise ExtractionError(f"fenced block does not parse: {exc}") from exc
    description = _FENCE.sub("", response).strip()
    return description, program


# --------------------------------------------------------------------------
# Backends

class LiveBackend:
    def __init__(self, config: BackendConfig):
        if not config.endpoint:
            raise ConfigError("live backend requires an endpoint URL")
        if not config.api_key_env:
            raise ConfigError("live backend requires api_key_env naming the key variable")
        self.config = config

    def complete(self, request: ChatRequest) -> str:
        key = os.environ.get(self.config.api_key_env)
        if not key:
            raise CredentialsError(
                f"environment variable {self.config.api_key_env} is not set")
        attempts = max(1, self.config.max_retries)
        last_error = None
        for attempt in range(attempts):
            if attempt:
                time.sleep(self.config.backoff_base * 2 ** (attempt - 1))
            try:
                resp = requests.post(
                    self.config.endpoint,
                    json=request.body(),
                    headers={"Authorization": f"Bearer {key}"},
                    timeout=self.config.timeout,
                )
            except (requests.Timeout, requests.ConnectionError) as exc:
                last_error = f"connection failure: {exc}"
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_error = f"HTTP {resp.status_code}"
                continue
            if resp.status_code != 200:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
            try:
                return resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError) as exc:
                raise TransportError(f"malformed completion payload: {exc}") from exc
        raise TransportError(f"gave up after {attempts} attempt(s): {last_error}")


class ReplayBackend:
    def __init__(self, config: BackendConfig):
        if not config.replay_dir:
            raise ConfigError("replay backend requires replay_dir")
        self.directory = Path(config.replay_dir)

    def complete(self, request: ChatRequest) -> str:
        path = self.directory / f"{request.request_hash()}.txt"
        if not path.exists():
            raise ReplayMissError(f"no recorded response at {path}")
        return path.read_text(encoding="utf-8")


def save_replay(directory, request: ChatRequest, response: str) -> Path:
    """Record a response so a ReplayBackend can serve it later."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{request.request_hash()}.txt"
    path.write_text(response, encoding="utf-8")
    return path


class MockBackend:
    """Offline stand-in that mutates the programs embedded in the prompt.

    Responses are a deterministic function of (mock_seed, call index, request
    bytes); the call counter stands in for sampling diversity, so repeated
    identical prompts still yield distinct programs. The counter is exposed so
    resumable runs can restore it.
    """

    def __init__(self, config: BackendConfig):
        self.seed = config.mock_seed
        self.calls = 0

    def complete(self, request: ChatRequest) -> str:
        digest = hashlib.sha256(
            f"{self.seed}:{self.calls}:{request.request_hash()}".encode()
        ).hexdigest()
        self.calls += 1
        rng = random.Random(int(digest, 16))
        prompt = request.messages[-1].content
        parents = [parse(block) for block in _FENCE.findall(prompt)]
        nos = _parse_strategy_lines(prompt)
        if len(parents) >= 2:
            desc, prog = crossover_programs(parents[0], parents[1], rng)
        elif len(parents) == 1 and nos:
            desc, prog = mutate_program(parents[0], rng, "m1", nos)
        elif len(parents) == 1:
            desc, prog = mutate_program(parents[0], rng, "m2")
        else:
            desc, prog = random_program(rng)
        return f"{desc}\n\n{_fenced(render(prog))}\n"


_STRATEGY_LINE = re.compile(r"^\s*\d+\.\s*(.+?)\s*\|\s*(.+?)\s*\|\s*(.+?)\s*$", re.MULTILINE)


def _parse_strategy_lines(prompt: str) -> list[StrategyEntry]:
    if "## Strategies" not in prompt:
        return []
    section = prompt.split("## Strategies", 1)[1].split("##", 1)[0]
    return [StrategyEntry(f, s, a) for f, s, a in _STRATEGY_LINE.findall(section)]


def make_backend(config: BackendConfig):
    if config.kind == "live":
        return LiveBackend(config)
    if config.kind == "replay":
        return ReplayBackend(config)
    if config.kind == "mock":
        return MockBackend(config)
    raise ConfigError(f"unknown backend kind {config.kind!r}")


def complete(request: ChatRequest, backend) -> str:
    """Round-trip one request. `backend` is a backend instance or a
    BackendConfig (note: a fresh mock is stateless only for its first call;
    hold one instance when sequencing calls)."""
    if isinstance(backend, BackendConfig):
        backend = make_backend(backend)
    return backend.complete(request)


# --------------------------------------------------------------------------
# Deterministic program transformations (mock responses + fallback variation)

_NODE_SELECTORS = ("random_node", "highest_degree", "lowest_degree", "highest_betweenness")

_ACTION_MOVE = {
    "Edge Addition": "add_edge",
    "Edge Relocation": "relocate_edge",
    "Edge Swapping": "swap_edges",
}

_STRATEGY_SELECTOR = {
    "High-Degree Node Priority": "highest_degree",
    "Low-Degree Node Priority": "lowest_degree",
    "Betweenness Centrality Priority": "highest_betweenness",
    "Closeness Centrality Priority": "highest_betweenness",
    "Eigenvector Centrality Priority": "highest_betweenness",
    "High-Weight Edge Priority": "highest_degree",
    "Low-Weight Edge Priority": "lowest_degree",
    "Shortest Path Optimization": "highest_betweenness",
    "Critical Path Optimization": "highest_betweenness",
    "Similarity-Based Node Selection": "random_node",
    "Boundary Node Optimization": "lowest_degree",
    "Homophily-Based Edge Optimization": "random_node",
    "Heterophily-Based Edge Optimization": "random_node",
    "Hub-Peripheral Optimization": "highest_degree",
    "Random Node Selection": "random_node",
    "Central Node Optimization": "highest_degree",
}


def _pick(rng: random.Random, seq):
    return seq[rng.randrange(len(seq))]


def _rule_for(move_kind: str, primary: str, rng: random.Random) -> Rule:
    a = Binding("a", Selector(primary))
    if move_kind == "add_edge":
        b = Binding("b", Selector("non_adjacent_to", "a"))
        return Rule((a, b), Move("add_edge", ("a", "b")))
    if move_kind == "relocate_edge":
        b = Binding("b", Selector("neighbor_of", "a"))
        target = _pick(rng, ("non_adjacent_to", "random_node", "lowest_degree"))
        c = Binding("c", Selector(target, "b") if target == "non_adjacent_to" else Selector(target))
        return Rule((a, b, c), Move("relocate_edge", ("a", "b", "c")))
    if move_kind == "remove_edge":
        b = Binding("b", Selector("neighbor_of", "a"))
        return Rule((a, b), Move("remove_edge", ("a", "b")))
    # swap_edges
    b = Binding("b", Selector("neighbor_of", "a"))
    if rng.random() < 0.4:
        c = Binding("c", Selector("similar_degree", "a", max_diff=1 + rng.randrange(3)))
    else:
        c = Binding("c", Selector(_pick(rng, _NODE_SELECTORS)))
    d = Binding("d", Selector("neighbor_of", "c"))
    return Rule((a, b, c, d), Move("swap_edges", ("a", "b", "c", "d")))


def _describe(program: HeuristicProgram) -> str:
    moves = sorted({r.move.kind.replace("_", " ") for r in program.rules})
    sels = sorted({b.selector.kind.replace("_", " ")
                   for r in program.rules for b in r.bindings})
    accept = ("keeps strict improvements" if program.acceptance.kind == "improve"
              else "anneals setbacks away")
    return (f"Binds nodes via {', '.join(sels)} and applies {', '.join(moves)} "
            f"moves; {accept}.")


def _name(rng: random.Random) -> str:
    return f"h{rng.randrange(16 ** 6):06x}"


def random_program(rng: random.Random) -> tuple[str, HeuristicProgram]:
    """A fresh small valid program (used when the prompt embeds no parent)."""
    acceptance = (Acceptance("improve") if rng.random() < 0.7
                  else Acceptance("anneal", _pick(rng, (0.005, 0.01, 0.02)),
                                  _pick(rng, (0.995, 0.999))))
    n_rules = 1 + rng.randrange(2)
    rules = tuple(
        _rule_for(_pick(rng, ("swap_edges", "swap_edges", "add_edge", "relocate_edge")),
                  _pick(rng, _NODE_SELECTORS), rng)
        for _ in range(n_rules)
    )
    program = HeuristicProgram(_name(rng), acceptance, rules)
    return _describe(program), program


def crossover_programs(p1: HeuristicProgram, p2: HeuristicProgram,
                       rng: random.Random) -> tuple[str, HeuristicProgram]:
    """Prefix of one parent's rules, suffix of the other's, one point mutation."""
    cut1 = 1 + rng.randrange(len(p1.rules))
    cut2 = rng.randrange(len(p2.rules) + 1)
    rules = (p1.rules[:cut1] + p2.rules[cut2:])[:8]
    program = HeuristicProgram(_name(rng), p1.acceptance, rules)
    program = _mutate_point(program, rng)
    return _describe(program), program


def mutate_program(program: HeuristicProgram, rng: random.Random, mode: str,
                   nos: list[StrategyEntry] | None = None) -> tuple[str, HeuristicProgram]:
    """m1: rebuild one rule around a sampled strategy's action; m2: perturb a
    numeric parameter or reorder independent bindings."""
    if mode == "m1":
        entry = _pick(rng, nos or [StrategyEntry("Degree", "High-Degree Node Priority",
                                                 "Edge Swapping")])
        move_kind = _ACTION_MOVE.get(entry.action, "swap_edges")
        primary = _STRATEGY_SELECTOR.get(entry.strategy, "random_node")
        rules = list(program.rules)
        rules[rng.randrange(len(rules))] = _rule_for(move_kind, primary, rng)
        out = HeuristicProgram(_name(rng), program.acceptance, tuple(rules))
        return _describe(out), out
    if mode == "m2":
        out = HeuristicProgram(_name(rng), program.acceptance, program.rules)
        out = _perturb(out, rng)
        return _describe(out), out
    raise ValueError(f"unknown mutation mode {mode!r}")


def _perturb(program: HeuristicProgram, rng: random.Random) -> HeuristicProgram:
    acc = program.acceptance
    numeric: list[tuple[int, int]] = [
        (ri, bi)
        for ri, rule in enumerate(program.rules)
        for bi, b in enumerate(rule.bindings)
        if b.selector.kind == "similar_degree"
    ]
    options = []
    if acc.kind == "anneal":
        options.append("anneal")
    if numeric:
        options.append("max_diff")
    swaps = _independent_adjacent_bindings(program)
    if swaps:
        options.append("swap")
    if not options:
        new_acc = (Acceptance("anneal", 0.01, 0.999) if acc.kind == "improve"
                   else Acceptance("improve"))
        return HeuristicProgram(program.name, new_acc, program.rules)
    choice = _pick(rng, options)
    if choice == "anneal":
        new_acc = Acceptance("anneal", acc.t0 * _pick(rng, (0.5, 2.0)), acc.alpha)
        return HeuristicProgram(program.name, new_acc, program.rules)
    if choice == "max_diff":
        ri, bi = _pick(rng, numeric)
        rules = list(program.rules)
        bindings = list(rules[ri].bindings)
        sel = bindings[bi].selector
        delta = _pick(rng, (-1, 1))
        new_md = max(0, sel.max_diff + delta)
        bindings[bi] = Binding(bindings[bi].var, Selector(sel.kind, sel.ref, new_md))
        rules[ri] = Rule(tuple(bindings), rules[ri].move)
        return HeuristicProgram(program.name, program.acceptance, tuple(rules))
    ri, bi = _pick(rng, swaps)
    rules = list(program.rules)
    bindings = list(rules[ri].bindings)
    bindings[bi], bindings[bi + 1] = bindings[bi + 1], bindings[bi]
    rules[ri] = Rule(tuple(bindings), rules[ri].move)
    return HeuristicProgram(program.name, program.acceptance, tuple(rules))


def _independent_adjacent_bindings(program: HeuristicProgram) -> list[tuple[int, int]]:
    """(rule, index) pairs where bindings i and i+1 can swap without breaking
    the bound-earlier invariant."""
    out = []
    for ri, rule in enumerate(program.rules):
        for bi in range(len(rule.bindings) - 1):
            if rule.bindings[bi + 1].selector.ref != rule.bindings[bi].var:
                out.append((ri, bi))
    return out


def _mutate_point(program: HeuristicProgram, rng: random.Random) -> HeuristicProgram:
    """Replace one selector (or, given enough bound variables, the move)."""
    ri = rng.randrange(len(program.rules))
    rule = program.rules[ri]
    variables = [b.var for b in rule.bindings]
    if len(variables) >= 2 and rng.random() < 0.25:
        kind = _pick(rng, ("add_edge", "relocate_edge", "swap_edges"))
        arity = MOVE_ARITY[kind]
        if arity <= len(variables):
            args = tuple(rng.sample(variables, arity))
            rules = list(program.rules)
            rules[ri] = Rule(rule.bindings, Move(kind, args))
            return HeuristicProgram(program.name, program.acceptance, tuple(rules))
    bi = rng.randrange(len(rule.bindings))
    earlier = [b.var for b in rule.bindings[:bi]]
    if earlier and rng.random() < 0.5:
        kind = _pick(rng, ("neighbor_of", "non_adjacent_to", "similar_degree",
                           "highest_degree_neighbor_of"))
        ref = _pick(rng, earlier)
        sel = (Selector(kind, ref, 1 + rng.randrange(3))
               if kind == "similar_degree" else Selector(kind, ref))
    else:
        sel = Selector(_pick(rng, _NODE_SELECTORS))
    bindings = list(rule.bindings)
    bindings[bi] = Binding(bindings[bi].var, sel)
    rules = list(program.rules)
    rules[ri] = Rule(tuple(bindings), rule.move)
    return HeuristicProgram(program.name, program.acceptance, tuple(rules))
