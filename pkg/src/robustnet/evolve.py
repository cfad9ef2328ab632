"""Evolutionary search over heuristic programs.

One run: seed an initial population through the chat backend, score each
individual by interpreting its program on every training graph under a small
evaluation budget, then iterate generations of tournament-parented variation
(exploratory crossover, strategy-guided modification, local adjustment),
followed by fitness-proportional survivor selection without replacement.

Per-graph (robustness, deviation) statistics are cached on the individual at
birth, so re-weighting fitness as the constraint schedule tightens each
generation is pure arithmetic; no program is ever re-interpreted. All
randomness is derived statelessly from (master_seed, generation, role), and
the only long-lived mutable piece of backend state (the mock call counter) is
persisted, which makes interrupted runs resumable byte-for-byte.
"""

from __future__ import annotations

import json
import logging
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from .dsl import HeuristicProgram, parse, render
from .errors import ConfigError
from .fitness import AffParams, penalty_weight, structural_deviation
from .graph import BaParams, Graph, generate_ba
from .interpreter import InterpreterTimeout, interpret
from .llm import (
    BackendConfig,
    ExtractionError,
    TaskSpec,
    build_e1_prompt,
    build_init_prompt,
    build_m1_prompt,
    build_m2_prompt,
    extract_program,
    make_backend,
    mutate_program,
)
from .robustness import robustness_r
from .strategies import sample_strategies

log = logging.getLogger(__name__)

FITNESS_EPSILON = 1e-9


@dataclass
class Individual:
    id: int
    description: str
    program: HeuristicProgram
    parent_ids: tuple[int, ...] = ()
    birth_generation: int = 0
    per_graph: tuple[tuple[float, float], ...] | None = None  # (R, Y) per graph
    fitness: float | None = None

    def refresh_fitness(self, t: int, params: AffParams) -> float:
        """Recompute the schedule-weighted fitness from cached statistics."""
        if self.per_graph is None:
            self.fitness = 0.0
        else:
            w = penalty_weight(t, params)
            self.fitness = sum(r * (2.0 - w * y) for r, y in self.per_graph)
        return self.fitness


@dataclass(frozen=True)
class TrainingSpec:
    sizes: tuple[int, ...] = (50, 100)
    m0_values: tuple[int, ...] = (2, 3, 4, 5)
    instances: int = 3
    n0: int = 3


@dataclass
class EvolutionConfig:
    popsize: int = 10
    generations: int = 50
    p_e1: float = 0.8
    p_m1: float = 0.1
    p_m2: float = 0.1
    tournament_k: int = 2
    training_budget: int = 100
    aff_exponent: float = 1.5
    training: TrainingSpec = field(default_factory=TrainingSpec)
    backend: BackendConfig = field(default_factory=BackendConfig)
    task: TaskSpec = field(default_factory=TaskSpec)
    master_seed: int = 0
    seed_program_text: str | None = None
    interp_timeout: float = 5.0
    out_dir: str | None = None

    def __post_init__(self):
        if self.popsize < 2:
            raise ConfigError(f"popsize must be >= 2, got {self.popsize}")
        if self.generations < 0:
            raise ConfigError(f"generations must be >= 0, got {self.generations}")
        for name in ("p_e1", "p_m1", "p_m2"):
            if not 0 <= getattr(self, name) <= 1:
                raise ConfigError(f"{name} must be in [0,1]")
        if self.p_e1 + self.p_m1 + self.p_m2 > 1 + 1e-9:
            raise ConfigError("p_e1 + p_m1 + p_m2 must not exceed 1")
        if self.tournament_k < 1:
            raise ConfigError("tournament_k must be >= 1")
        if self.training_budget < 1:
            raise ConfigError("training_budget must be >= 1")

    def aff_params(self) -> AffParams:
        return AffParams(max(1, self.generations), self.aff_exponent)


def build_training_set(config: EvolutionConfig) -> list[Graph]:
    """Scale-free training graphs over sizes x densities x instances, seeded
    deterministically from the master seed. The seed clique is widened to m0
    when the density parameter exceeds the base n0."""
    spec = config.training
    graphs = []
    for n in spec.sizes:
        for m0 in spec.m0_values:
            for i in range(spec.instances):
                seed = f"{config.master_seed}:train:{n}:{m0}:{i}"
                n0 = max(spec.n0, m0)
                graphs.append(generate_ba(BaParams(n=n, n0=n0, m0=m0, seed=seed)))
    return graphs


def evaluate_individual(ind: Individual, training: list[Graph],
                        config: EvolutionConfig) -> None:
    """Interpret the program once per training graph and cache (R, Y) pairs.
    Timeouts or interpreter errors zero the individual out."""
    stats: list[tuple[float, float]] = []
    for j, g in enumerate(training):
        seed = f"{config.master_seed}:fit:{ind.id}:{j}"
        deadline = time.monotonic() + config.interp_timeout
        try:
            out = interpret(ind.program, g, config.training_budget, seed,
                            deadline=deadline)
        except InterpreterTimeout:
            log.warning("individual %d timed out on training graph %d", ind.id, j)
            ind.per_graph = None
            return
        except Exception as exc:  # defensive: a broken program scores zero
            log.warning("individual %d failed on training graph %d: %s", ind.id, j, exc)
            ind.per_graph = None
            return
        y = structural_deviation(g, out.final_graph).y
        stats.append((out.final_r, y))
    ind.per_graph = tuple(stats)


def tournament_select(pop: list[Individual], k: int, rng: random.Random) -> Individual:
    """Best of k uniform draws with replacement; ties go to the lowest id."""
    if not pop:
        raise ValueError("empty population")
    draws = [pop[rng.randrange(len(pop))] for _ in range(k)]
    return min(draws, key=lambda ind: (-ind.fitness, ind.id))


def roulette_survivors(pool: list[Individual], popsize: int,
                       rng: random.Random) -> list[Individual]:
    """popsize distinct individuals, probability proportional to fitness
    (epsilon-padded so all-zero pools still select)."""
    if popsize > len(pool):
        raise ValueError(f"cannot select {popsize} from a pool of {len(pool)}")
    remaining = list(pool)
    chosen: list[Individual] = []
    for _ in range(popsize):
        weights = [ind.fitness + FITNESS_EPSILON for ind in remaining]
        target = rng.random() * sum(weights)
        acc = 0.0
        idx = len(remaining) - 1
        for i, w in enumerate(weights):
            acc += w
            if target < acc:
                idx = i
                break
        chosen.append(remaining.pop(idx))
    return chosen


class _Engine:
    def __init__(self, config: EvolutionConfig):
        self.config = config
        self.training = build_training_set(config)
        self.backend = make_backend(config.backend)
        self.task = config.task
        self.seed_program = (parse(config.seed_program_text)
                             if config.seed_program_text else None)
        self.next_id = 0
        self.pop: list[Individual] = []
        self.best_ever: dict | None = None
        self.stats: list[dict] = []
        self.gen_completed = -1
        self.out_dir = Path(config.out_dir) if config.out_dir else None

    # -- id and rng helpers -------------------------------------------------

    def _rng(self, *parts) -> random.Random:
        return random.Random(":".join(str(p) for p in (self.config.master_seed, *parts)))

    def _new_id(self) -> int:
        self.next_id += 1
        return self.next_id - 1

    # -- population construction --------------------------------------------

    def _individual_from_response(self, response: str, parents: tuple[int, ...],
                                  generation: int) -> Individual:
        description, program = extract_program(response)
        return Individual(self._new_id(), description, program,
                          parent_ids=parents, birth_generation=generation)

    def _complete_with_retry(self, build_request, fallback_parent: Individual | None,
                             generation: int, parents: tuple[int, ...],
                             label: str) -> Individual:
        last_error = None
        for attempt in range(3):
            try:
                return self._individual_from_response(
                    self.backend.complete(build_request()), parents, generation)
            except ExtractionError as exc:
                last_error = exc
                log.warning("%s extraction failed (attempt %d): %s", label, attempt + 1, exc)
        if fallback_parent is None:
            raise ExtractionError(f"{label}: no usable program after retries: {last_error}")
        log.warning("%s: falling back to a local mutation of individual %d",
                    label, fallback_parent.id)
        rng = self._rng("fallback", generation, label)
        description, program = mutate_program(fallback_parent.program, rng, "m2")
        return Individual(self._new_id(), description, program,
                          parent_ids=parents, birth_generation=generation)

    def initialize(self) -> None:
        self.pop = []
        for i in range(self.config.popsize):
            ind = self._complete_with_retry(
                lambda: build_init_prompt(self.task, self.seed_program),
                fallback_parent=None, generation=0, parents=(),
                label=f"init[{i}]")
            evaluate_individual(ind, self.training, self.config)
            ind.refresh_fitness(0, self.config.aff_params())
            self.pop.append(ind)
        self._note_generation(0)

    # -- variation ----------------------------------------------------------

    def _offspring_counts(self) -> tuple[int, int, int]:
        p = self.config
        return (math.ceil(p.p_e1 * p.popsize),
                math.ceil(p.p_m1 * p.popsize),
                math.ceil(p.p_m2 * p.popsize))

    def variation(self, t: int) -> list[Individual]:
        cfg = self.config
        select_rng = self._rng("gen", t, "select")
        n_e1, n_m1, n_m2 = self._offspring_counts()
        offspring: list[Individual] = []
        for i in range(n_e1):
            p1 = tournament_select(self.pop, cfg.tournament_k, select_rng)
            p2 = tournament_select(self.pop, cfg.tournament_k, select_rng)
            nos = sample_strategies(f"{cfg.master_seed}:gen:{t}:e1:{i}:nos", 12)
            ind = self._complete_with_retry(
                lambda: build_e1_prompt(p1, p2, nos, self.task),
                fallback_parent=p1, generation=t, parents=(p1.id, p2.id),
                label=f"e1[{t}:{i}]")
            offspring.append(ind)
        for i in range(n_m1):
            p1 = tournament_select(self.pop, cfg.tournament_k, select_rng)
            nos = sample_strategies(f"{cfg.master_seed}:gen:{t}:m1:{i}:nos", 12)
            ind = self._complete_with_retry(
                lambda: build_m1_prompt(p1, nos, self.task),
                fallback_parent=p1, generation=t, parents=(p1.id,),
                label=f"m1[{t}:{i}]")
            offspring.append(ind)
        for i in range(n_m2):
            p1 = tournament_select(self.pop, cfg.tournament_k, select_rng)
            ind = self._complete_with_retry(
                lambda: build_m2_prompt(p1, self.task),
                fallback_parent=p1, generation=t, parents=(p1.id,),
                label=f"m2[{t}:{i}]")
            offspring.append(ind)
        for ind in offspring:
            evaluate_individual(ind, self.training, self.config)
            ind.refresh_fitness(t, cfg.aff_params())
        return offspring

    # -- bookkeeping ---------------------------------------------------------

    def _note_generation(self, t: int) -> None:
        best = max(self.pop, key=lambda ind: (ind.fitness, -ind.id))
        if self.best_ever is None or best.fitness > self.best_ever["fitness"]:
            self.best_ever = {
                "fitness": best.fitness,
                "generation": t,
                "individual": _individual_to_json(best),
            }
        self.stats.append({
            "generation": t,
            "best_fitness": best.fitness,
            "mean_fitness": sum(i.fitness for i in self.pop) / len(self.pop),
            "best_ever_fitness": self.best_ever["fitness"],
            "best_id": best.id,
        })
        self.gen_completed = t
        self._persist(t)

    def _persist(self, t: int) -> None:
        if self.out_dir is None:
            return
        self.out_dir.mkdir(parents=True, exist_ok=True)
        snapshot = {
            "generation": t,
            "population": [_individual_to_json(i) for i in self.pop],
            "stats": self.stats[-1],
        }
        _dump_json(self.out_dir / f"gen_{t:03d}.json", snapshot)
        state = {
            "config_echo": {
                "popsize": self.config.popsize,
                "generations": self.config.generations,
                "master_seed": self.config.master_seed,
            },
            "gen_completed": self.gen_completed,
            "next_id": self.next_id,
            "backend_calls": getattr(self.backend, "calls", None),
            "best_ever": self.best_ever,
            "stats": self.stats,
            "population": [_individual_to_json(i) for i in self.pop],
        }
        _dump_json(self.out_dir / "state.json", state)
        lines = ["generation,best_fitness,mean_fitness,best_ever_fitness,best_id"]
        for row in self.stats:
            lines.append("{generation},{best_fitness!r},{mean_fitness!r},"
                         "{best_ever_fitness!r},{best_id}".format(**row))
        (self.out_dir / "stats.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        best = self.best_ever["individual"]
        (self.out_dir / "best_program.dsl").write_text(best["program"], encoding="utf-8")
        _dump_json(self.out_dir / "best.json", self.best_ever)

    def restore(self) -> None:
        if self.out_dir is None or not (self.out_dir / "state.json").exists():
            raise ConfigError("nothing to resume: no state.json in out_dir")
        state = json.loads((self.out_dir / "state.json").read_text(encoding="utf-8"))
        self.gen_completed = state["gen_completed"]
        self.next_id = state["next_id"]
        self.best_ever = state["best_ever"]
        self.stats = state["stats"]
        self.pop = [_individual_from_json(d) for d in state["population"]]
        if state.get("backend_calls") is not None and hasattr(self.backend, "calls"):
            self.backend.calls = state["backend_calls"]

    # -- main loop ------------------------------------------------------------

    def run(self, resume: bool = False, stop_after: int | None = None):
        if resume:
            self.restore()
        else:
            self.initialize()
        params = self.config.aff_params()
        for t in range(self.gen_completed + 1, self.config.generations + 1):
            if stop_after is not None and t > stop_after:
                break
            for ind in self.pop:
                ind.refresh_fitness(t, params)
            offspring = self.variation(t)
            pool = self.pop + offspring
            self.pop = roulette_survivors(pool, self.config.popsize,
                                          self._rng("gen", t, "roulette"))
            self._note_generation(t)
        best = _individual_from_json(self.best_ever["individual"])
        best.fitness = self.best_ever["fitness"]
        return best, self.stats


def run_evolution(config: EvolutionConfig, resume: bool = False,
                  stop_after: int | None = None) -> tuple[Individual, list[dict]]:
    """Run (or resume) a full evolution; returns the best individual ever
    scored and the per-generation statistics."""
    return _Engine(config).run(resume=resume, stop_after=stop_after)


def _individual_to_json(ind: Individual) -> dict:
    return {
        "id": ind.id,
        "description": ind.description,
        "program": render(ind.program),
        "parent_ids": list(ind.parent_ids),
        "birth_generation": ind.birth_generation,
        "per_graph": [list(pair) for pair in ind.per_graph] if ind.per_graph else None,
        "fitness": ind.fitness,
    }


def _individual_from_json(data: dict) -> Individual:
    return Individual(
        id=data["id"],
        description=data["description"],
        program=parse(data["program"]),
        parent_ids=tuple(data["parent_ids"]),
        birth_generation=data["birth_generation"],
        per_graph=(tuple(tuple(p) for p in data["per_graph"])
                   if data["per_graph"] else None),
        fitness=data["fitness"],
    )


def _dump_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")


def identity_fitness_reference(training: list[Graph]) -> float:
    """Fitness an untouched training set would earn: 2 * sum of base scores."""
    return 2.0 * sum(robustness_r(g) for g in training)
