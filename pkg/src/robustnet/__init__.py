"""Network robustness optimization under targeted attack."""

from .graph import (
    BaParams,
    EdgeListError,
    Graph,
    GraphError,
    betweenness_centrality,
    degree_sequence,
    generate_ba,
    largest_component_size,
    read_edge_list,
    write_edge_list,
)
from .robustness import (
    AttackTrace,
    BudgetExhausted,
    BudgetedEvaluator,
    attack_trace,
    robustness_r,
)
from .fitness import (
    AffParams,
    StructuralDeviation,
    adaptive_fitness,
    degree_deviation,
    edge_deviation,
    penalty_weight,
    structural_deviation,
)
from .heuristics import (
    AnnealParams,
    OptimizerOutcome,
    baseline_hc,
    baseline_sa,
    baseline_sr,
    heuristic_v1,
    heuristic_v2,
    heuristic_v3,
    run_optimizer,
)
from .dsl import (
    DslParseError,
    HeuristicProgram,
    hc_reference_program,
    parse,
    render,
    validate,
)
from .interpreter import InterpreterTimeout, interpret
from .strategies import StrategyEntry, catalog, render_strategies, sample_strategies
from .evolve import EvolutionConfig, Individual, TrainingSpec, run_evolution
from .errors import ConfigError

__version__ = "0.1.0"
