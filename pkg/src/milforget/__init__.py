"""Multi-task meta-interpretive learning with signature forgetting."""

from .logic import (
    Atom,
    Budget,
    BudgetExhausted,
    Clause,
    Const,
    Int,
    LogicError,
    PrimitiveRegistry,
    ProofStatus,
    Program,
    Struct,
    Symbol,
    SymbolKind,
    Var,
    apply,
    prove,
    solve,
    unify,
)
from .metarules import Metarule, MetaruleSet, Metasubstitution, project, standard_set
from .engine import LearnResult, LearnStatus, LearnTask, SearchConfig, meta_prove, metagol
from .forgetting import (
    CostParams,
    ForgetStrategy,
    Signature,
    expected_costs,
    forget_statistical,
    forget_syntactical,
    pr_relevant,
    unfold,
)
from .multitask import DepthReport, MultiTaskConfig, TaskCorpus, forgetgol, learn_depth
from .domains import LEGO, ROBOT, apply_primitive, gen_tasks, solvable_oracle
from .bounds import (
    BoundParams,
    enumerate_hypotheses,
    hspace_size,
    minimal_signature,
    reduction_factor,
    sample_complexity,
    sample_reduction,
)
from .harness import (
    ExperimentConfig,
    ResultRow,
    emit_csv,
    parse_corpus,
    run_corpus,
    run_experiment,
    write_corpus,
)

__version__ = "0.1.0"
