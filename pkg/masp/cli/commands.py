"""
Command-line front end: argument parsing, command configuration and the
subcommand handlers.

Handlers return an exit code and the text destined for stdout; logging and
diagnostics go to stderr. Exit codes are 0 for a positive outcome (answer
sets found, equivalent, coherent, verified), 1 for a negative one and 2 for
errors.
"""

import argparse
import json
import random
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from ..config import get_config
from ..exceptions import ConfigurationError, OccurrenceError
from ..models import (
    DefModule,
    Domain,
    Member,
    ModularProgram,
    OutputFormat,
    PredicateSymbol,
    SolveOptions,
    SourceKind,
    SourceUnit,
    Strategy,
)
from ..services.analysis import alpha_normalize, dependency_graph, flatten, is_coherent, is_tight
from ..services.equivalence import bounded_domain, context_from_program, replace, strong_equiv_bounded
from ..services.evaluator import answer_sets, join
from ..services.formulas import defmod_label, defmods, find_member
from ..services.generators import DEFAULT_CONSTANTS, random_denial_module, random_program
from ..services.model_checker import ModelChecker
from ..services.parser import parse_instance, parse_program
from ..services.printer import (
    answers_json,
    format_answer_sets,
    format_coherence,
    format_dot,
    format_formula,
    format_reduction,
    format_verdict,
    print_program,
    verdict_json,
)
from ..services.reductions import reductions_for, verify_reduction
from ..services.sm_transform import phi
from ..utils.logging import get_logger

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_NEGATIVE = 1


class Subcommand(str, Enum):
    SOLVE = "solve"
    ORACLE_SOLVE = "oracle-solve"
    SMF = "smf"
    FLATTEN = "flatten"
    CHECK = "check"
    DEPGRAPH = "depgraph"
    REDUCE = "reduce"
    EQUIV = "equiv"
    REPLACE = "replace"


_INPUT_COUNTS = {Subcommand.EQUIV: 2, Subcommand.REPLACE: 3}
_RANDOM_RUNS = {Subcommand.FLATTEN, Subcommand.REDUCE}


class CommandConfig(BaseModel):
    """Validated settings of one command invocation."""

    subcommand: Subcommand
    inputs: List[str] = Field(default_factory=list, description="Program files")
    instance: Optional[str] = Field(None, description="Instance file of ground facts")
    context: Optional[str] = Field(None, description="Context file read as first-order sentences")
    domain_bound: Optional[Union[int, List[str]]] = Field(
        None, description="Fresh constant count or explicit constant list"
    )
    show: Optional[List[PredicateSymbol]] = Field(None, description="Public set replacing #show")
    format: OutputFormat = OutputFormat.TEXT
    strategy: Strategy = Strategy.SPLITTING
    seed: Optional[int] = Field(None, description="Seed for randomized runs")
    random: Optional[int] = Field(None, ge=1, description="Number of generated inputs")
    check_models: bool = False
    jobs: int = Field(1, ge=1)
    module: Optional[str] = Field(None, description="Def-module label or module name")
    max_branch: int = Field(1_000_000, ge=1)
    naive_limit: int = Field(24, ge=1)
    chunk_size: int = Field(256, ge=1)

    @field_validator("domain_bound", mode="before")
    @classmethod
    def _parse_bound(cls, value):
        if value is None or not isinstance(value, str):
            return value
        text = value.strip()
        if text.isdigit():
            return int(text)
        constants = [c.strip() for c in text.split(",") if c.strip()]
        if not constants:
            raise ValueError("empty domain bound")
        return constants

    @field_validator("show", mode="before")
    @classmethod
    def _parse_show(cls, value):
        if value is None or not isinstance(value, str):
            return value
        symbols = []
        for spec in filter(None, (s.strip() for s in value.split(","))):
            name, _, arity = spec.partition("/")
            if not arity.isdigit():
                raise ValueError(f"expected name/arity, got {spec!r}")
            symbols.append(PredicateSymbol(name=name, arity=int(arity)))
        return symbols

    @model_validator(mode="after")
    def _check_inputs(self) -> "CommandConfig":
        wanted = _INPUT_COUNTS.get(self.subcommand, 1)
        if self.random is not None and self.subcommand in _RANDOM_RUNS:
            wanted = 0
        if len(self.inputs) != wanted:
            raise ValueError(f"{self.subcommand.value} expects {wanted} input file(s), got {len(self.inputs)}")
        if self.subcommand == Subcommand.ORACLE_SOLVE:
            self.strategy = Strategy.NAIVE
        return self

    def solve_options(self, domain: Optional[Domain] = None) -> SolveOptions:
        return SolveOptions(
            strategy=self.strategy,
            domain_override=domain,
            max_branch=self.max_branch,
            show_override=frozenset(self.show) if self.show is not None else None,
            jobs=self.jobs,
            naive_limit=self.naive_limit,
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="masp", description="Modular answer set programming toolkit")
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging (repeatable)")
    commands = parser.add_subparsers(dest="subcommand", required=True)

    helps = {
        Subcommand.SOLVE: "enumerate answer sets",
        Subcommand.ORACLE_SOLVE: "enumerate answer sets with the naive strategy",
        Subcommand.SMF: "print the second-order formula of a program",
        Subcommand.FLATTEN: "print the flattened program",
        Subcommand.CHECK: "report coherence and tightness",
        Subcommand.DEPGRAPH: "print the dependency graph in DOT",
        Subcommand.REDUCE: "print the reductions of each def-module",
        Subcommand.EQUIV: "check strong equivalence up to a domain bound",
        Subcommand.REPLACE: "replace a module inside a host program",
    }
    for command, text in helps.items():
        sub = commands.add_parser(command.value, help=text)
        sub.add_argument("inputs", nargs="*", metavar="FILE")
        sub.add_argument("--instance", help="instance file of ground facts")
        sub.add_argument("--context", help="context file, read as first-order sentences")
        sub.add_argument("--domain-bound", dest="domain_bound",
                         help="number of fresh constants, or a comma-separated constant list")
        sub.add_argument("--show", help="comma-separated name/arity list replacing #show")
        sub.add_argument("--format", choices=[f.value for f in OutputFormat])
        strategy = sub.add_mutually_exclusive_group()
        strategy.add_argument("--strategy", choices=[s.value for s in Strategy])
        strategy.add_argument("--naive", action="store_const", const=Strategy.NAIVE.value, dest="strategy",
                              help="same as --strategy naive")
        sub.add_argument("--seed", type=int, help="seed for randomized runs")
        sub.add_argument("--random", type=int, metavar="N", help="run on N generated inputs")
        sub.add_argument("--check-models", dest="check_models", action="store_true",
                         help="verify model preservation at the domain bound")
        sub.add_argument("--jobs", type=int, help="worker threads (default: MASP_JOBS or 1)")
        sub.add_argument("--module", help="def-module label or module name to work on")
    return parser


def command_config(args: argparse.Namespace) -> CommandConfig:
    """
    Merge parsed arguments over the loaded configuration.

    Raises:
        ConfigurationError: if the combination of arguments is invalid
    """
    config = get_config()
    values = {
        "subcommand": args.subcommand,
        "inputs": args.inputs,
        "instance": args.instance,
        "context": args.context,
        "domain_bound": args.domain_bound,
        "show": args.show,
        "format": args.format or config.output.format,
        "strategy": args.strategy or config.solver.strategy,
        "seed": args.seed,
        "random": args.random,
        "check_models": args.check_models,
        "jobs": args.jobs or config.solver.jobs,
        "module": args.module,
        "max_branch": config.solver.max_branch,
        "naive_limit": config.solver.naive_limit,
        "chunk_size": config.equivalence.chunk_size,
    }
    try:
        return CommandConfig(**values)
    except ValidationError as e:
        details = "; ".join(error["msg"] for error in e.errors())
        raise ConfigurationError(f"invalid arguments: {details}") from e


# ---------------------------------------------------------------------------
# loading

def load_program(path: str) -> ModularProgram:
    return parse_program(SourceUnit.from_file(path))


def load_instance(path: Optional[str]) -> Optional[DefModule]:
    if path is None:
        return None
    return parse_instance(SourceUnit.from_file(path, SourceKind.INSTANCE))


def _joined(cfg: CommandConfig) -> ModularProgram:
    program = load_program(cfg.inputs[0])
    instance = load_instance(cfg.instance)
    if instance is None and cfg.show is None:
        return program
    return join(program, instance, frozenset(cfg.show) if cfg.show is not None else None)


def _select(program: ModularProgram, name: Optional[str]) -> Member:
    if name is None:
        return program
    member = find_member(program, name)
    if member is None:
        raise OccurrenceError(f"no def-module or module named {name}")
    return member


def _domain(cfg: CommandConfig, nodes: List, default: Optional[int] = None) -> Domain:
    """Domain from --domain-bound; without one, the constants of nodes plus default fresh constants."""
    if cfg.domain_bound is not None:
        return bounded_domain(nodes, cfg.domain_bound)
    return bounded_domain(nodes, default if default is not None else get_config().equivalence.default_bound)


def _solve_domain(cfg: CommandConfig, program: ModularProgram) -> Optional[Domain]:
    if cfg.domain_bound is None:
        return None
    if isinstance(cfg.domain_bound, int):
        return bounded_domain([program], cfg.domain_bound)
    return Domain.of(cfg.domain_bound)


def _seed(cfg: CommandConfig) -> int:
    return cfg.seed if cfg.seed is not None else random.randrange(2 ** 32)


# ---------------------------------------------------------------------------
# handlers

Result = Tuple[int, str]


def cmd_solve(cfg: CommandConfig) -> Result:
    """Answer sets in text or JSON; exit 1 when there are none."""
    program = load_program(cfg.inputs[0])
    instance = load_instance(cfg.instance)
    options = cfg.solve_options(_solve_domain(cfg, join(program, instance)))
    answers = answer_sets(program, instance, options)
    logger.info("solve finished", answers=len(answers), strategy=cfg.strategy.value)
    if cfg.format == OutputFormat.JSON:
        text = answers_json(answers)
    else:
        text = format_answer_sets(answers) if answers else "UNSATISFIABLE"
    return (EXIT_OK if answers else EXIT_NEGATIVE), text


def cmd_smf(cfg: CommandConfig) -> Result:
    program = alpha_normalize(_joined(cfg))
    formula = format_formula(phi(_select(program, cfg.module)))
    if cfg.format == OutputFormat.JSON:
        return EXIT_OK, json.dumps({"formula": formula}, separators=(",", ":"))
    return EXIT_OK, formula


def _models_agree(program: ModularProgram, domain: Domain, max_branch: int) -> bool:
    checker = ModelChecker(domain, max_branch)
    normalized = alpha_normalize(program)
    return checker.models(program) == checker.models(flatten(normalized))


def cmd_flatten(cfg: CommandConfig) -> Result:
    """
    The flattened program, or a model comparison with --check-models or --random.

    The random run generates programs over two constants and compares the
    models of each with those of its flattening.
    """
    if cfg.random is not None:
        seed = _seed(cfg)
        rng = random.Random(seed)
        domain = Domain.of(DEFAULT_CONSTANTS)
        failures = 0
        for run in range(cfg.random):
            program = random_program(rng)
            if not _models_agree(program, domain, cfg.max_branch):
                failures += 1
                logger.warning("flattening changed the models", run=run, program=print_program(program))
        lines = [f"seed: {seed}", f"{cfg.random - failures}/{cfg.random} programs keep their models"]
        return (EXIT_OK if not failures else EXIT_NEGATIVE), "\n".join(lines)

    program = _joined(cfg)
    flat = flatten(alpha_normalize(program))
    if not cfg.check_models:
        return EXIT_OK, print_program(flat).rstrip("\n")
    domain = _domain(cfg, [program], default=0)
    agree = _models_agree(program, domain, cfg.max_branch)
    verdict = f"models {'coincide' if agree else 'differ'} over {domain}"
    return (EXIT_OK if agree else EXIT_NEGATIVE), verdict


def cmd_check(cfg: CommandConfig) -> Result:
    """Coherence report plus the tightness of every def-module with intensional symbols."""
    program = _joined(cfg)
    target = _select(program, cfg.module)
    scope = [target] if isinstance(target, DefModule) else defmods(target)
    report = is_coherent(program)
    tight, non_tight = [], []
    for module in scope:
        if not module.intensional:
            continue
        (tight if is_tight(module) else non_tight).append(defmod_label(module))
    if cfg.format == OutputFormat.JSON:
        payload = report.model_dump(mode="json")
        payload.update({"tight": tight, "non_tight": non_tight})
        text = json.dumps(payload, separators=(",", ":"), sort_keys=True)
    else:
        text = format_coherence(report, tight, non_tight)
    return (EXIT_OK if report.coherent else EXIT_NEGATIVE), text


def cmd_depgraph(cfg: CommandConfig) -> Result:
    graph = dependency_graph(_joined(cfg), include_extensional=True)
    if cfg.format == OutputFormat.JSON:
        payload = {
            "nodes": sorted(str(p) for p in graph.nodes),
            "extensional": sorted(str(p) for p in graph.extensional),
            "edges": sorted([str(h), str(b)] for h, b in graph.edges),
        }
        return EXIT_OK, json.dumps(payload, separators=(",", ":"))
    return EXIT_OK, format_dot(graph)


def _verify_module(module: DefModule, domain: Domain, max_branch: int) -> List[Tuple[str, bool]]:
    outcomes = []
    for result in reductions_for(module):
        if result.applicable:
            outcomes.append((f"{result.module} {result.kind.value}",
                             verify_reduction(module, result, domain, max_branch)))
    return outcomes


def cmd_reduce(cfg: CommandConfig) -> Result:
    """Reductions of every def-module; with --check-models or --random, their verification."""
    if cfg.random is not None:
        seed = _seed(cfg)
        rng = random.Random(seed)
        domain = Domain.of(DEFAULT_CONSTANTS)
        failures = 0
        for run in range(cfg.random):
            module = random_denial_module(rng)
            for label, ok in _verify_module(module, domain, cfg.max_branch):
                if not ok:
                    failures += 1
                    logger.warning("reduction changed the models", run=run, reduction=label)
        lines = [f"seed: {seed}", f"{cfg.random} modules checked, {failures} failures"]
        return (EXIT_OK if not failures else EXIT_NEGATIVE), "\n".join(lines)

    program = _joined(cfg)
    target = _select(program, cfg.module)
    modules = [target] if isinstance(target, DefModule) else defmods(target)

    if cfg.check_models:
        domain = _domain(cfg, [program], default=0)
        lines, failures = [], 0
        for module in modules:
            for label, ok in _verify_module(module, domain, cfg.max_branch):
                failures += not ok
                lines.append(f"{label}: {'verified' if ok else 'FAILED'} over {domain}")
        return (EXIT_OK if not failures else EXIT_NEGATIVE), "\n".join(lines)

    results = [r for module in modules for r in reductions_for(module)]
    if cfg.format == OutputFormat.JSON:
        payload = [
            {
                "module": r.module,
                "kind": r.kind.value,
                "applicable": r.applicable,
                "residual": format_formula(r.residual) if r.residual is not None else None,
                "reason": r.reason,
            }
            for r in results
        ]
        return EXIT_OK, json.dumps(payload, separators=(",", ":"))
    return EXIT_OK, "\n".join(format_reduction(r) for r in results)


def cmd_equiv(cfg: CommandConfig) -> Result:
    """Strong equivalence of two programs relative to the context, up to the domain bound."""
    left = _select(load_program(cfg.inputs[0]), cfg.module)
    right = _select(load_program(cfg.inputs[1]), cfg.module)
    for side in (left, right):
        if not isinstance(side, ModularProgram):
            raise ConfigurationError("equiv compares programs or modules, not single def-modules")
    gamma = context_from_program(load_program(cfg.context)) if cfg.context else None
    domain = _domain(cfg, [left, right] + ([gamma] if gamma else []))
    verdict = strong_equiv_bounded(left, right, gamma, domain, cfg.max_branch, cfg.jobs, cfg.chunk_size)
    logger.info("equivalence check finished", status=verdict.status.value, checked=verdict.checked)
    if cfg.format == OutputFormat.JSON:
        text = verdict_json(verdict)
    else:
        text = format_verdict(verdict)
    return (EXIT_OK if verdict.equivalent else EXIT_NEGATIVE), text


def _single_member(program: ModularProgram) -> Member:
    return program.members[0] if len(program.members) == 1 else program


def cmd_replace(cfg: CommandConfig) -> Result:
    """HOST[OLD/NEW]; files with a single top-level member stand for that member."""
    host = load_program(cfg.inputs[0])
    old = _single_member(load_program(cfg.inputs[1]))
    new = _single_member(load_program(cfg.inputs[2]))
    return EXIT_OK, print_program(replace(host, old, new)).rstrip("\n")


HANDLERS: Dict[Subcommand, Callable[[CommandConfig], Result]] = {
    Subcommand.SOLVE: cmd_solve,
    Subcommand.ORACLE_SOLVE: cmd_solve,
    Subcommand.SMF: cmd_smf,
    Subcommand.FLATTEN: cmd_flatten,
    Subcommand.CHECK: cmd_check,
    Subcommand.DEPGRAPH: cmd_depgraph,
    Subcommand.REDUCE: cmd_reduce,
    Subcommand.EQUIV: cmd_equiv,
    Subcommand.REPLACE: cmd_replace,
}


def run(cfg: CommandConfig) -> Result:
    """Dispatch to the subcommand's handler."""
    logger.debug("running command", subcommand=cfg.subcommand.value, inputs=cfg.inputs)
    return HANDLERS[cfg.subcommand](cfg)
