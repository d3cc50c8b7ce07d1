"""
Test configuration and fixtures.
"""

from pathlib import Path

import pytest

from masp.config import Config, set_config
from masp.models import DefModule, Domain, ModularProgram, SourceKind, SourceUnit
from masp.services.equivalence import context_from_program
from masp.services.formulas import find_member
from masp.services.parser import parse_instance, parse_program

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def corpus_source(name: str, kind: SourceKind = SourceKind.PROGRAM) -> SourceUnit:
    return SourceUnit.from_file(str(CORPUS / name), kind)


@pytest.fixture(scope="session")
def test_config() -> Config:
    """Create test configuration."""
    config_data = {
        "solver": {
            "strategy": "splitting",
            "max_branch": 1_000_000,
            "jobs": 1,
            "naive_limit": 24,
        },
        "equivalence": {
            "default_bound": 0,
            "chunk_size": 64,
        },
        "output": {
            "format": "text",
        },
        "logging": {
            "level": "DEBUG",
            "format": "console",
        },
    }
    config = Config(**config_data)
    set_config(config)
    return config


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return CORPUS


@pytest.fixture(scope="session")
def hc_program() -> ModularProgram:
    return parse_program(corpus_source("hc.masp"))


@pytest.fixture(scope="session")
def hc_alt_program() -> ModularProgram:
    return parse_program(corpus_source("hc_alt.masp"))


@pytest.fixture(scope="session")
def hc_sub_program() -> ModularProgram:
    return parse_program(corpus_source("hc_sub.masp"))


@pytest.fixture(scope="session")
def hc_sub_alt_program() -> ModularProgram:
    return parse_program(corpus_source("hc_sub_alt.masp"))


@pytest.fixture(scope="session")
def g1_instance() -> DefModule:
    return parse_instance(corpus_source("g1.facts", SourceKind.INSTANCE))


@pytest.fixture(scope="session")
def vertex_a_context():
    return context_from_program(parse_program(corpus_source("ctx_vertex_a.masp")))


@pytest.fixture(scope="session")
def hc_modules(hc_program: ModularProgram) -> dict:
    """The labelled def-modules and named modules of hc.masp."""
    names = ["M1", "M2", "M3", "p1", "sg", "hc", "cn"]
    return {name: find_member(hc_program, name) for name in names}


@pytest.fixture
def abc() -> Domain:
    return Domain.of(["a", "b", "c"])


@pytest.fixture
def ab() -> Domain:
    return Domain.of(["a", "b"])
