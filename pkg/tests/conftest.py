from functools import lru_cache
from pathlib import Path

import pytest
from hypothesis import settings

from adbundle import formats
from adbundle.adjoint import build_adjoint, build_extension

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

EXTENSIONS = ["s3", "q_i", "q_zeta5", "q_zeta7", "kummer4", "q_i_over_q_i"]

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@lru_cache(maxsize=None)
def field(name):
    return formats.load_field(CORPUS / "fields" / f"{name}.json")


@lru_cache(maxsize=None)
def extension(name):
    L, certs = field(name)
    return build_extension(L, certs)


@lru_cache(maxsize=None)
def adjoint(name):
    return build_adjoint(extension(name))


@pytest.fixture(params=EXTENSIONS)
def ext_name(request):
    return request.param


# acceptance lines are collected by test_acceptance and echoed at the end
ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE:
        terminalreporter.write_line(line)
