import random

import pytest
from hypothesis import settings

from hopb.generate import Gen, GenConfig

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


def make_gen(seed: int, p: int = 5, max_dim: int = 3, span: int = 3) -> Gen:
    return Gen(GenConfig(seed=seed, p=p, max_dim=max_dim, span=span), random.Random(seed))


@pytest.fixture
def gen():
    return make_gen(1234)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
