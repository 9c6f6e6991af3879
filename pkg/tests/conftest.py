import random
import sys
from fractions import Fraction
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from heptagons.heptagon import HeptagonError, Heptagon  # noqa: E402
from heptagons.projgeom import IdenticalLinesError  # noqa: E402

VANDERMONDE = [[1, t, t * t] for t in range(1, 8)]


@pytest.fixture
def vandermonde():
    return Heptagon(VANDERMONDE)


def random_heptagon(rng: random.Random, bound: int = 12) -> Heptagon:
    """Random rational heptagon in general position."""
    while True:
        lines = [
            [Fraction(rng.randint(-bound, bound), rng.randint(1, 4)) for _ in range(3)]
            for _ in range(7)
        ]
        if any(all(c == 0 for c in l) for l in lines):
            continue
        try:
            return Heptagon(lines)
        except (HeptagonError, IdenticalLinesError):
            continue


@pytest.fixture(scope="session")
def klein_run():
    """One full certification run shared by the Klein tests."""
    from heptagons import klein

    return klein.certify()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        terminalreporter.write_line(RESULTS[n])
