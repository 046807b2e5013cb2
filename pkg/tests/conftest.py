from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def shooter():
    from eight4body.porbits import Shooter

    return Shooter()


@pytest.fixture(scope="session")
def table_report(shooter):
    from eight4body.porbits import reproduce_table1

    return reproduce_table1(shooter=shooter, with_closure=True)
