"""
共享夹具：工作示例里的移位与截面
"""
from pathlib import Path

import pytest

from flowcalc.core.cross_section import CrossSection
from flowcalc.core.fixtures import bipartite, full_shift, golden_mean, paired_golden, paired_section

DATA = Path(__file__).resolve().parents[1] / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA


@pytest.fixture
def full2():
    return full_shift()


@pytest.fixture
def golden():
    return golden_mean()


@pytest.fixture
def paired():
    return paired_golden()


@pytest.fixture
def two_cycle():
    return bipartite()


@pytest.fixture
def paired_anchors(paired):
    return paired_section(paired)


@pytest.fixture
def golden_pair(golden):
    """C1 = {a', b} 高度 0，C2 = {a, b} 高度 1/2"""
    return CrossSection.of_symbols(golden, ["a'", "b"]), CrossSection.of_symbols(golden, ["a", "b"], "1/2")
