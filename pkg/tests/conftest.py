import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import penlq


def all_admissible_specs() -> dict[str, penlq.PenaltySpec]:
    """The builtin penalties at their default parameters."""
    return {
        "l0": penlq.l0(),
        "bridge": penlq.bridge(0.5),
        "hard_threshold": penlq.hard_threshold(1.0),
        "scad": penlq.scad(1.0, 3.0),
        "mcp": penlq.mcp(1.0, 1.0),
        "clipped_l1": penlq.clipped_l1(1.0),
        "fraction": penlq.fraction(1.0),
        "log": penlq.log_penalty(1.0),
    }


@pytest.fixture(scope="session")
def specs():
    return all_admissible_specs()


@pytest.fixture(scope="session")
def mcp_spec():
    return penlq.mcp(1.0, 1.0)


@pytest.fixture(scope="session")
def mcp_analysis(mcp_spec):
    return penlq.analyze(mcp_spec)


@pytest.fixture(scope="session")
def demo_instance(mcp_spec):
    """The worked example: m=2, b=(1,2,3,1,2,3), mcp, q=2, lam=1."""
    tp = penlq.ThreePartitionInstance(m=2, b=(1, 2, 3, 1, 2, 3))
    return penlq.build(tp, mcp_spec, q=2.0, lam=1.0)


@pytest.fixture(scope="session")
def demo_certificate(demo_instance):
    return penlq.encode_certificate(demo_instance, [[1, 2, 3], [4, 5, 6]])
