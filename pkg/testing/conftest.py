"""
Shared fixtures: the four-contract market M1 and a few small hand-built
markets with known preference defects.
"""

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from contract_market.choice import GreedyMatroid, RankedTable  # noqa: E402
from contract_market.gen import GenParams, gen_market  # noqa: E402
from contract_market.model import Contract, Market, full_view  # noqa: E402

SWEEP_CONTRACT_LIMIT = 12


def greedy(*priority, quota=1, acceptable=None):
    return GreedyMatroid(quota, tuple(priority), frozenset(priority if acceptable is None else acceptable))


def table(*entries):
    return RankedTable(tuple(frozenset(entry) for entry in entries))


def build_market(workers, firms, contracts, choices):
    return Market(
        workers=frozenset(workers),
        firms=frozenset(firms),
        contracts={cid: Contract(cid, w, f) for cid, (w, f) in contracts.items()},
        choices=choices,
    )


def build_m1():
    # a=(w1,f1) b=(w1,f2) c=(w2,f1) d=(w2,f2)
    return build_market(
        ["w1", "w2"],
        ["f1", "f2"],
        {"a": ("w1", "f1"), "b": ("w1", "f2"), "c": ("w2", "f1"), "d": ("w2", "f2")},
        {
            "w1": greedy("a", "b"),
            "w2": greedy("d", "c"),
            "f1": greedy("c", "a"),
            "f2": greedy("b", "d"),
        },
    )



def sweep_market(seed, **params):
    """Greedy market for a sweep seed; shapes cycle through 1..4 workers by 1..4 firms"""
    n_workers, n_firms = 1 + seed % 4, 1 + seed // 4 % 4
    density = 0.9 if n_workers * n_firms <= SWEEP_CONTRACT_LIMIT else 0.6
    for attempt in range(64):
        options = dict(n_workers=n_workers, n_firms=n_firms, density=density, quota_range=(1, 3))
        options.update(params, seed=seed * 64 + attempt)
        market = gen_market(GenParams(**options))
        if len(market.contracts) <= SWEEP_CONTRACT_LIMIT:
            return market
    raise AssertionError(f"no market with at most {SWEEP_CONTRACT_LIMIT} contracts for seed {seed}")


@pytest.fixture(scope="session")
def m1():
    return build_m1()


@pytest.fixture(scope="session")
def m1_view(m1):
    return full_view(m1)


@pytest.fixture(scope="session")
def m1_path():
    return ROOT / "markets" / "m1.json"


@pytest.fixture(scope="session")
def complementary_market():
    """Worker w only wants x and y together"""
    return build_market(
        ["w"],
        ["g", "h"],
        {"x": ("w", "g"), "y": ("w", "h")},
        {"w": table({"x", "y"}, set()), "g": greedy("x"), "h": greedy("y")},
    )


@pytest.fixture(scope="session")
def non_lad_market():
    """Worker w takes z alone over the pair {x, y}"""
    return build_market(
        ["w"],
        ["g", "h", "k"],
        {"x": ("w", "g"), "y": ("w", "h"), "z": ("w", "k")},
        {
            "w": table({"z"}, {"x", "y"}, {"x"}, {"y"}, set()),
            "g": greedy("x"),
            "h": greedy("y"),
            "k": greedy("z"),
        },
    )


@pytest.fixture(scope="session")
def config_file(tmp_path_factory):
    directory = tmp_path_factory.mktemp("config")
    path = directory / "config.json"
    log_file = (directory / "engine.log").as_posix()
    path.write_text(
        '{"logging": {"level": "DEBUG", "file": "%s"}, "limits": {"verifier_cap": 12, "oracle_cap": 16}}' % log_file,
        encoding="utf-8",
    )
    return path
