import pytest

from conftest import build_market, greedy

from contract_market.errors import SizeLimitError
from contract_market.model import EMPTY, Allocation, full_view
from contract_market.oracle import (
    certify,
    enumerate_view,
    find_blocking_set,
    is_quasi_stable_def,
    is_stable_def,
    maximal_elements,
    minimal_elements,
    minimal_stable_above,
)


def A(*ids):
    return Allocation.of(ids)


@pytest.fixture(scope="module")
def m1_enumeration(m1_view):
    return enumerate_view(m1_view)


def test_enumerate_m1(m1_enumeration):
    assert m1_enumeration.stable == [A("a", "d"), A("b", "c")]
    assert m1_enumeration.quasi_stable == [EMPTY, A("b"), A("c"), A("a", "d"), A("b", "c")]
    assert m1_enumeration.ir == [EMPTY, A("a"), A("b"), A("c"), A("d"), A("a", "d"), A("b", "c")]
    assert m1_enumeration.counts == {"allocations": 16, "individually_rational": 7, "quasi_stable": 5, "stable": 2}


def test_enumeration_classes_nest(m1_enumeration):
    assert set(m1_enumeration.stable) <= set(m1_enumeration.quasi_stable) <= set(m1_enumeration.ir)
    assert EMPTY in m1_enumeration.quasi_stable


def test_market_without_contracts():
    market = build_market(["w"], ["f"], {}, {"w": greedy(), "f": greedy()})
    result = enumerate_view(full_view(market))
    assert result.all_allocations == result.ir == result.quasi_stable == result.stable == [EMPTY]


def test_definitional_predicates(m1_view):
    assert find_blocking_set(m1_view, A("c")) == {"b"}
    assert find_blocking_set(m1_view, A("a", "d")) is None
    assert is_stable_def(m1_view, A("b", "c"))
    assert not is_stable_def(m1_view, A("c"))
    assert is_quasi_stable_def(m1_view, A("c"))
    assert not is_quasi_stable_def(m1_view, A("a"))


def test_extremal_elements(m1_view, m1_enumeration):
    assert maximal_elements(m1_view, m1_enumeration.quasi_stable, "w") == [A("a", "d")]
    assert maximal_elements(m1_view, m1_enumeration.stable, "f") == [A("b", "c")]
    assert minimal_elements(m1_view, m1_enumeration.stable, "w") == [A("b", "c")]
    assert maximal_elements(m1_view, [A("c")], "w") == [A("c")]


def test_minimal_stable_above(m1_enumeration):
    assert minimal_stable_above(m1_enumeration, A("c")) == A("b", "c")
    assert minimal_stable_above(m1_enumeration, EMPTY) == A("b", "c")
    assert minimal_stable_above(m1_enumeration, A("a", "d")) == A("a", "d")


def test_oracle_cap(m1_view):
    with pytest.raises(SizeLimitError):
        enumerate_view(m1_view, cap=3)


def test_certify_m1(m1_view):
    report = certify(m1_view)
    assert report.passed
    assert [check.name for check in report.checks] == [
        "predicate-agreement",
        "tarski-fixed-points",
        "lattice-laws",
        "maximal-elements-stable",
        "pairwise-setwise",
    ]
    assert report.non_substitutable_agents == []
    assert report.check("lattice-laws").checked == 15


def test_certify_names_non_substitutable_agents(complementary_market):
    report = certify(full_view(complementary_market))
    assert report.non_substitutable_agents == ["w"]
    assert report.to_dict()["non_substitutable_agents"] == ["w"]
