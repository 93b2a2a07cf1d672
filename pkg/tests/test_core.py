import numpy as np
import pytest
from hypothesis import given, strategies as st

from georank.core import (
    CFT,
    ClientSet,
    Deployment,
    ProtocolParams,
    RttMatrix,
    SiteCatalog,
    UsageError,
    ValidationError,
    link_delay,
    validate_inputs,
)

from conftest import catalog, random_matrix, uniform_matrix


def test_link_delay_halves_rtt():
    m = RttMatrix([[0, 180.3], [180.3, 0]])
    assert link_delay(m, 0, 1) == pytest.approx(90.15, rel=1e-15)
    assert link_delay(m, 1, 1) == 0
    assert link_delay(RttMatrix([[0, 1.0], [1.0, 0]]), 0, 1) == 0.5


def test_link_delay_rejects_bad_index():
    m = uniform_matrix(3, 10)
    with pytest.raises(UsageError):
        link_delay(m, 0, 3)
    with pytest.raises(UsageError):
        link_delay(m, -1, 0)


def test_link_delay_symmetric_zero_diagonal(rng):
    m = random_matrix(rng, 7)
    for a in range(7):
        assert link_delay(m, a, a) == 0
        for b in range(7):
            assert link_delay(m, a, b) == link_delay(m, b, a)


def test_matrix_construction_rejects_invalid():
    with pytest.raises(ValidationError):
        RttMatrix([[0, 100], [90, 0]])
    with pytest.raises(ValidationError):
        RttMatrix([[1, 100], [100, 0]])
    with pytest.raises(ValidationError):
        RttMatrix([[0, -5], [-5, 0]])
    with pytest.raises(ValidationError):
        RttMatrix([[0, np.inf], [np.inf, 0]])
    m = RttMatrix([[0, 100], [100, 0]])
    with pytest.raises(ValueError):
        m.values[0, 1] = 3


def test_catalog_invariants():
    cat = SiteCatalog(["Ireland", "Sydney"])
    assert [s.id for s in cat] == [0, 1]
    assert cat.id_of("Sydney") == 1
    with pytest.raises(ValidationError):
        SiteCatalog(["a", "a"])
    with pytest.raises(ValidationError):
        SiteCatalog(["a", ""])
    with pytest.raises(UsageError):
        cat.id_of("Tokyo")


def test_validate_inputs_fifteen_sites_ok(rng):
    errors = validate_inputs(catalog(15), random_matrix(rng, 15), ClientSet.of(3), ProtocolParams(n=4, f=1))
    assert errors == []


def test_validate_inputs_reports_everything():
    values = np.full((4, 4), 50.0) - np.eye(4) * 50
    values[1, 2] = 70.0
    m = RttMatrix(values, checked=False)
    errors = validate_inputs(catalog(4), m, ClientSet(((9, 1), (0, 0))), ProtocolParams(n=4, f=2))
    text = "\n".join(errors)
    assert "(1,2)" in text and "(2,1)" in text
    assert "n >= 3f+1" in text
    assert "client site 9" in text
    assert "client count at site 0" in text


def test_validate_inputs_size_checks(rng):
    errors = validate_inputs(catalog(5), random_matrix(rng, 4), ClientSet.of(0), ProtocolParams(n=7, f=2))
    assert any("catalog has 5" in e for e in errors)
    assert any("exceeds the 5" in e for e in errors)


def test_protocol_params():
    assert ProtocolParams(n=4).quorum == 3
    assert ProtocolParams(n=7, f=2).quorum == 4
    assert ProtocolParams(n=10, f=3).quorum == 6
    assert ProtocolParams(n=4, f=2).problems()
    assert not ProtocolParams(n=3, f=1, fault_model=CFT).problems()
    assert ProtocolParams(n=3, f=1).problems()
    assert ProtocolParams(n=4, f=0).problems()


@given(st.permutations([3, 8, 1, 12]), st.integers(0, 20).filter(lambda x: x not in (3, 8, 1, 12)))
def test_deployment_canonical(perm, leader):
    a = Deployment.leader_based(leader, perm)
    b = Deployment.leader_based(leader, [1, 3, 8, 12])
    assert a == b
    assert repr(a) == repr(b)
    assert a.replicas == (leader, 1, 3, 8, 12)


def test_deployment_rejects_duplicates():
    with pytest.raises(UsageError):
        Deployment.leader_based(1, [1, 2, 3])
    with pytest.raises(UsageError):
        Deployment(0, (3, 2, 1))


def test_deployment_key():
    cat = SiteCatalog(["Ireland", "Sydney", "NVirginia", "Tokyo"])
    d = Deployment.leader_based(3, [2, 0, 1])
    assert d.key(cat) == "Tokyo|Ireland,Sydney,NVirginia"
    assert Deployment.leaderless([2, 0]).key(cat) == "Ireland,NVirginia"


def test_client_set_parse():
    cat = SiteCatalog(["Ireland", "Sydney", "NVirginia"])
    cs = ClientSet.parse("Ireland:10,Sydney:3,NVirginia:5", cat)
    assert cs.entries == ((0, 10), (1, 3), (2, 5))
    assert cs.total == 18
    assert ClientSet.parse("Sydney", cat).entries == ((1, 1),)
    assert ClientSet.parse("Ireland:1,Ireland:2", cat).problems()
