import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from georank.core import RttMatrix, SiteCatalog, ValidationError
from georank.rtt import RttSample, aggregate, load_matrix, parse_samples, store_matrix

HEADER = "src,dst,timestamp,rtt_ms\n"


def test_parse_sample_row():
    (s,) = parse_samples(io.StringIO(HEADER + "Ireland,Singapore,1555343280,179.9\n"))
    assert (s.src, s.dst, s.timestamp, s.rtt) == ("Ireland", "Singapore", 1555343280.0, 179.9)


def test_parse_empty_body_and_missing_timestamp():
    assert parse_samples(io.StringIO(HEADER)) == []
    (s,) = parse_samples(io.StringIO(HEADER + "a,b,,12.5\n"))
    assert s.timestamp is None


def test_parse_errors_carry_line_numbers():
    text = HEADER + "a,b,1,10\nIreland,Ireland,2,1.0\na,b,3,-1\na,b\n"
    with pytest.raises(ValidationError) as exc:
        parse_samples(io.StringIO(text))
    problems = exc.value.problems
    assert problems[0].startswith("line 3") and "Ireland" in problems[0]
    assert problems[1].startswith("line 4")
    assert problems[2].startswith("line 5")


def test_parse_rejects_bad_header():
    with pytest.raises(ValidationError):
        parse_samples(io.StringIO("from,to,rtt\n"))


def test_aggregate_pools_directions():
    cat = SiteCatalog(["a", "b"])
    m = aggregate([RttSample("a", "b", None, 100.0), RttSample("b", "a", None, 102.0)], cat)
    assert m.values[0, 1] == m.values[1, 0] == 101.0


def test_aggregate_single_sample():
    cat = SiteCatalog(["Ireland", "Singapore"])
    m = aggregate([RttSample("Ireland", "Singapore", None, 180.3)], cat)
    assert m.values[0, 1] == 180.3


def test_aggregate_reports_missing_pairs():
    cat = SiteCatalog(["a", "b", "c"])
    with pytest.raises(ValidationError) as exc:
        aggregate([RttSample("a", "b", None, 5.0)], cat)
    text = str(exc.value)
    assert "(a,c)" in text and "(b,c)" in text and "(a,b)" not in text


def test_aggregate_trimmed_mean():
    cat = SiteCatalog(["a", "b"])
    samples = [RttSample("a", "b", None, float(v)) for v in range(1, 11)]
    assert aggregate(samples, cat).values[0, 1] == 5.5
    samples.append(RttSample("b", "a", None, 1000.0))
    samples.append(RttSample("b", "a", None, 0.001))
    # 12 samples, 10% trim drops one from each end: back to 1..10
    assert aggregate(samples, cat, trim=0.1).values[0, 1] == 5.5


@settings(max_examples=50)
@given(st.lists(st.floats(1.0, 400.0), min_size=6, max_size=40), st.randoms(use_true_random=False))
def test_aggregate_order_invariant(values, rnd):
    cat = SiteCatalog(["a", "b", "c"])
    pairs = [("a", "b"), ("b", "a"), ("a", "c"), ("c", "b"), ("b", "c"), ("c", "a")]
    samples = [RttSample(*pairs[i % 6], None, v) for i, v in enumerate(values)]
    shuffled = samples[:]
    rnd.shuffle(shuffled)
    m1, m2 = aggregate(samples, cat), aggregate(shuffled, cat)
    assert m1 == m2
    v = m1.values
    assert np.array_equal(v, v.T) and np.all(np.diag(v) == 0) and np.all(v + np.eye(3) > 0)


def test_matrix_round_trip_bit_exact(rng):
    size = 15
    upper = np.triu(rng.uniform(1, 300, (size, size)), 1)
    values = upper + upper.T
    cat = SiteCatalog(f"r{i}" for i in range(size))
    m = RttMatrix(values)
    cat2, m2 = load_matrix(io.StringIO(store_matrix(cat, m)))
    assert cat2 == cat
    assert np.array_equal(m2.values, values)


def test_load_two_site_matrix():
    cat, m = load_matrix(io.StringIO("site,a,b\na,0,100\nb,100,0\n"))
    assert cat.names == ["a", "b"]
    assert m.values.tolist() == [[0, 100], [100, 0]]


@pytest.mark.parametrize(
    "text",
    [
        "site,a,b\na,0,100\nb,90,0\n",
        "site,a,b\na,0,100\n",
        "site,a,a\na,0,100\na,100,0\n",
        "site,a,b\na,0,100\nb,100\n",
        "name,a,b\na,0,100\nb,100,0\n",
        "site,a,b\na,0,x\nb,100,0\n",
    ],
)
def test_load_matrix_errors(text):
    with pytest.raises(ValidationError):
        load_matrix(io.StringIO(text))


def test_load_matrix_tolerates_rounding_asymmetry():
    _, m = load_matrix(io.StringIO("site,a,b\na,0,100\nb,100.0000000001,0\n"))
    assert m.values[0, 1] == m.values[1, 0]
