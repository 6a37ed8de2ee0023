import math

import pytest
from hypothesis import given, strategies as st

from eas_jobshop.instance import (
    LA_BKS,
    InstanceParseError,
    JobShopInstance,
    UnknownInstanceError,
    bks_record,
    expand_names,
    load_instance,
    lookup_bks,
    parse_instance,
    search_space_log10,
)

TABLE1 = "3 3\n2 4 1 3 0 3\n1 1 2 2 0 4\n1 3 0 2 2 3\n"

# BKS column as published, LA01..LA40.
PUBLISHED_BKS = [
    666, 655, 597, 590, 593, 926, 890, 863, 951, 958,
    1222, 1039, 1150, 1292, 1207, 945, 784, 848, 842, 902,
    1046, 927, 1032, 935, 977, 1218, 1235, 1216, 1157, 1355,
    1784, 1850, 1719, 1721, 1888, 1268, 1397, 1196, 1233, 1222,
]
PUBLISHED_SIZES = [(10, 5)] * 5 + [(15, 5)] * 5 + [(20, 5)] * 5 + [(10, 10)] * 5 + \
    [(15, 10)] * 5 + [(20, 10)] * 5 + [(30, 10)] * 5 + [(15, 15)] * 5


def test_parse_table1(table1):
    inst = parse_instance(TABLE1, "t1")
    assert (inst.jobs, inst.machines) == (3, 3)
    first = inst.op(0, 0)
    assert (first.machine, first.duration) == (2, 4)
    assert inst.rows == table1.rows


def test_parse_minimal():
    inst = parse_instance("1 1\n0 5\n")
    assert inst.num_operations == 1
    assert inst.op(0, 0).duration == 5


def test_short_row_names_line():
    rows = "\n".join(["0 1 1 1 2 1 3 1 4 1"] * 3 + ["0 1 1 1 2 1 3 1"] + ["0 1 1 1 2 1 3 1 4 1"] * 6)
    with pytest.raises(InstanceParseError, match="line 5: job row 4") as err:
        parse_instance("10 5\n" + rows)
    assert err.value.line == 5


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("3\n0 1\n", "malformed header"),
        ("1 2\n0 1 2 1\n", "out of range"),
        ("1 2\n0 1 1 0\n", "duration 0"),
        ("1 2\n0 1 0 2\n", "repeated"),
        ("2 1\n0 1\n", "2 jobs but 1 rows"),
        ("1 1\n0 x\n", "non-integer"),
        ("# only a comment\n", "missing"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(InstanceParseError, match=fragment):
        parse_instance(text)


def test_comments_and_banner_skipped():
    text = " instance demo\n # comment\n +++\n1 1\n0 5\n"
    assert parse_instance(text).op(0, 0).duration == 5


@pytest.mark.parametrize("k", range(40))
def test_bks_table_matches_publication(k):
    name = f"LA{k + 1:02d}"
    assert lookup_bks(name) == PUBLISHED_BKS[k]
    assert bks_record(name).size == PUBLISHED_SIZES[k]


def test_bks_examples():
    assert lookup_bks("LA01") == 666
    assert lookup_bks("la29") == 1157
    with pytest.raises(UnknownInstanceError):
        lookup_bks("LA99")
    assert len(LA_BKS) == 40


@pytest.mark.parametrize("k", range(40))
def test_bundled_fixtures_match_sizes(k):
    inst = load_instance(f"LA{k + 1:02d}")
    assert (inst.jobs, inst.machines) == PUBLISHED_SIZES[k]
    # a valid instance's optimum can never beat its trivial lower bound
    assert inst.lower_bound() <= PUBLISHED_BKS[k]


def test_load_by_path_and_env(tmp_path, monkeypatch):
    (tmp_path / "mine.txt").write_text("1 1\n0 3\n")
    assert load_instance(tmp_path / "mine.txt").name == "MINE"
    monkeypatch.setenv("EAS_JOBSHOP_DATA", str(tmp_path))
    assert load_instance("mine").op(0, 0).duration == 3
    with pytest.raises(FileNotFoundError):
        load_instance("LA01")


def test_expand_names():
    assert expand_names("LA01..LA05") == ["LA01", "LA02", "LA03", "LA04", "LA05"]
    assert expand_names("LA09,LA10..LA11") == ["LA09", "LA10", "LA11"]


def _log10_factorial_sum(n):
    return sum(math.log10(k) for k in range(1, n + 1))


@pytest.mark.parametrize(
    "n, m, expected",
    [(10, 5, 32.79881516438397), (1, 1, 0.0), (30, 10, 324.2366007492572)],
)
def test_search_space_log10(n, m, expected):
    inst = JobShopInstance.from_matrix("x", [[(k, 1) for k in range(m)] for _ in range(n)])
    assert search_space_log10(inst) == pytest.approx(expected, abs=1e-9)
    assert search_space_log10(inst) == pytest.approx(m * _log10_factorial_sum(n), abs=1e-9)


def test_search_space_monotone():
    def value(n, m):
        return search_space_log10(JobShopInstance.from_matrix("x", [[(k, 1) for k in range(m)]] * n))

    for n in range(2, 12):
        for m in range(2, 8):
            assert value(n + 1, m) > value(n, m)
            assert value(n, m + 1) > value(n, m)


@st.composite
def instances(draw):
    n = draw(st.integers(1, 6))
    m = draw(st.integers(1, 6))
    rows = []
    for _ in range(n):
        perm = draw(st.permutations(list(range(m))))
        rows.append([(k, draw(st.integers(1, 99))) for k in perm])
    return JobShopInstance.from_matrix("h", rows)


@given(instances())
def test_text_round_trip(inst):
    again = parse_instance(inst.to_text(), inst.name)
    assert again == inst
