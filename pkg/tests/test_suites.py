import pytest

from dedesum.characters import CharacterPair, parse_label
from dedesum.dedekind import DedekindContext
from dedesum.suites import GLOBAL_SUITES, PAIR_SUITES, run_global_suite, run_pair_suite, substream

PAIRS = [("3.2", "7.6"), ("5.4", "8.5"), ("7.6", "11.10"), ("5.4", "7.2"), ("5.2", "5.3"), ("9.2", "7.3"),
         ("7.6", "7.6")]


@pytest.mark.parametrize("labels", PAIRS, ids=lambda p: "x".join(p))
@pytest.mark.parametrize("name", sorted(PAIR_SUITES))
def test_pair_suites_pass(labels, name):
    ctx = DedekindContext(CharacterPair(parse_label(labels[0]), parse_label(labels[1])))
    res = run_pair_suite(name, ctx, seed=1, samples=8)
    assert res.passed, res.messages
    assert res.checks > 0 or name == "reciprocity"


@pytest.mark.parametrize("name", sorted(GLOBAL_SUITES))
def test_global_suites_pass(name):
    res = run_global_suite(name, seed=1, samples=200)
    assert res.passed and res.checks >= 200


def test_reciprocity_reports_constant():
    ctx = DedekindContext(CharacterPair(parse_label("7.6"), parse_label("23.22")))
    res = run_pair_suite("reciprocity", ctx, seed=0, samples=5)
    assert res.info["constant"] == "2:[3]" and res.info["class_numbers"] == 3


def test_substreams_are_independent():
    a = substream(7, "formulas", "3.2x7.6").random()
    assert a == substream(7, "formulas", "3.2x7.6").random()
    assert a != substream(7, "homomorphism", "3.2x7.6").random()
    assert a != substream(8, "formulas", "3.2x7.6").random()
