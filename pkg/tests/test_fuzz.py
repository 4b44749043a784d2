import pytest

from nabla.fuzz import LEMMAS, report_to_json, run_lemma


@pytest.mark.parametrize("lemma", [l for l in LEMMAS if l != "soundness"])
def test_lemmas_hold_on_modest_samples(lemma):
    report = run_lemma(lemma, samples=150, seed=42)
    assert report.ok, report.counterexample
    assert report.checked == 150


def test_soundness_lemma_small():
    report = run_lemma("soundness", samples=8, seed=42)
    assert report.ok, report.counterexample


def test_reports_are_deterministic():
    a = report_to_json(run_lemma("last", samples=100, seed=3))
    b = report_to_json(run_lemma("last", samples=100, seed=3))
    assert a == b


def test_injected_bug_is_found_and_shrunk():
    report = run_lemma("translation", samples=2000, seed=3, inject_bug="valuation-shift")
    assert not report.ok
    cx = report.counterexample
    assert cx is not None and "formula" in cx and "model" in cx
    # greedy shrinking keeps the witness small
    assert len(cx["formula"]) < 60


def test_unknown_lemma_rejected():
    with pytest.raises(ValueError):
        run_lemma("nonsense", samples=1, seed=0)
