"""Self-check suites: every bundled cross-validation must hold."""

import json

import pytest

from spectral_cf import run_suite
from spectral_cf._serialize import json_dumps
from spectral_cf.errors import ConfigError


def test_quick_suite_is_green():
    report = run_suite("quick")
    failures = [r for r in report.results if not r.passed]
    assert report.passed, [f"{r.name}[{r.context}]: {r.computed}" for r in failures]
    assert len(report.results) > 30


def test_suite_names_are_validated():
    with pytest.raises(ConfigError):
        run_suite("exhaustive")


def test_report_document_shape():
    report = run_suite("quick")
    doc = report.to_dict()
    assert doc["format"] == "spectral-cf/1"
    assert doc["kind"] == "verification-report"
    assert doc["suite"] == "quick"
    assert doc["passed"] is True
    assert doc["metadata"]["package"]
    for row in doc["results"]:
        assert set(row) >= {"name", "context", "computed", "reference",
                            "tolerance", "passed", "abs_error"}
    # document serializes deterministically
    assert json_dumps(doc) == json_dumps(report.to_dict())
    json.loads(json_dumps(doc))


def test_check_results_carry_usable_errors():
    report = run_suite("quick")
    for res in report.results:
        assert res.abs_error >= 0.0
        assert res.tolerance > 0.0
        assert res.passed == (res.abs_error <= res.tolerance)
