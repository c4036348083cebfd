import json

import pytest

from core.report import ANCHORS, ClaimResult, emit_report, write_report


def _claims():
    return [ClaimResult("blowup-numbers", "blowup-numbers", True, {"d": 4, "g": 1}, ["M·L·E = 4"]),
            ClaimResult("node-count[elliptic-quartic]", "node-count", False, {"expected": 2}, ["count = 1"])]


def test_checksum_ignores_timestamp():
    a = emit_report(_claims(), "demo", {"seed": 1}, timestamp="2024-01-01T00:00:00+00:00")
    b = emit_report(_claims(), "demo", {"seed": 1}, timestamp="2025-06-30T12:00:00+00:00")
    assert a.checksum == b.checksum
    assert a.body == b.body
    assert a.text != b.text


def test_checksum_depends_on_inputs():
    a = emit_report(_claims(), "demo", {"seed": 1})
    b = emit_report(_claims(), "demo", {"seed": 2})
    assert a.checksum != b.checksum


def test_failed_claim_fails_report():
    report = emit_report(_claims(), "demo")
    assert not report.passed
    assert report.summary["failed"] == ["node-count[elliptic-quartic]"]
    assert "result: FAIL" in report.body
    assert "[FAIL] node-count[elliptic-quartic]" in report.body


def test_empty_report_is_valid():
    report = emit_report([], "empty")
    assert report.passed
    assert "claims: 0" in report.body
    assert report.summary["claims"] == []


def test_error_status():
    r = ClaimResult("x", "flex", False, error_msg="ExtensionExhaustedError: cap 8")
    assert r.status == "ERROR"
    assert any(line.startswith("  error:") for line in r.lines())


def test_unknown_anchor_rejected():
    with pytest.raises(ValueError):
        ClaimResult("x", "theorem-42", True)


def test_anchor_texts_carry_no_numbering():
    for text in ANCHORS.values():
        assert "Theorem" not in text and "Lemma" not in text


def test_write_report(tmp_path):
    report = emit_report(_claims(), "demo")
    path = tmp_path / "out" / "demo.txt"
    write_report(report, str(path))
    assert path.read_text(encoding="utf-8") == report.text
    summary = json.loads((tmp_path / "out" / "demo.txt.json").read_text(encoding="utf-8"))
    assert summary["checksum"] == report.checksum
    assert summary["passed"] is False
