import json
import os
from pathlib import Path

import pytest

import trustlens

FIXTURES = Path(os.environ.get("TRUSTLENS_FIXTURE_DIR", Path(__file__).resolve().parents[1] / "fixtures"))


def test_binning():
    assert trustlens.bin(0.0) == "L"
    assert trustlens.bin(0.33) == "M"
    assert trustlens.bin(0.67) == "M"
    assert trustlens.bin(0.894) == "H"
    with pytest.raises(trustlens.TrustlensError) as info:
        trustlens.bin(1.5)
    assert info.value.kind == "domain error"


def test_abuse_aggregate():
    assert round(trustlens.aggregate_abuse(39, 110, 61339), 4) == 0.0015
    assert trustlens.aggregate_abuse(0, 0, 31012) == 0.0
    with pytest.raises(trustlens.TrustlensError):
        trustlens.aggregate_abuse(0, 0, 0)


def test_epoch_mapping():
    assert trustlens.map_epochs_to_score(10) == 0.0
    assert trustlens.map_epochs_to_score(15) == 0.5
    assert trustlens.map_epochs_to_score(30) == 0.5
    assert trustlens.map_epochs_to_score(None) == 1.0


def test_worked_example():
    report = trustlens.aggregate_rating({"B": "L", "AL": "M", "CC": "M", "IL": "H"}, ["B", "AL", "CC", "IL"])
    assert report["aggregate"] == "M"
    assert report["tallies"] == {"L": 3, "M": 3, "H": 0}


def test_builtin_profiles():
    profiles = dict(trustlens.builtin_profiles())
    assert profiles["P_FU"] == "B,CC,AL,IL"
    assert set(profiles) == {"P_CU", "P_FU", "P_PU", "P_AU"}


def test_vote():
    result = trustlens.vote([["AL", "CC", "B", "IL"]] * 3)
    assert result["ranking"] == ["AL", "CC", "B", "IL"]
    assert result["scores"]["AL"] == 9


def test_rate_corpus():
    report = trustlens.rate_corpus(FIXTURES / "small.jsonl", profile="P_FU")
    assert report["profile"] == "P_FU"
    assert [i["issue"] for i in report["issues"]] == ["B", "CC", "AL", "IL"]
    with pytest.raises(trustlens.TrustlensError):
        trustlens.rate_corpus(FIXTURES / "malformed.jsonl")


def test_cli_in_process():
    code, out, _ = trustlens.run_cli(["rate", "--corpus", str(FIXTURES / "small.jsonl")])
    assert code == 0
    assert json.loads(out)["profile"] == "P_CU"
    code, _, err = trustlens.run_cli(["rate", "--corpus", str(FIXTURES / "small.jsonl"), "--profile", "nope"])
    assert code == 1
    assert "P_AU" in err
