"""HTTP surface tests over the in-process ASGI app."""

import numpy as np
import pytest
from fastapi.testclient import TestClient

from kda.config import AppConfig
from kda.pipeline import ModelStore
from kda.service import create_app
from kda.synth import RhythmProfile, gen_sample

PROFILE = RhythmProfile(
    dwell_means=(95, 120, 80, 105, 90), flight_means=(170, 210, 150, 190), jitter_std=7.0
)


def _entry(account_id, sample):
    events = [
        {"key": None, "press_ms": p, "release_ms": r}
        for p, r in zip(sample.presses, sample.releases)
    ]
    return {"account_id": account_id, "events": events}


@pytest.fixture()
def client(tmp_path):
    config = AppConfig(model_dir=str(tmp_path))
    app = create_app(config, ModelStore(tmp_path))
    with TestClient(app) as c:
        yield c


def _enroll(client, account_id, seed=0, count=4):
    rng = np.random.default_rng(seed)
    responses = [
        client.post("/enroll", json=_entry(account_id, gen_sample(PROFILE, rng)))
        for _ in range(count)
    ]
    return responses


def test_health_counts_enrolled_accounts(client):
    assert client.get("/health").json() == {"status": "ok", "accounts": 0}
    _enroll(client, "alice")
    assert client.get("/health").json() == {"status": "ok", "accounts": 1}


def test_enroll_collects_then_trains(client):
    responses = _enroll(client, "alice", seed=1)
    assert [r.status_code for r in responses] == [200] * 4
    assert [r.json()["status"] for r in responses] == ["collecting"] * 3 + ["enrolled"]
    assert responses[0].json() == {
        "account_id": "alice", "status": "collecting",
        "samples_so_far": 1, "samples_needed": 4,
    }
    assert responses[-1].json()["samples_so_far"] == 4


def test_verify_accepts_matching_rhythm(client):
    _enroll(client, "alice", seed=2)
    # same rhythm as the first enrollment entry: replays score at least
    # the minimum training score and clear every threshold policy
    replay = gen_sample(PROFILE, np.random.default_rng(2))
    r = client.post("/verify", json=_entry("alice", replay))
    assert r.status_code == 200
    body = r.json()
    assert body["accepted"] is True
    assert body["score"] >= body["threshold"]


def test_verify_rejects_slowed_rhythm(client):
    _enroll(client, "alice", seed=3)
    base = gen_sample(PROFILE, np.random.default_rng(78))
    slow = _entry("alice", base)
    for e in slow["events"]:
        e["press_ms"] *= 3
        e["release_ms"] *= 3
    r = client.post("/verify", json=slow)
    assert r.status_code == 200
    assert r.json()["accepted"] is False


def test_verify_before_enroll_is_404(client):
    sample = gen_sample(PROFILE, np.random.default_rng(1))
    r = client.post("/verify", json=_entry("ghost", sample))
    assert r.status_code == 404
    assert "unknown account" in r.json()["detail"]


def test_partial_enrollment_is_not_verifiable(client):
    _enroll(client, "alice", seed=4, count=3)  # one short of training
    sample = gen_sample(PROFILE, np.random.default_rng(2))
    assert client.post("/verify", json=_entry("alice", sample)).status_code == 404


def test_malformed_body_is_400_with_field_detail(client):
    r = client.post(
        "/verify",
        json={"account_id": "a", "events": [{"key": "x", "press_ms": 0}]},
    )
    assert r.status_code == 400
    detail = r.json()["detail"]
    assert any(d["field"].endswith("release_ms") for d in detail)


def test_invalid_timing_is_400(client):
    body = {
        "account_id": "alice",
        "events": [{"key": None, "press_ms": 100, "release_ms": 100}],
    }
    r = client.post("/enroll", json=body)
    assert r.status_code == 400
    assert "dwell <= 0" in r.json()["detail"]


def test_empty_event_list_is_400(client):
    r = client.post("/enroll", json={"account_id": "alice", "events": []})
    assert r.status_code == 400
    assert "at least one keystroke" in r.json()["detail"]


def test_inconsistent_length_mid_enrollment_is_400(client):
    rng = np.random.default_rng(5)
    first = client.post("/enroll", json=_entry("alice", gen_sample(PROFILE, rng)))
    assert first.json()["status"] == "collecting"
    short = {
        "account_id": "alice",
        "events": [{"key": None, "press_ms": 0, "release_ms": 90}],
    }
    r = client.post("/enroll", json=short)
    assert r.status_code == 400
    assert "inconsistent password length" in r.json()["detail"]
    # the buffered sample is still there; finishing with 3 more works
    for _ in range(3):
        last = client.post("/enroll", json=_entry("alice", gen_sample(PROFILE, rng)))
    assert last.json()["status"] == "enrolled"


def test_bad_account_id_is_400(client):
    sample = gen_sample(PROFILE, np.random.default_rng(6))
    r = client.post("/enroll", json=_entry("../escape", sample))
    assert r.status_code == 400
    assert "invalid account id" in r.json()["detail"]


def test_models_persist_across_app_instances(tmp_path):
    config = AppConfig(model_dir=str(tmp_path))
    with TestClient(create_app(config, ModelStore(tmp_path))) as first:
        _enroll(first, "alice", seed=7)
    replay = gen_sample(PROFILE, np.random.default_rng(7))
    with TestClient(create_app(config, ModelStore(tmp_path))) as second:
        r = second.post("/verify", json=_entry("alice", replay))
    assert r.status_code == 200
    assert r.json()["accepted"] is True
