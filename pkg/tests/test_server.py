from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import pytest
from fastapi.testclient import TestClient

from serpaudit.model import (
    AdRecord,
    ClientKind,
    Condition,
    OrganicResult,
    Region,
    SerpSnapshot,
    Submission,
    TopStory,
    new_opaque_id,
    validate_survey,
)
from serpaudit.server import (
    CONTROL_CAPACITY,
    CorpusEntry,
    GroupTable,
    MemoryAssignmentState,
    ServerConfigState,
    Store,
    StudyMismatch,
    UnknownParticipant,
    create_app,
    default_group_table,
    export_corpus_text,
    import_corpus,
)
from serpaudit.server.store import ConsentMissing

UTC = timezone.utc
NOW = datetime(2019, 10, 2, 12, 0, tzinfo=UTC)

BASE_SURVEY = {
    "pd_status": "no",
    "ms_status": "no",
    "db_status": "no",
    "researcher": "no",
    "residence": "uk",
    "age_band": "50-59",
    "gender": "female",
    "device_use": "weekly",
    "search_use": "weekly",
    "paid_or_inquired_sct": "no",
    "city": "Leeds",
}


def survey(**overrides):
    return validate_survey({**BASE_SURVEY, **overrides})


def make_store(tmp_path, name="server.db") -> Store:
    return Store(tmp_path / name)


def snapshot(query="stem cells", **kw):
    defaults = dict(query=query, tld="co.uk", fetched_at=NOW)
    defaults.update(kw)
    return SerpSnapshot(**defaults)


def submission_for(participant, n_snaps=2, **kw):
    snaps = tuple(snapshot(query=f"q {i}", fetched_at=NOW) for i in range(n_snaps))
    defaults = dict(
        submission_id=new_opaque_id(),
        participant_id=participant.participant_id,
        study_id=participant.study_id,
        plugin_version="1.0.0",
        sent_at=NOW,
        tz_offset_minutes=60,
        ui_language="en",
        snapshots=snaps,
    )
    defaults.update(kw)
    return Submission(**defaults)


class TestGroupTable:
    def test_published_pd_ids(self):
        table = GroupTable()
        assert table.assign(survey(pd_status="patient", residence="ca"), MemoryAssignmentState()) == 3
        assert table.assign(survey(pd_status="patient", residence="uk"), MemoryAssignmentState()) == 6
        assert table.assign(survey(pd_status="carer", residence="au"), MemoryAssignmentState()) == 9
        assert table.assign(survey(pd_status="patient", residence="us"), MemoryAssignmentState()) == 12

    def test_ms_carer_canada_gets_configured_group(self):
        table = GroupTable()
        study_id = table.assign(survey(ms_status="carer", residence="ca"), MemoryAssignmentState())
        group = table.get(study_id)
        assert group.condition is Condition.MULTIPLE_SCLEROSIS
        assert group.region is Region.CANADA

    def test_condition_precedence_pd_over_db(self):
        table = GroupTable()
        chosen = table.assign(
            survey(pd_status="patient", db_status="patient", residence="us"),
            MemoryAssignmentState(),
        )
        assert chosen == 12

    def test_sequential_controls_fill_buckets_in_order(self):
        table = GroupTable()
        state = MemoryAssignmentState()
        assigned = [table.assign(survey(), state) for _ in range(200)]
        assert assigned[:50] == [15] * 50
        assert assigned[50:100] == [14] * 50  # multiple sclerosis bucket next
        assert assigned[100:150] == [13] * 50
        # every bucket full: spillover lands in the observation group
        assert set(assigned[150:]) == {16}

    def test_affected_other_residence_goes_to_observation(self):
        table = GroupTable()
        study_id = table.assign(survey(pd_status="patient", residence="other"), MemoryAssignmentState())
        assert table.get(study_id).kind.value == "observation"

    def test_group_table_has_unique_ids(self):
        groups = default_group_table()
        ids = [g.study_id for g in groups]
        assert len(ids) == len(set(ids)) == 16


class TestRegistration:
    def test_pd_patient_uk(self, tmp_path):
        store = make_store(tmp_path)
        record = store.register_participant(
            survey(pd_status="patient"), ClientKind.DONOR, "1.0", "en", consent=True
        )
        assert record.study_id == 6
        assert store.get_participant(record.participant_id) == record

    def test_consent_missing(self, tmp_path):
        store = make_store(tmp_path)
        with pytest.raises(ConsentMissing):
            store.register_participant(survey(), ClientKind.DONOR, "1.0", "en", consent=False)
        assert store.counts()["participants"] == 0

    def test_control_bucket_capacity(self, tmp_path):
        store = make_store(tmp_path)
        for _ in range(55):
            store.register_participant(survey(), ClientKind.DONOR, "1.0", "en", consent=True)
        assert store.count_in_group(15) == CONTROL_CAPACITY
        assert store.count_in_group(14) == 5
        assert store.control_occupancy(15) == CONTROL_CAPACITY

    def test_concurrent_registrations_exact_occupancy(self, tmp_path):
        store = make_store(tmp_path)

        def one(_):
            return store.register_participant(
                survey(), ClientKind.DONOR, "1.0", "en", consent=True
            ).study_id

        with ThreadPoolExecutor(max_workers=16) as pool:
            assigned = list(pool.map(one, range(120)))
        assert assigned.count(15) == 50
        assert assigned.count(14) == 50
        assert assigned.count(13) == 20
        assert store.count_in_group(15) == 50


class TestIngest:
    def test_ingest_then_count(self, tmp_path):
        store = make_store(tmp_path)
        record = store.register_participant(survey(), ClientKind.DONOR, "1.0", "en", consent=True)
        ack = store.ingest_submission(submission_for(record, n_snaps=14))
        assert ack == {"status": "ok", "duplicate": False, "stored_snapshots": 14}
        assert store.counts()["snapshots"] == 14

    def test_duplicate_submission_idempotent(self, tmp_path):
        store = make_store(tmp_path)
        record = store.register_participant(survey(), ClientKind.DONOR, "1.0", "en", consent=True)
        sub = submission_for(record)
        store.ingest_submission(sub)
        ack = store.ingest_submission(sub)
        assert ack["duplicate"] is True
        assert store.counts()["snapshots"] == len(sub.snapshots)

    def test_unknown_participant(self, tmp_path):
        store = make_store(tmp_path)
        record = store.register_participant(survey(), ClientKind.DONOR, "1.0", "en", consent=True)
        bogus = submission_for(record).model_copy(update={"participant_id": new_opaque_id()})
        with pytest.raises(UnknownParticipant):
            store.ingest_submission(bogus)

    def test_study_mismatch(self, tmp_path):
        store = make_store(tmp_path)
        record = store.register_participant(survey(), ClientKind.DONOR, "1.0", "en", consent=True)
        wrong = submission_for(record, study_id=record.study_id + 1)
        with pytest.raises(StudyMismatch):
            store.ingest_submission(wrong)

    def test_replaying_prefix_never_changes_counts(self, tmp_path):
        store = make_store(tmp_path)
        record = store.register_participant(survey(), ClientKind.DONOR, "1.0", "en", consent=True)
        stream = [submission_for(record) for _ in range(4)]
        for sub in stream:
            store.ingest_submission(sub)
        before = store.counts()
        for sub in stream[:2]:
            store.ingest_submission(sub)
        assert store.counts() == before

    def test_every_snapshot_joins_participant_and_group(self, tmp_path):
        store = make_store(tmp_path)
        record = store.register_participant(survey(), ClientKind.BASELINE, "1.0", "en", consent=True)
        store.ingest_submission(submission_for(record, n_snaps=3))
        entries = list(store.iter_entries())
        assert len(entries) == 3
        assert all(e.participant_id == record.participant_id for e in entries)
        assert all(e.study_id == record.study_id for e in entries)
        assert all(e.client_kind is ClientKind.BASELINE for e in entries)


class TestExportRoundTrip:
    def adversarial_entries(self):
        ads = (
            AdRecord(
                name="swissmedica.startstemcells.com",
                title='Cure; with "quotes"',
                url="https://x.example/?a=1;b=2",
                content="Stem cells treatment. \U0001f600\U0001f9ec\nSecond line.",
                resolved_host="swissmedica.startstemcells.com",
            ),
        )
        results = (
            OrganicResult(title="semi;colon", content='quo"te', url="https://r.example", position=1),
        )
        stories = (TopStory(title="new\nline", author="a;b", url="https://s.example", position=1),)
        return [
            CorpusEntry(
                submission_id=new_opaque_id(),
                participant_id=new_opaque_id(),
                study_id=15,
                client_kind=ClientKind.DONOR,
                plugin_version="1.0.0",
                sent_at=NOW,
                tz_offset_minutes=-300,
                ui_language="en",
                query='stem "cells"; cost',
                tld="com",
                fetched_at=NOW,
                blocked=False,
                ads=ads,
                results=results,
                top_stories=stories,
                error=None,
            )
        ]

    def test_empty_corpus_header_only(self):
        text = export_corpus_text([])
        assert text.count("\r\n") == 1
        assert import_corpus(text) == []

    def test_adversarial_round_trip_fixed_point(self):
        entries = self.adversarial_entries()
        first = export_corpus_text(entries)
        back = import_corpus(first)
        assert back == entries
        second = export_corpus_text(back)
        assert second == first  # byte-exact fixed point

    def test_emoji_preserved(self):
        entries = self.adversarial_entries()
        back = import_corpus(export_corpus_text(entries))
        assert "\U0001f600" in back[0].ads[0].content


class TestHttpApi:
    @pytest.fixture()
    def client(self, tmp_path):
        store = make_store(tmp_path)
        app = create_app(store, ServerConfigState(), admin_token="secret")
        return TestClient(app)

    def register_body(self, **survey_overrides):
        return {
            "survey": {**BASE_SURVEY, **survey_overrides},
            "consent": True,
            "client_kind": "donor",
            "plugin_version": "1.0.0",
            "ui_language": "en",
        }

    def test_register_flow(self, client):
        resp = client.post("/register", json=self.register_body(pd_status="I'm a patient."))
        assert resp.status_code == 200
        body = resp.json()
        assert body["study_id"] == 6
        assert len(body["terms"]) == 14
        assert "parkinson's cure" in body["terms"]

    def test_register_without_consent(self, client):
        payload = self.register_body()
        payload["consent"] = False
        resp = client.post("/register", json=payload)
        assert resp.status_code == 403
        assert resp.json()["error"] == "consent_missing"

    def test_register_invalid_survey_lists_fields(self, client):
        resp = client.post("/register", json=self.register_body(age_band="17-20"))
        assert resp.status_code == 422
        fields = {f["field"] for f in resp.json()["fields"]}
        assert fields == {"age_band"}

    def test_submit_and_dedup(self, client):
        reg = client.post("/register", json=self.register_body()).json()
        sub = Submission(
            submission_id=new_opaque_id(),
            participant_id=reg["participant_id"],
            study_id=reg["study_id"],
            plugin_version="1.0.0",
            sent_at=NOW,
            tz_offset_minutes=0,
            ui_language="en",
            snapshots=(snapshot(),),
        )
        first = client.post("/submit", content=sub.model_dump_json(), headers={"content-type": "application/json"})
        assert first.status_code == 200 and first.json()["duplicate"] is False
        second = client.post("/submit", content=sub.model_dump_json(), headers={"content-type": "application/json"})
        assert second.json()["duplicate"] is True
        assert client.get("/health").json()["snapshots"] == 1

    def test_submit_unknown_participant(self, client):
        sub = Submission(
            submission_id=new_opaque_id(),
            participant_id=new_opaque_id(),
            study_id=15,
            plugin_version="1.0.0",
            sent_at=NOW,
            tz_offset_minutes=0,
            ui_language="en",
            snapshots=(snapshot(),),
        )
        resp = client.post("/submit", content=sub.model_dump_json(), headers={"content-type": "application/json"})
        assert resp.status_code == 404

    def test_config_versioning(self, client):
        resp = client.get("/config", params={"v": 0})
        assert resp.status_code == 200
        version = resp.json()["version"]
        assert len(resp.json()["templates"]) == 14
        assert client.get("/config", params={"v": version}).status_code == 304
        assert client.get("/config", params={"v": version + 5}).status_code == 304

    def test_export_requires_admin(self, client):
        assert client.get("/export").status_code == 401
        ok = client.get("/export", headers={"Authorization": "Bearer secret"})
        assert ok.status_code == 200
        assert ok.text.startswith("submission_id;participant_id")

    def test_export_import_export_fixed_point_via_http(self, client):
        reg = client.post("/register", json=self.register_body()).json()
        snaps = (
            snapshot(query='tricky; "query"\nwith newline'),
            snapshot(query="emoji \U0001f9ec"),
        )
        sub = Submission(
            submission_id=new_opaque_id(),
            participant_id=reg["participant_id"],
            study_id=reg["study_id"],
            plugin_version="1.0.0",
            sent_at=NOW,
            tz_offset_minutes=600,
            ui_language="en",
            snapshots=snaps,
        )
        client.post("/submit", content=sub.model_dump_json(), headers={"content-type": "application/json"})
        first = client.get("/export", headers={"Authorization": "Bearer secret"}).text
        entries = import_corpus(first)
        assert len(entries) == 2
        assert export_corpus_text(entries) == first

    def test_export_group_filter(self, client):
        client.post("/register", json=self.register_body())  # -> group 15
        reg2 = client.post("/register", json=self.register_body(pd_status="patient")).json()
        sub = Submission(
            submission_id=new_opaque_id(),
            participant_id=reg2["participant_id"],
            study_id=reg2["study_id"],
            plugin_version="1.0.0",
            sent_at=NOW,
            tz_offset_minutes=0,
            ui_language="en",
            snapshots=(snapshot(),),
        )
        client.post("/submit", content=sub.model_dump_json(), headers={"content-type": "application/json"})
        only_controls = client.get(
            "/export", params={"groups": "15"}, headers={"Authorization": "Bearer secret"}
        ).text
        assert len(import_corpus(only_controls)) == 0
        only_pd = client.get(
            "/export", params={"groups": "6"}, headers={"Authorization": "Bearer secret"}
        ).text
        assert len(import_corpus(only_pd)) == 1
