import random
from datetime import datetime, timedelta, timezone
from zoneinfo import ZoneInfo

import pytest

import gen
from serpaudit.agent import (
    AgentConfig,
    ConfigUpdate,
    EmptySnapshots,
    FetchError,
    MockServiceFetcher,
    PreconditionViolation,
    SubmissionQueue,
    apply_config_update,
    fire_instant_utc,
    next_fire_time,
    package_submission,
    run_cycle,
)
from serpaudit.clock import SimClock
from serpaudit.extraction import default_rules, parse_rules_text, render_rules_text
from serpaudit.ise import IseOptions, SerpService, render_block_page
from serpaudit.model import Condition, Region, new_opaque_id
from serpaudit.queries import compose_query_set

UTC = timezone.utc
RULES = default_rules()


def registered_config(**overrides) -> AgentConfig:
    defaults = dict(
        server_url="http://server.test",
        participant_id=new_opaque_id(),
        study_id=9,
        region=Region.AUSTRALIA,
        terms=compose_query_set(Condition.PARKINSONS, study_id=9),
        tz_offset_minutes=600,
        min_query_delay_s=0.01,
        max_query_delay_s=0.05,
        startup_delay_s=30.0,
    )
    defaults.update(overrides)
    return AgentConfig(**defaults)


def mock_service(seed=1) -> SerpService:
    rng = random.Random(seed)
    return SerpService(
        inventory=gen.inventory(rng, n=5),
        graph=gen.graph(rng, n_pages=8),
        stories_pool=gen.stories(rng, n=4),
        options=IseOptions(slot_count=3, reserve_price=0.0),
        seed=seed,
    )


class TestNextFireTime:
    def test_just_before_fire_hour(self):
        now = datetime(2019, 10, 1, 3, 59, 0)
        assert next_fire_time(now) == datetime(2019, 10, 1, 4, 0, 0)

    def test_boundary_strictly_after(self):
        now = datetime(2019, 10, 1, 20, 0, 0)
        assert next_fire_time(now) == datetime(2019, 10, 2, 0, 0, 0)

    def test_year_rollover(self):
        now = datetime(2019, 12, 31, 23, 30, 0)
        assert next_fire_time(now) == datetime(2020, 1, 1, 0, 0, 0)

    def test_all_hours_land_on_schedule(self):
        t = datetime(2019, 10, 1, 0, 0, 0)
        fires = []
        for _ in range(12):
            t = next_fire_time(t)
            fires.append(t.hour)
        assert fires == [4, 8, 12, 16, 20, 0] * 2

    def test_sub_minute_times_truncated(self):
        now = datetime(2019, 10, 1, 4, 0, 0, microsecond=1)
        assert next_fire_time(now) == datetime(2019, 10, 1, 8, 0, 0)


class TestDstHandling:
    TZ = ZoneInfo("America/New_York")

    def test_spring_forward_gap_dropped(self):
        # 2020-03-08: 02:00 EST jumps to 03:00 EDT. Fire hours are untouched,
        # but a synthetic check across the gap must still give a valid fire.
        now = datetime(2020, 3, 8, 5, 30, tzinfo=UTC)  # 00:30 EST local
        instant = fire_instant_utc(now, self.TZ)
        local = instant.astimezone(self.TZ)
        assert local.hour == 4 and local.minute == 0
        assert instant > now

    def test_fall_back_fires_once(self):
        # 2020-11-01: 02:00 EDT falls back to 01:00 EST; 00:00 is unambiguous
        # but the following fire must be exactly one wall-clock step ahead.
        now = datetime(2020, 11, 1, 3, 30, tzinfo=UTC)  # 23:30 EDT Oct 31
        first = fire_instant_utc(now, self.TZ)
        assert first.astimezone(self.TZ).replace(tzinfo=None) == datetime(2020, 11, 1, 0, 0)
        second = fire_instant_utc(first, self.TZ)
        assert second.astimezone(self.TZ).replace(tzinfo=None) == datetime(2020, 11, 1, 4, 0)
        # Wall-clock distance is 4h; the UTC distance includes the repeated hour.
        assert second - first == timedelta(hours=5)


class TestRunCycle:
    def test_full_cycle_14_snapshots(self):
        config = registered_config()
        clock = SimClock(datetime(2019, 10, 1, 4, 0, tzinfo=UTC))
        fetcher = MockServiceFetcher(mock_service())
        submission = run_cycle(config, clock, fetcher, order_seed=99)
        assert len(submission.snapshots) == 14
        assert sorted(s.query for s in submission.snapshots) == sorted(config.terms.terms)
        assert submission.order_seed == 99
        assert submission.tz_offset_minutes == 600
        assert all(s.tld == "com.au" for s in submission.snapshots)

    def test_unregistered_rejected(self):
        config = AgentConfig(server_url="http://x")
        clock = SimClock(datetime(2019, 10, 1, tzinfo=UTC))
        with pytest.raises(PreconditionViolation):
            run_cycle(config, clock, lambda url: "")

    def test_fetch_timestamps_strictly_increasing(self):
        config = registered_config()
        clock = SimClock(datetime(2019, 10, 1, 4, 0, tzinfo=UTC))
        submission = run_cycle(config, clock, MockServiceFetcher(mock_service()), order_seed=1)
        stamps = [s.fetched_at for s in submission.snapshots]
        assert all(b > a for a, b in zip(stamps, stamps[1:]))

    def test_blocked_fetches_marked(self):
        config = registered_config()
        clock = SimClock(datetime(2019, 10, 1, 4, 0, tzinfo=UTC))
        service = mock_service()
        captcha_terms = set(list(config.terms.terms)[:3])

        def fetcher(url):
            from urllib.parse import parse_qs, urlsplit

            term = parse_qs(urlsplit(url).query)["q"][0]
            if term in captcha_terms:
                return render_block_page("captcha")
            return service.serve(term).page

        submission = run_cycle(config, clock, fetcher, order_seed=4)
        blocked = [s for s in submission.snapshots if s.blocked]
        assert len(submission.snapshots) == 14
        assert len(blocked) == 3
        assert {s.query for s in blocked} == captcha_terms

    def test_fetch_failure_annotated_and_cycle_continues(self):
        config = registered_config()
        clock = SimClock(datetime(2019, 10, 1, 4, 0, tzinfo=UTC))
        service = mock_service()
        calls = []

        def fetcher(url):
            calls.append(url)
            if len(calls) == 5:
                raise FetchError("connection reset")
            return service.serve("x").page

        submission = run_cycle(config, clock, fetcher, order_seed=2)
        assert len(submission.snapshots) == 14
        failed = [s for s in submission.snapshots if s.error]
        assert len(failed) == 1
        assert failed[0].blocked is False
        assert failed[0].ads == ()
        assert "fetch-failed" in failed[0].error

    def test_raw_page_retention(self):
        clock = SimClock(datetime(2019, 10, 1, 4, 0, tzinfo=UTC))
        fetcher = MockServiceFetcher(mock_service())
        keep = run_cycle(registered_config(retention=True), clock, fetcher, order_seed=5)
        assert all(s.raw_page for s in keep.snapshots)
        drop = run_cycle(registered_config(retention=False), clock, fetcher, order_seed=5)
        assert all(s.raw_page is None for s in drop.snapshots)


class TestPackageSubmission:
    def test_fields_carried(self):
        config = registered_config()
        now = datetime(2019, 10, 1, 8, 0, 40, tzinfo=UTC)
        clock = SimClock(now)
        submission = run_cycle(config, clock, MockServiceFetcher(mock_service()), order_seed=3)
        assert submission.participant_id == config.participant_id
        assert submission.study_id == 9
        assert submission.plugin_version == config.plugin_version
        assert submission.ui_language == config.ui_language
        assert submission.tz_offset_minutes == 600

    def test_empty_snapshots_rejected(self):
        with pytest.raises(EmptySnapshots):
            package_submission([], registered_config(), datetime.now(UTC), 0)

    def test_distinct_submission_ids(self):
        config = registered_config()
        clock = SimClock(datetime(2019, 10, 1, 4, 0, tzinfo=UTC))
        fetcher = MockServiceFetcher(mock_service())
        first = run_cycle(config, clock, fetcher)
        second = run_cycle(config, clock, fetcher)
        assert first.submission_id != second.submission_id


class TestConfigUpdate:
    def test_newer_adopted(self):
        config = registered_config()
        v4 = default_rules().model_copy(update={"version": 4})
        updated = apply_config_update(config, ConfigUpdate(ruleset=v4, templates=("a",)))
        assert updated.rules_version == 4
        assert updated.templates == ("a",)

    def test_same_version_unchanged(self):
        config = registered_config()
        offered = ConfigUpdate(ruleset=default_rules())
        assert apply_config_update(config, offered) is config

    def test_downgrade_refused(self):
        v3 = default_rules().model_copy(update={"version": 3})
        config = registered_config(ruleset=v3)
        offered = ConfigUpdate(ruleset=default_rules().model_copy(update={"version": 2}))
        assert apply_config_update(config, offered) is config

    def test_rules_text_round_trip_for_distribution(self):
        text = render_rules_text(default_rules())
        assert parse_rules_text(text) == default_rules()


class TestSubmissionQueue:
    def make_submission(self, config, seed):
        clock = SimClock(datetime(2019, 10, 1, 4, 0, tzinfo=UTC))
        return run_cycle(config, clock, MockServiceFetcher(mock_service()), order_seed=seed)

    def test_fifo_order_and_persistence(self, tmp_path):
        config = registered_config()
        queue = SubmissionQueue(tmp_path / "q")
        subs = [self.make_submission(config, i) for i in range(3)]
        for s in subs:
            queue.push(s)
        # a restart re-opens the same directory
        queue2 = SubmissionQueue(tmp_path / "q")
        assert [s.submission_id for s in queue2.pending()] == [s.submission_id for s in subs]

    def test_flush_in_order_and_removal(self, tmp_path):
        config = registered_config()
        queue = SubmissionQueue(tmp_path / "q")
        subs = [self.make_submission(config, i) for i in range(3)]
        for s in subs:
            queue.push(s)
        seen = []
        assert queue.flush(lambda s: seen.append(s.submission_id) or True) == 3
        assert seen == [s.submission_id for s in subs]
        assert len(queue) == 0

    def test_flush_stops_after_retry_budget(self, tmp_path):
        config = registered_config()
        queue = SubmissionQueue(tmp_path / "q")
        for i in range(2):
            queue.push(self.make_submission(config, i))
        attempts = []
        delivered = queue.flush(lambda s: attempts.append(1) and False, max_retries_per_contact=3)
        assert delivered == 0
        assert len(attempts) == 3
        assert len(queue) == 2  # nothing lost

    def test_no_loss_no_duplication_across_flaky_contacts(self, tmp_path):
        config = registered_config()
        queue = SubmissionQueue(tmp_path / "q")
        for i in range(5):
            queue.push(self.make_submission(config, i))
        received: list[str] = []
        state = {"calls": 0}

        def flaky_send(sub):
            state["calls"] += 1
            if state["calls"] % 3 == 0:
                raise ConnectionError("down")
            received.append(sub.submission_id)
            return True

        while len(queue):
            queue.flush(flaky_send)
        assert len(received) == len(set(received)) == 5


class TestCollectorAgentLoop:
    def make_agent(self, tmp_path, api):
        config = registered_config(
            min_query_delay_s=0.001, max_query_delay_s=0.002, startup_delay_s=1.0
        )
        clock = SimClock(datetime(2019, 10, 1, 1, 0, tzinfo=UTC))
        from serpaudit.agent import CollectorAgent

        return CollectorAgent(
            config, clock, MockServiceFetcher(mock_service()), api, tmp_path / "profile"
        ), clock

    def test_single_flight_guard(self, tmp_path):
        class NullApi:
            def submit(self, sub):
                return True

            def fetch_config(self, v):
                return None

        agent, _ = self.make_agent(tmp_path, NullApi())
        agent._cycle_guard.acquire()
        try:
            with pytest.raises(PreconditionViolation):
                agent.run_cycle_and_submit()
        finally:
            agent._cycle_guard.release()
        agent.run_cycle_and_submit()  # released guard: cycle runs

    def test_unreachable_server_buffers_then_delivers_in_order(self, tmp_path):
        class FlappingApi:
            def __init__(self):
                self.up = False
                self.received: list[str] = []

            def submit(self, sub):
                if not self.up:
                    raise ConnectionError("server down")
                self.received.append(sub.submission_id)
                return True

            def fetch_config(self, v):
                return None

        api = FlappingApi()
        agent, _ = self.make_agent(tmp_path, api)
        first = agent.run_cycle_and_submit()
        second = agent.run_cycle_and_submit()
        assert len(agent.queue) == 2  # buffered while unreachable
        api.up = True
        third = agent.run_cycle_and_submit()
        assert len(agent.queue) == 0
        assert api.received == [
            first.submission_id,
            second.submission_id,
            third.submission_id,
        ]
