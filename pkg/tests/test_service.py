"""Tests for the durable session store and its HTTP surface."""

import json
from fractions import Fraction

import pytest

from risklab import (
    Lottery,
    STANDARD_PRIZES,
    ServiceError,
    SessionStore,
    battery_to_json,
    compute_payout,
    create_app,
    payout_seed,
    price_list_battery,
    realize_prize,
    standard_battery,
)
from risklab.records import records_from_csv_text, records_from_jsonl_text

F = Fraction


def fixed_clock():
    counter = iter(range(10**9))
    return lambda: f"2026-01-01T00:00:{next(counter):02d}+00:00"


def make_store(tmp_path, name="data"):
    return SessionStore(tmp_path / name, clock=fixed_clock())


def run_subject(store, session_id, subject_id, token, safe_rows=4, pattern=("A", "A")):
    """Drive one subject to completion through next_step."""
    for _ in range(100):
        step = store.next_step(session_id, subject_id)
        if step["kind"] == "price_list_row":
            choice = "safe" if step["row_index"] <= safe_rows else "risky"
            store.submit_choice(
                session_id, subject_id, token, 1, step["screen"], None, choice
            )
        elif step["kind"] == "spread_decision":
            chosen = pattern[0] if step["pair"] == "AB" else pattern[1]
            store.submit_choice(
                session_id, subject_id, token, 2, step["screen"], step["pair"], chosen
            )
        else:
            return step
    raise AssertionError("subject never finished")


class TestRealizePrize:
    def test_inverse_cdf_with_exact_boundaries(self):
        lot = Lottery(STANDARD_PRIZES, (F(1, 4), F(1, 4), F(1, 2), F(0)))
        assert realize_prize(lot, 0) == 1
        assert realize_prize(lot, 2**62 - 1) == 1  # u just below 1/4
        assert realize_prize(lot, 2**62) == 16  # u exactly 1/4 goes up
        assert realize_prize(lot, 2**63 - 1) == 16
        assert realize_prize(lot, 2**63) == 21  # u exactly 1/2
        assert realize_prize(lot, 2**64 - 1) == 21  # top prize has no mass

    def test_degenerate_lottery(self):
        lot = Lottery(STANDARD_PRIZES, (0, 0, 0, 1))
        for bits in (0, 2**32, 2**64 - 1):
            assert realize_prize(lot, bits) == F(77, 2)

    def test_bits_range_checked(self):
        lot = Lottery(STANDARD_PRIZES, (0, 0, 0, 1))
        with pytest.raises(ValueError):
            realize_prize(lot, -1)
        with pytest.raises(ValueError):
            realize_prize(lot, 2**64)


class TestComputePayout:
    def complete_choices(self):
        list_choices = {i: "safe" if i <= 4 else "risky" for i in range(1, 11)}
        screen_choices = {
            case.case_id: {"AB": "A", "AC": "A"} for case in standard_battery()
        }
        return list_choices, screen_choices

    def test_deterministic_transcript(self):
        cases, rows = standard_battery(), price_list_battery()
        list_choices, screen_choices = self.complete_choices()
        a = compute_payout(cases, rows, list_choices, screen_choices, seed=42)
        b = compute_payout(cases, rows, list_choices, screen_choices, seed=42)
        assert a == b
        assert a["seed"] == "42"  # string: 64-bit seeds overflow JSON doubles
        row_prize = F(a["price_list"]["prize"])
        case_prize = F(a["spread_screen"]["prize"])
        assert F(a["total"]) == row_prize + case_prize
        assert a["price_list"]["chosen"] in ("safe", "risky")
        assert a["spread_screen"]["chosen"] in "ABC"

    def test_draws_respect_choices(self):
        cases, rows = standard_battery(), price_list_battery()
        list_choices, screen_choices = self.complete_choices()
        for seed in range(30):
            draw = compute_payout(cases, rows, list_choices, screen_choices, seed)
            idx = draw["price_list"]["row_index"]
            assert draw["price_list"]["chosen"] == list_choices[idx]
            pair = draw["spread_screen"]["pair"]
            case_id = draw["spread_screen"]["case_id"]
            assert draw["spread_screen"]["chosen"] == screen_choices[case_id][pair]

    def test_payout_seed_is_stable_and_subject_specific(self):
        assert payout_seed(7, "S001") == payout_seed(7, "S001")
        assert payout_seed(7, "S001") != payout_seed(7, "S002")
        assert payout_seed(7, "S001") != payout_seed(8, "S001")


class TestSessionLifecycle:
    def test_create_register_complete_finalize(self, tmp_path):
        store = make_store(tmp_path)
        created = store.create_session("exp1", seed=7)
        assert created == {"session_id": "exp1", "seed": 7}
        reg = store.register_subject("exp1")
        assert reg["subject_id"] == "S001"
        token = reg["token"]

        step = run_subject(store, "exp1", "S001", token, safe_rows=6)
        assert step == {"kind": "finalize"}

        draw = store.finalize_subject("exp1", "S001", token)
        state = store._states["exp1"]
        expected = compute_payout(
            state.cases,
            state.rows,
            state.subjects["S001"].list_choices,
            state.subjects["S001"].screen_choices,
            payout_seed(7, "S001"),
        )
        assert draw == expected

        done = store.next_step("exp1", "S001")
        assert done["kind"] == "done"
        assert done["payout"] == draw

    def test_next_step_follows_display_plan(self, tmp_path):
        from risklab import display_plan

        store = make_store(tmp_path)
        store.create_session("exp1", seed=3)
        token = store.register_subject("exp1", "S001")["token"]
        plan = display_plan(3, "S001")

        step = store.next_step("exp1", "S001")
        assert step["kind"] == "price_list_row"
        assert step["row_index"] == 1
        assert step["option_order"] == list(plan.row_option_order[0])

        run = []
        for i in range(1, 11):
            s = store.next_step("exp1", "S001")
            run.append(s["row_index"])
            store.submit_choice("exp1", "S001", token, 1, s["screen"], None, "risky")
        assert run == list(range(1, 11))

        first_pair = store.next_step("exp1", "S001")
        assert first_pair["kind"] == "spread_decision"
        first_case = plan.case_order[0]
        assert first_pair["screen"] == first_case
        assert first_pair["pair"] == plan.pair_order[first_case][0]
        assert first_pair["option_order"] == list(
            plan.option_order[first_case][first_pair["pair"]]
        )
        assert set(first_pair["options"]) == set(first_pair["pair"])

    def test_session_id_validation(self, tmp_path):
        store = make_store(tmp_path)
        with pytest.raises(ServiceError) as err:
            store.create_session("bad id!")
        assert err.value.status == 400
        store.create_session("dup")
        with pytest.raises(ServiceError) as err:
            store.create_session("dup")
        assert err.value.status == 409
        with pytest.raises(ServiceError):
            store.create_session("neg", seed=-1)

    def test_generated_ids(self, tmp_path):
        store = make_store(tmp_path)
        first = store.create_session()["session_id"]
        second = store.create_session()["session_id"]
        assert first != second
        a = store.register_subject(first)["subject_id"]
        b = store.register_subject(first)["subject_id"]
        assert (a, b) == ("S001", "S002")

    def test_custom_battery_session(self, tmp_path):
        from risklab import custom_battery

        store = make_store(tmp_path)
        base = Lottery.from_percents(STANDARD_PRIZES, (21, 16, 63, 0))
        cases = custom_battery([base], ids=("X1",))
        rows = price_list_battery()
        store.create_session("cus", seed=1, battery=battery_to_json(cases, rows))
        token = store.register_subject("cus", "S001")["token"]
        step = run_subject(store, "cus", "S001", token)
        assert step == {"kind": "finalize"}
        records = store.export_records("cus")
        assert len(records) == 10 + 2

    def test_bad_battery_rejected(self, tmp_path):
        store = make_store(tmp_path)
        with pytest.raises(ServiceError) as err:
            store.create_session("bad", battery={"mps_cases": []})
        assert err.value.status == 400


class TestSubmissionProtocol:
    def setup_subject(self, tmp_path):
        store = make_store(tmp_path)
        store.create_session("p", seed=5)
        token = store.register_subject("p", "S001")["token"]
        return store, token

    def test_rows_must_come_in_order(self, tmp_path):
        store, token = self.setup_subject(tmp_path)
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 1, "2", None, "safe")
        assert err.value.status == 409
        assert err.value.code == "wrong_screen"

    def test_part2_requires_the_price_list_first(self, tmp_path):
        store, token = self.setup_subject(tmp_path)
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 2, "C1", "AB", "A")
        assert err.value.code == "wrong_screen"

    def test_multi_switch_refused(self, tmp_path):
        store, token = self.setup_subject(tmp_path)
        store.submit_choice("p", "S001", token, 1, "1", None, "safe")
        store.submit_choice("p", "S001", token, 1, "2", None, "risky")
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 1, "3", None, "safe")
        assert err.value.code == "multi_switch"
        # risky after risky is fine
        store.submit_choice("p", "S001", token, 1, "3", None, "risky")

    def test_idempotent_duplicates_and_conflicts(self, tmp_path):
        store, token = self.setup_subject(tmp_path)
        first = store.submit_choice("p", "S001", token, 1, "1", None, "safe")
        assert first == {"status": "ok", "duplicate": False}
        again = store.submit_choice("p", "S001", token, 1, "1", None, "safe")
        assert again == {"status": "ok", "duplicate": True}
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 1, "1", None, "risky")
        assert err.value.code == "conflict"
        # the idempotent ack appended nothing
        assert len(store.export_records("p")) == 1

    def test_screen_decisions_any_order_once(self, tmp_path):
        store, token = self.setup_subject(tmp_path)
        for i in range(1, 11):
            store.submit_choice("p", "S001", token, 1, str(i), None, "risky")
        store.submit_choice("p", "S001", token, 2, "C3", "AC", "C")
        store.submit_choice("p", "S001", token, 2, "C3", "AB", "A")
        dup = store.submit_choice("p", "S001", token, 2, "C3", "AC", "C")
        assert dup["duplicate"] is True
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 2, "C3", "AC", "A")
        assert err.value.code == "conflict"

    def test_bad_screen_pair_choice_are_400(self, tmp_path):
        store, token = self.setup_subject(tmp_path)
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 1, "zero", None, "safe")
        assert err.value.status == 400
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 1, "1", "AB", "safe")
        assert err.value.status == 400
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 1, "1", None, "A")
        assert err.value.status == 400
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 3, "1", None, "safe")
        assert err.value.status == 400
        for i in range(1, 11):
            store.submit_choice("p", "S001", token, 1, str(i), None, "risky")
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 2, "C9", "AB", "A")
        assert err.value.status == 400
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 2, "C1", "XY", "A")
        assert err.value.status == 400
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", token, 2, "C1", "AB", "C")
        assert err.value.status == 400

    def test_token_checked(self, tmp_path):
        store, token = self.setup_subject(tmp_path)
        with pytest.raises(ServiceError) as err:
            store.submit_choice("p", "S001", "wrong", 1, "1", None, "safe")
        assert err.value.status == 403
        with pytest.raises(ServiceError) as err:
            store.finalize_subject("p", "S001", "wrong")
        assert err.value.status == 403

    def test_unknown_session_and_subject_are_404(self, tmp_path):
        store, token = self.setup_subject(tmp_path)
        with pytest.raises(ServiceError) as err:
            store.next_step("nope", "S001")
        assert err.value.status == 404
        with pytest.raises(ServiceError) as err:
            store.next_step("p", "S999")
        assert err.value.status == 404


class TestFinalization:
    def test_incomplete_subject_cannot_finalize(self, tmp_path):
        store = make_store(tmp_path)
        store.create_session("f", seed=1)
        token = store.register_subject("f", "S001")["token"]
        with pytest.raises(ServiceError) as err:
            store.finalize_subject("f", "S001", token)
        assert err.value.code == "incomplete"

    def test_finalize_is_exact_and_single_shot(self, tmp_path):
        store = make_store(tmp_path)
        store.create_session("f", seed=1)
        token = store.register_subject("f", "S001")["token"]
        run_subject(store, "f", "S001", token, safe_rows=0)
        draw = store.finalize_subject("f", "S001", token, seed=2024)
        state = store._states["f"]
        assert draw == compute_payout(
            state.cases,
            state.rows,
            state.subjects["S001"].list_choices,
            state.subjects["S001"].screen_choices,
            2024,
        )
        with pytest.raises(ServiceError) as err:
            store.finalize_subject("f", "S001", token, seed=2024)
        assert err.value.code == "already_finalized"
        with pytest.raises(ServiceError) as err:
            store.submit_choice("f", "S001", token, 1, "1", None, "risky")
        assert err.value.code == "already_finalized"


class TestCloseAndDurability:
    def test_closed_session_rejects_writes_allows_reads(self, tmp_path):
        store = make_store(tmp_path)
        store.create_session("c", seed=1)
        token = store.register_subject("c", "S001")["token"]
        store.submit_choice("c", "S001", token, 1, "1", None, "safe")
        store.close_session("c")
        with pytest.raises(ServiceError) as err:
            store.register_subject("c")
        assert err.value.code == "session_closed"
        with pytest.raises(ServiceError):
            store.submit_choice("c", "S001", token, 1, "2", None, "safe")
        with pytest.raises(ServiceError):
            store.close_session("c")
        assert store.export_text("c", "csv")
        assert store.dashboard("c")["closed"] is True

    def test_restart_replays_to_identical_state(self, tmp_path):
        store = make_store(tmp_path)
        store.create_session("r", seed=9)
        t1 = store.register_subject("r", "alice")["token"]
        t2 = store.register_subject("r", "bob")["token"]
        run_subject(store, "r", "alice", t1, safe_rows=7)
        store.finalize_subject("r", "alice", t1)
        for i in range(1, 6):
            store.submit_choice("r", "bob", t2, 1, str(i), None, "safe")

        reloaded = SessionStore(store.data_dir)
        assert reloaded._states["r"].snapshot() == store._states["r"].snapshot()
        assert reloaded.export_text("r", "csv") == store.export_text("r", "csv")
        assert reloaded.export_text("r", "jsonl") == store.export_text("r", "jsonl")

        # the reloaded store continues where the first left off
        reloaded.submit_choice("r", "bob", t2, 1, "6", None, "risky")
        assert reloaded._states["r"].subjects["bob"].list_choices[6] == "risky"

    def test_export_formats_parse_and_match(self, tmp_path):
        store = make_store(tmp_path)
        store.create_session("e", seed=2)
        token = store.register_subject("e", "S001")["token"]
        run_subject(store, "e", "S001", token, safe_rows=3, pattern=("B", "C"))
        csv_records = records_from_csv_text(store.export_text("e", "csv"))
        jsonl_records = records_from_jsonl_text(store.export_text("e", "jsonl"))
        assert csv_records == jsonl_records == store.export_records("e")
        assert len(csv_records) == 22
        assert all(r.display_seed == 2 for r in csv_records)
        with pytest.raises(ServiceError):
            store.export_text("e", "xml")

    def test_exported_records_feed_the_analysis(self, tmp_path):
        from risklab import analyze_records

        store = make_store(tmp_path)
        store.create_session("a", seed=4)
        patterns = [("A", "A"), ("B", "C"), ("A", "C")]
        for i, pattern in enumerate(patterns, start=1):
            token = store.register_subject("a", f"S{i:03d}")["token"]
            run_subject(store, "a", f"S{i:03d}", token, safe_rows=3 + i, pattern=pattern)
        report = analyze_records(store.export_records("a"))
        assert report.n_subjects == 3
        assert report.table.pooled() == {"AA": 6, "BA": 0, "AC": 6, "BC": 6}
        assert report.safe_count_histogram == {4: 1, 5: 1, 6: 1}


class TestDashboard:
    def test_aggregates(self, tmp_path):
        store = make_store(tmp_path)
        store.create_session("d", seed=6)
        t1 = store.register_subject("d", "S001")["token"]
        t2 = store.register_subject("d", "S002")["token"]
        run_subject(store, "d", "S001", t1, safe_rows=5, pattern=("B", "A"))
        store.finalize_subject("d", "S001", t1)
        store.submit_choice("d", "S002", t2, 1, "1", None, "risky")

        data = store.dashboard("d")
        assert data["n_subjects"] == 2
        assert data["progress"]["S001"] == {
            "price_list_rows": 10,
            "screen_decisions": 12,
            "complete": True,
            "finalized": True,
        }
        assert data["progress"]["S002"]["price_list_rows"] == 1
        assert data["safe_count_histogram"] == {"5": 1}
        for case_id, counts in data["pattern_counts"].items():
            assert counts == {"AA": 0, "BA": 1, "AC": 0, "BC": 0}
        assert data["geometry"]["corner"] == ["2/5", "8/15"]


class TestHttpApi:
    @pytest.fixture()
    def client(self, tmp_path):
        from fastapi.testclient import TestClient

        store = make_store(tmp_path)
        app = create_app(store)
        with TestClient(app) as client:
            yield client

    def test_full_flow(self, client):
        created = client.post("/sessions", json={"session_id": "web", "seed": 11})
        assert created.status_code == 201
        assert created.json() == {"session_id": "web", "seed": 11}

        reg = client.post("/sessions/web/subjects", json={})
        assert reg.status_code == 201
        body = reg.json()
        token = body["token"]
        subject = body["subject_id"]

        for _ in range(100):
            step = client.get(f"/sessions/web/subjects/{subject}/next").json()
            if step["kind"] == "price_list_row":
                payload = {
                    "token": token,
                    "part": 1,
                    "screen": step["screen"],
                    "pair": None,
                    "chosen": "safe" if step["row_index"] <= 4 else "risky",
                }
            elif step["kind"] == "spread_decision":
                payload = {
                    "token": token,
                    "part": 2,
                    "screen": step["screen"],
                    "pair": step["pair"],
                    "chosen": "A",
                }
            else:
                break
            posted = client.post(
                f"/sessions/web/subjects/{subject}/choices", json=payload
            )
            assert posted.status_code == 200, posted.text
        assert step == {"kind": "finalize"}

        final = client.post(
            f"/sessions/web/subjects/{subject}/finalize", json={"token": token}
        )
        assert final.status_code == 200
        assert F(final.json()["total"]) > 0

        export = client.get("/sessions/web/export?format=csv")
        assert export.status_code == 200
        assert export.headers["content-type"].startswith("text/csv")
        assert len(records_from_csv_text(export.text)) == 22

        dash = client.get("/sessions/web/dashboard")
        assert dash.status_code == 200
        assert dash.json()["n_subjects"] == 1

        closed = client.post("/sessions/web/close")
        assert closed.status_code == 200
        assert closed.json()["closed"] is True

    def test_error_statuses_and_shape(self, client):
        missing = client.get("/sessions/nope/dashboard")
        assert missing.status_code == 404
        body = missing.json()
        assert body["error"] == "unknown_session"
        assert "message" in body

        client.post("/sessions", json={"session_id": "err"})
        dup = client.post("/sessions", json={"session_id": "err"})
        assert dup.status_code == 409
        assert dup.json()["error"] == "duplicate_session"

        bad = client.post("/sessions", json={"session_id": "bad id"})
        assert bad.status_code == 400
        assert bad.json()["error"] == "bad_id"

        reg = client.post("/sessions/err/subjects", json={"subject_id": "S001"})
        token = reg.json()["token"]
        wrong = client.post(
            "/sessions/err/subjects/S001/choices",
            json={
                "token": "nope",
                "part": 1,
                "screen": "1",
                "pair": None,
                "chosen": "safe",
            },
        )
        assert wrong.status_code == 403
        assert wrong.json()["error"] == "bad_token"

        unvalidated = client.post(
            "/sessions/err/subjects/S001/choices", json={"part": 1}
        )
        assert unvalidated.status_code == 422

        ooo = client.post(
            "/sessions/err/subjects/S001/choices",
            json={
                "token": token,
                "part": 1,
                "screen": "5",
                "pair": None,
                "chosen": "safe",
            },
        )
        assert ooo.status_code == 409
        assert ooo.json()["error"] == "wrong_screen"

    def test_export_jsonl_content_type(self, client):
        client.post("/sessions", json={"session_id": "fmt"})
        res = client.get("/sessions/fmt/export?format=jsonl")
        assert res.status_code == 200
        assert res.headers["content-type"].startswith("application/x-ndjson")
        assert res.text == ""

    def test_browser_client_can_call_cross_origin(self, client):
        preflight = client.options(
            "/sessions",
            headers={
                "Origin": "http://localhost:9000",
                "Access-Control-Request-Method": "POST",
                "Access-Control-Request-Headers": "content-type",
            },
        )
        assert preflight.status_code == 200
        assert preflight.headers["access-control-allow-origin"] == "*"

        res = client.post(
            "/sessions",
            json={"session_id": "xo"},
            headers={"Origin": "http://localhost:9000"},
        )
        assert res.status_code == 201
        assert res.headers["access-control-allow-origin"] == "*"
