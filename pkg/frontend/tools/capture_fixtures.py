"""Record real service exchanges into tests/fixtures.json.

Runs the session service in-process and captures every request/response
pair for a handful of scripted scenarios. The browser client's contract
tests replay these tapes byte-for-byte, so regenerate the file whenever
the service wire format changes:

    python3 tools/capture_fixtures.py
"""

import json
import pathlib
import sys
import tempfile

from fastapi.testclient import TestClient

from risklab import SessionStore, create_app


class Recorder:
    def __init__(self, client: TestClient):
        self.client = client
        self.tape: list[dict] = []

    def call(self, method: str, path: str, body: dict | None = None):
        if method == "GET":
            response = self.client.get(path)
        else:
            response = self.client.post(path, json=body)
        content_type = response.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            payload = {"status": response.status_code, "json": response.json()}
        else:
            payload = {
                "status": response.status_code,
                "text": response.text,
                "content_type": content_type.split(";")[0],
            }
        self.tape.append(
            {"request": {"method": method, "path": path, "body": body}, "response": payload}
        )
        return payload


def subject_script(rec: Recorder, session_id: str, token: str, subject_id: str):
    """Clear the whole flow: safe through row 4, then the first-listed option."""
    while True:
        step = rec.call("GET", f"/sessions/{session_id}/subjects/{subject_id}/next")["json"]
        if step["kind"] == "price_list_row":
            body = {
                "token": token,
                "part": 1,
                "screen": step["screen"],
                "pair": None,
                "chosen": "safe" if step["row_index"] <= 4 else "risky",
            }
        elif step["kind"] == "spread_decision":
            body = {
                "token": token,
                "part": 2,
                "screen": step["screen"],
                "pair": step["pair"],
                "chosen": step["option_order"][0],
            }
        elif step["kind"] == "finalize":
            rec.call(
                "POST",
                f"/sessions/{session_id}/subjects/{subject_id}/finalize",
                {"token": token},
            )
            continue
        else:
            return
        rec.call("POST", f"/sessions/{session_id}/subjects/{subject_id}/choices", body)


def main() -> int:
    store = SessionStore(pathlib.Path(tempfile.mkdtemp()))
    client = TestClient(create_app(store))
    scenarios: dict[str, list] = {}

    # A subject completes both parts, is paid, and the dashboard fills in.
    rec = Recorder(client)
    rec.call("POST", "/sessions", {"session_id": "fix1", "seed": 42})
    reg = rec.call("POST", "/sessions/fix1/subjects", {})["json"]
    subject_script(rec, "fix1", reg["token"], reg["subject_id"])
    scenarios["happy_flow"] = rec.tape

    rec = Recorder(client)
    rec.call("GET", "/sessions/fix1/dashboard")
    rec.call("GET", "/sessions/fix1/export?format=csv")
    scenarios["dashboard"] = rec.tape

    # The server refuses a second switch point even if the client lets it by.
    rec = Recorder(client)
    rec.call("POST", "/sessions", {"session_id": "fix2", "seed": 7})
    reg = rec.call("POST", "/sessions/fix2/subjects", {})["json"]
    token, sid = reg["token"], reg["subject_id"]
    rec.call("GET", f"/sessions/fix2/subjects/{sid}/next")
    rec.call("POST", f"/sessions/fix2/subjects/{sid}/choices",
             {"token": token, "part": 1, "screen": "1", "pair": None, "chosen": "safe"})
    rec.call("GET", f"/sessions/fix2/subjects/{sid}/next")
    rec.call("POST", f"/sessions/fix2/subjects/{sid}/choices",
             {"token": token, "part": 1, "screen": "2", "pair": None, "chosen": "risky"})
    rec.call("POST", f"/sessions/fix2/subjects/{sid}/choices",
             {"token": token, "part": 1, "screen": "3", "pair": None, "chosen": "safe"})
    scenarios["single_switch"] = rec.tape

    # Other protocol errors a client must surface.
    rec = Recorder(client)
    rec.call("POST", "/sessions", {"session_id": "fix3", "seed": 1})
    reg = rec.call("POST", "/sessions/fix3/subjects", {})["json"]
    token, sid = reg["token"], reg["subject_id"]
    rec.call("POST", f"/sessions/fix3/subjects/{sid}/choices",
             {"token": token, "part": 1, "screen": "2", "pair": None, "chosen": "safe"})
    rec.call("POST", f"/sessions/fix3/subjects/{sid}/choices",
             {"token": "intruder", "part": 1, "screen": "1", "pair": None, "chosen": "safe"})
    rec.call("POST", f"/sessions/fix3/subjects/{sid}/choices",
             {"token": token, "part": 1, "screen": "1", "pair": None, "chosen": "safe"})
    rec.call("POST", f"/sessions/fix3/subjects/{sid}/choices",
             {"token": token, "part": 1, "screen": "1", "pair": None, "chosen": "safe"})
    rec.call("POST", f"/sessions/fix3/subjects/{sid}/choices",
             {"token": token, "part": 1, "screen": "1", "pair": None, "chosen": "risky"})
    scenarios["protocol_errors"] = rec.tape

    # Refresh mid-session: `next` repeats the pending screen verbatim.
    rec = Recorder(client)
    rec.call("POST", "/sessions", {"session_id": "fix5", "seed": 3})
    reg = rec.call("POST", "/sessions/fix5/subjects", {})["json"]
    token, sid = reg["token"], reg["subject_id"]
    rec.call("GET", f"/sessions/fix5/subjects/{sid}/next")
    rec.call("GET", f"/sessions/fix5/subjects/{sid}/next")
    rec.call("POST", f"/sessions/fix5/subjects/{sid}/choices",
             {"token": token, "part": 1, "screen": "1", "pair": None, "chosen": "safe"})
    rec.call("GET", f"/sessions/fix5/subjects/{sid}/next")
    scenarios["resume"] = rec.tape

    out = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures.json"
    out.write_text(json.dumps({"scenarios": scenarios}, indent=1) + "\n")
    total = sum(len(tape) for tape in scenarios.values())
    print(f"wrote {out} ({len(scenarios)} scenarios, {total} exchanges)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
