"""Regenerate the committed test fixtures from a live in-process engine.

Run from the repository root:

    python3 frontend/scripts/make_fixtures.py

Every fixture is a verbatim engine response, except
timeline_inconsistent.json, which starts from the engine's preview and
then deliberately doctors the pulse magnitudes so they no longer follow
from the params. The client tests use it to prove the UI plays whatever
the engine sends instead of recomputing anything locally.
"""

import copy
import json
from pathlib import Path

from fastapi.testclient import TestClient

from vibropref.server import create_app

OUT = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
OUT.mkdir(parents=True, exist_ok=True)


def dump(name: str, payload) -> None:
    path = OUT / name
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    print(f"wrote {path}")


def main() -> None:
    client = TestClient(create_app())

    created = client.post("/sessions", json={"budget": 3, "seed": 907}).json()
    sid = created["session_id"]
    dump("session_created.json", created)

    query = client.get(f"/sessions/{sid}/query").json()
    dump("query_round1.json", query)

    # answer all three rounds so the later phases exist
    last = None
    for _ in range(3):
        last = client.post(
            f"/sessions/{sid}/response", json={"choice": "A", "confidence": 4}
        ).json()
    dump("response_last.json", last)

    dump("recommendation.json", client.get(f"/sessions/{sid}/recommendation").json())

    validation = client.get(f"/sessions/{sid}/validation").json()
    dump("validation_first.json", validation)

    preview = client.post(
        f"/sessions/{sid}/preview",
        json={"params": {"intensity": 0.5, "balance": 0.5, "rhythm": 2.0, "grain": 0.35}},
    ).json()
    dump("preview.json", preview)

    # Same params, doctored pulses: left/right no longer equal the motor
    # mapping for these params, and one pulse is shifted off its period.
    # A thin client must play these exact numbers anyway.
    doctored = copy.deepcopy(preview)
    for i, pulse in enumerate(doctored["timeline"]["pulses"]):
        pulse["left"] = round(0.9 - 0.07 * i, 3)
        pulse["right"] = round(0.05 + 0.11 * i, 3)
    doctored["timeline"]["pulses"][1]["start_ms"] += 37.0
    dump("timeline_inconsistent.json", doctored)


if __name__ == "__main__":
    main()
