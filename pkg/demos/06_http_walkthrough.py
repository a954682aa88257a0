"""Drive the HTTP API end to end without opening a port.

Uses the in-process test client against the same app object that
`vibropref serve` binds, so every request/response below is exactly what
a browser client sees. A scripted participant who likes intense, grainy
signals answers each query.
"""

import json

import numpy as np
from fastapi.testclient import TestClient

from vibropref.server import create_app

client = TestClient(create_app())


def pick(option_a, option_b):
    def score(option):
        p = option["params"]
        return p["intensity"] + p["grain"]

    gap = score(option_a) - score(option_b)
    side = "A" if gap >= 0 else "B"
    confidence = int(np.clip(1 + round(2.5 * abs(gap)), 1, 5))
    return side, confidence


r = client.post("/sessions", json={"budget": 10, "seed": 55})
sid = r.json()["session_id"]
print(f"POST /sessions -> {r.status_code} {json.dumps(r.json())}")
print()

phase = "learning"
while phase == "learning":
    q = client.get(f"/sessions/{sid}/query").json()
    side, confidence = pick(q["pair"]["A"], q["pair"]["B"])
    r = client.post(
        f"/sessions/{sid}/response",
        json={"choice": side, "confidence": confidence, "round": q["round"]},
    )
    phase = r.json()["phase"]
    pulses = len(q["pair"]["A"]["timeline"]["pulses"])
    print(f"round {q['round']:>2}: chose {side} (c={confidence}), option A had {pulses} pulses")
print()

rec = client.get(f"/sessions/{sid}/recommendation").json()
print(f"GET /recommendation -> {json.dumps(rec['params'])}")
print()

while phase == "validation":
    v = client.get(f"/sessions/{sid}/validation").json()
    side, _ = pick(v["pair"]["A"], v["pair"]["B"])
    r = client.post(
        f"/sessions/{sid}/validation/response",
        json={"pair_tag": v["tag"], "chosen_side": side},
    )
    phase = r.json()["phase"]
    print(f"validation {v['tag']:<18} chose {side}")
print()

print("preview a hand-tuned variant, then save favorites:")
tweak = dict(rec["params"])
tweak["grain"] = round(min(0.7, tweak["grain"] + 0.05), 4)
preview = client.post(f"/sessions/{sid}/preview", json={"params": tweak}).json()
print(f"  preview has {len(preview['timeline']['pulses'])} pulses")

for params in (rec["params"], tweak, rec["params"]):
    r = client.post(f"/sessions/{sid}/favorites", json={"params": params})
    body = r.json()
    print(f"  favorite {body['count']}: percentile {body['posterior_percentile']:.1f}")
print()

log = client.get(f"/sessions/{sid}/log").json()
print(
    f"final log: phase={log['phase']}, rounds={len(log['rounds'])}, "
    f"validation answers={len(log['validation_responses'])}, favorites={len(log['favorites'])}"
)
print(f"consistency_ok={log['consistency_ok']}")

# protocol violations are real HTTP errors, not silent no-ops
r = client.post(f"/sessions/{sid}/response", json={"choice": "A", "confidence": 3})
print(f"late response attempt -> HTTP {r.status_code} ({r.json()['detail']})")
