"""Run the full study protocol in-process with a scripted participant.

learning -> validation -> adjustment -> complete, exactly as the HTTP
server drives it, but calling the Session object directly. The scripted
participant secretly prefers strong, fast signals, answers every query
accordingly, and then confirms the validation pairs. The saved log is
reloaded at the end to show persistence round-trips byte for byte.
"""

import tempfile
from pathlib import Path

import numpy as np

from vibropref.session import SessionConfig, create_session, load_session, save_session


def scripted_choice(pa, pb):
    """Prefer high intensity plus high rhythm, in normalized units."""
    score_a = pa.coords[0] + pa.coords[2]
    score_b = pb.coords[0] + pb.coords[2]
    y = 1 if score_a >= score_b else -1
    confidence = int(np.clip(1 + round(4 * abs(score_a - score_b)), 1, 5))
    return y, confidence


clock_state = {"t": 1_755_000_000.0}


def demo_clock():
    clock_state["t"] += 1.0
    return clock_state["t"]


sess = create_session(SessionConfig(budget=16, seed=2024), clock=demo_clock)
print(f"session {sess.session_id}: budget {sess.config.budget}, phase {sess.phase}")
print()

while sess.phase == "learning":
    pending = sess.pending
    y, c = scripted_choice(pending.pair.point_a, pending.pair.point_b)
    sess.submit_response(y, c)
    entry = sess.round_log[-1]
    print(
        f"round {entry['round']:>2}: ig={entry['info_gain']:.4f}  "
        f"answer={'A' if y > 0 else 'B'} (c={c})"
    )
print()

rec = sess.recommendation
print(f"recommendation after learning: {rec['params']}")
print(f"  posterior mean {rec['posterior_mean']:+.4f}")
print()

print("validation pairs, in protocol order:")
while sess.phase == "validation":
    pair = sess.next_validation_pair()
    first = sess.validation.points[pair.idx_a]
    second = sess.validation.points[pair.idx_b]
    side_a, side_b = (second, first) if pair.swapped else (first, second)
    y, _ = scripted_choice(side_a, side_b)
    chosen = "A" if y > 0 else "B"
    sess.submit_validation_response(pair.tag, chosen)
    answer = sess.validation_responses[-1]
    print(f"  {pair.tag:<18} chose {chosen}  agrees with model: {answer['matches_model']}")
print(f"consistency check ok: {sess.consistency_ok}")
print()

print("adjustment phase: save three favorites")
tweaked = dict(rec["params"])
tweaked["intensity"] = min(1.0, tweaked["intensity"] * 0.9 + 0.05)
for i, params in enumerate([rec["params"], tweaked, rec["params"]], start=1):
    sess.record_favorite(params)
    fav = sess.favorites[-1]
    print(f"  favorite {i}: posterior percentile {fav['posterior_percentile']:.1f}")
print(f"phase now: {sess.phase}")
print()

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "session.json"
    save_session(sess, path)
    size = path.stat().st_size
    reloaded = load_session(path)
    again = Path(tmp) / "again.json"
    save_session(reloaded, again)
    identical = path.read_bytes() == again.read_bytes()
    print(f"saved {size} bytes; reload -> save is byte-identical: {identical}")
