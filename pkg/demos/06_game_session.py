"""A full Elephant-and-Ladder session, narrated from its event log.

Simulates one game under a scripted operator policy, then proves the
event-sourcing contract: folding the log reproduces the live terminal state
field for field. The same fold powers service restarts and the operator
console's board view.
"""

from maya.sessions import replay, simulate_game


def main():
    engine = simulate_game(seed=20)
    state = engine.state
    print(f"{len(engine.events)} events; winner: {state.winner} "
          f"(child {state.child_pos}, robot {state.robot_pos})\n")

    for event in engine.events:
        p = dict(event.payload)
        p.pop("state_after", None)
        detail = ""
        if event.kind == "dice_rolled":
            detail = f"{p['player']} rolled {p['value']}"
        elif event.kind == "moved":
            via = f" via {p['via']}" if p.get("via") else ""
            detail = f"{p['player']} {p['from']} -> {p['to']}{via}"
            if p.get("won"):
                detail += "  ** wins **"
        elif event.kind == "word_prompted":
            detail = f"cell {p['cell']}: '{p['word_fa']}' -> ? ({p['emotion']})"
        elif event.kind == "expression_attempt":
            detail = f"showed {p['top']} (needed {p['expected']}, prob {p['prob']:.2f})"
        elif event.kind == "retry_requested":
            detail = f"retry #{p['retry_count']} for {p['expected']}"
        elif event.kind == "expression_passed":
            detail = p["expected"] + (" (operator override)" if p["overridden"] else "")
        elif event.kind == "word_taught":
            detail = f"taught '{p['word_en']}'"
        print(f"{event.seq:3d}  {event.kind:20s} {detail}")

    replayed = replay(engine.events)
    print(f"\nreplay(log) == live state: {replayed == state}")


if __name__ == "__main__":
    main()
