"""Scripted stand-in for an analysis engine, used by the bridge tests.

usage: fake_engine.py [ok|garbled|crash|hang|reject|noroot]

In ``ok`` mode it answers ``analyze`` with every empty point, one visit per
point plus extra visits on the first, a fixed root win-rate of 0.625 and an
ownership map with a few awkward floats.
"""

import sys

COLUMNS = "ABCDEFGHJKLMNOPQRST"
OWNERSHIP_SAMPLES = [0.1, -0.30000000000000004, 1.0, -1.0, 0.0, 1e-17, 0.3333333333333333]


def main():
    mode = sys.argv[1] if len(sys.argv) > 1 else "ok"
    size = 5
    occupied = set()
    played = 0
    for line in sys.stdin:
        parts = line.split()
        if not parts:
            continue
        cmd = parts[0]
        if cmd == "quit":
            print("=\n", flush=True)
            return
        if cmd == "boardsize":
            size = int(parts[1])
            occupied = set()
        elif cmd == "clear_board":
            occupied = set()
            played = 0
        elif cmd == "play":
            if mode == "reject":
                print("? illegal move\n", flush=True)
                continue
            if parts[2].lower() != "pass":
                occupied.add(parts[2].upper())
            played += 1
            if mode == "crash" and played >= 2:
                sys.exit(1)
        elif cmd == "analyze":
            if mode == "hang":
                sys.stdin.readline()
                return
            if mode == "garbled":
                print("= info move Z99 visits many\n", flush=True)
                continue
            lines = ["="]
            empties = [f"{COLUMNS[c]}{r}" for r in range(size, 0, -1) for c in range(size)
                       if f"{COLUMNS[c]}{r}" not in occupied]
            for i, v in enumerate(empties):
                visits = 10 if i == 0 else 1
                lines.append(f"info move {v} visits {visits} winrate 0.5 prior 0.01 order {i}")
            if mode != "noroot":
                lines.append("root visits 99 winrate 0.625 scoreLead 1.5")
            lines.append("ownership " + " ".join(repr(OWNERSHIP_SAMPLES[i % len(OWNERSHIP_SAMPLES)])
                                                 for i in range(size * size)))
            lines.append("version fake-1")
            print("\n".join(lines) + "\n", flush=True)
            continue
        print("=\n", flush=True)


if __name__ == "__main__":
    main()
