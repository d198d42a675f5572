#!/usr/bin/env python3
"""Regenerates fixtures/questionnaires/*.csv.

The published study reports only aggregates, so these tables are engineered
to hit them: 25 participants, 3 trials each, UEQ scale sums chosen so the
scale means land on the reported values.
"""
import csv
import random
import statistics
import sys
from pathlib import Path

N = 25
RNG = random.Random(2025)

UEQ_SCALES = {
    "Attractiveness": [1, 12, 14, 16, 24, 25],
    "Perspicuity": [2, 4, 13, 21],
    "Efficiency": [9, 20, 22, 23],
    "Dependability": [8, 11, 17, 19],
    "Stimulation": [5, 6, 7, 18],
    "Novelty": [3, 10, 15, 26],
}
UEQ_REVERSED = {3, 4, 5, 9, 10, 12, 17, 18, 19, 21, 23, 24, 25}
# scale -> (sum of keyed answers over all respondents and items, target sd of respondent means)
UEQ_TARGETS = {
    "Attractiveness": (286, 0.75),
    "Perspicuity": (189, 0.89),
    "Efficiency": (91, 0.85),
    "Dependability": (121, 0.95),
    "Stimulation": (190, 0.73),
    "Novelty": (172, 0.89),
}


def spread(total, count, lo, hi, target_sd, scale=1.0, steps=20000):
    """Integers in [lo, hi] summing to total whose sd/scale approaches target_sd."""
    base, extra = divmod(total, count)
    vals = [base + (1 if i < extra else 0) for i in range(count)]
    best = abs(statistics.stdev(vals) / scale - target_sd)
    for _ in range(steps):
        i, j = RNG.randrange(count), RNG.randrange(count)
        d = RNG.choice([1, 2])
        if i == j or vals[i] + d > hi or vals[j] - d < lo:
            continue
        vals[i] += d
        vals[j] -= d
        err = abs(statistics.stdev(vals) / scale - target_sd)
        if err <= best:
            best = err
        else:
            vals[i] -= d
            vals[j] += d
    RNG.shuffle(vals)
    return vals


def split_sum(total, items):
    """Keyed answers in [-3, 3] for one respondent, summing to total."""
    k = len(items)
    vals = [total // k] * k
    for i in range(total - sum(vals)):
        vals[i] += 1
    for _ in range(3):
        i, j = RNG.randrange(k), RNG.randrange(k)
        if i != j and vals[i] < 3 and vals[j] > -3:
            vals[i] += 1
            vals[j] -= 1
    return vals


def write(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main(out_dir):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    pids = [f"p{i:02d}" for i in range(1, N + 1)]

    # SUS: 767 adjusted points over 25 people -> mean 76.70
    totals = spread(767, N, 0, 40, 12.0 / 2.5)
    sus_rows = []
    for pid, t in zip(pids, totals):
        adj = [t // 10] * 10
        for i in range(t - sum(adj)):
            adj[i] += 1
        raw = [a + 1 if i % 2 == 0 else 5 - a for i, a in enumerate(adj)]
        sus_rows.append([pid] + raw)
    write(out / "sus.csv", ["participant"] + [f"q{i}" for i in range(1, 11)], sus_rows)

    # UEQ
    answers = {pid: [0] * 26 for pid in pids}
    for scale, items in UEQ_SCALES.items():
        total, sd = UEQ_TARGETS[scale]
        k = len(items)
        sums = spread(total, N, -3 * k, 3 * k, sd, scale=k)
        for pid, s in zip(pids, sums):
            for item, keyed in zip(items, split_sum(s, items)):
                answers[pid][item - 1] = 4 - keyed if item in UEQ_REVERSED else keyed + 4
    write(out / "ueq.csv", ["participant"] + [f"i{i}" for i in range(1, 27)],
          [[pid] + answers[pid] for pid in pids])

    # Ad-hoc 1: one row per trial, 1..10
    like = spread(646, 3 * N, 1, 10, 1.38)
    coh = spread(621, 3 * N, 1, 10, 1.27)
    rows = []
    for n in range(3 * N):
        rows.append([pids[n // 3], n % 3 + 1, like[n], coh[n]])
    write(out / "adhoc1.csv", ["participant", "trial", "likability", "coherence"], rows)

    # Ad-hoc 2
    comfort = ["fully"] * 11 + ["pretty"] * 9 + ["moderately"] * 4 + ["slightly"]
    stickers = ["yes"] * 20 + ["no"] * 5
    turns = ["yes"] * 18 + ["no"] * 7
    needed = [""] * 18 + ["5", "5", "5", "5", "5", "4", "6"]
    enjoy = spread(225, N, 1, 10, 1.67)
    again = ["yes"] * 21 + ["no"] * 4
    audience = (
        [["under 10"]] * 5
        + [["under 10", "10-20"]] * 12
        + [["20-30", "30-50"]] * 2
        + [["20-30"], ["30-50"], ["20-30"], ["30-50"]]
        + [["50-70", "over 70"], ["over 70"]]
    )
    changes = ["faster movements", "more turns", "more stickers", "quicker answers", ""]
    for col in (comfort, stickers, again, audience):
        RNG.shuffle(col)
    order = list(range(N))
    RNG.shuffle(order)
    rows = []
    for n, pid in enumerate(pids):
        t = order[n]
        rows.append([pid, comfort[n], stickers[n], "" if stickers[n] == "yes" else "12", turns[t], needed[t],
                     ";".join(audience[n]), enjoy[n], changes[n % len(changes)], again[n]])
    write(out / "adhoc2.csv",
          ["participant", "comfort", "stickers_enough", "stickers_needed", "turns_enough", "turns_needed",
           "audience", "enjoyment", "change", "play_again"], rows)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "fixtures" / "questionnaires")
