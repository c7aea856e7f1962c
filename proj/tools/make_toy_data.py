"""Writes the toy dataset under data/toy: a 6x8 grid of unit-population
precincts in four counties, four elections, a reference plan and a config."""

import csv
import json
import math
import pathlib

ROWS, COLS = 6, 8
ELECTIONS = ["16PR", "18GOV", "20PR", "20USS"]


def unit_id(r, c):
    return f"p{r}{c}"


def main():
    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "toy"
    out.mkdir(parents=True, exist_ok=True)
    units, edges = [], []
    for r in range(ROWS):
        for c in range(COLS):
            # Democratic strength rises to the north-east with a ripple.
            lean = 0.30 + 0.35 * (c / (COLS - 1)) + 0.1 * (r / (ROWS - 1)) + 0.05 * math.sin(r * 1.7 + c)
            votes = {}
            for k, e in enumerate(ELECTIONS):
                share = min(0.95, max(0.05, lean + 0.02 * (k - 1.5)))
                turnout = 400 + 10 * ((r * 7 + c * 3 + k) % 5)
                d = round(share * turnout)
                votes[e] = {"d": d, "r": turnout - d}
            tvap = 800
            bvap = round(tvap * min(0.9, max(0.05, lean - 0.1)))
            units.append({
                "id": unit_id(r, c),
                "pop": 1000,
                "area": 1.0,
                "ext_perim": float((r == 0) + (r == ROWS - 1) + (c == 0) + (c == COLS - 1)),
                "county": f"county{c // 2}",
                "bvap": bvap,
                "tvap": tvap,
                "votes": votes,
            })
            if c + 1 < COLS:
                edges.append([unit_id(r, c), unit_id(r, c + 1), 1.0])
            if r + 1 < ROWS:
                edges.append([unit_id(r, c), unit_id(r + 1, c), 1.0])
    (out / "graph.json").write_text(json.dumps({"units": units, "edges": edges}, indent=1) + "\n")

    # Four 12-cell districts: column pairs (one county each).
    with open(out / "reference_plan.csv", "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(["unit_id", "district"])
        for r in range(ROWS):
            for c in range(COLS):
                w.writerow([unit_id(r, c), c // 2])

    config = {
        "graph": "graph.json",
        "initial_plan": "reference_plan.csv",
        "reference_plan": "reference_plan.csv",
        "out": "../../out/toy",
        "num_districts": 4,
        "pop_tolerance": 0.1,
        "max_county_splits": 3,
        "w": 0.5,
        "gammas": [0.0, 0.5, 1.0],
        "steps": 20000,
        "subsample_every": 10,
        "swap_interval": 20,
        "checkpoint_every": 5000,
        "seed": 7,
        "reservoir": {"chains": 2, "steps": 20000, "subsample_every": 10, "burn_in_fraction": 0.1},
        "analysis": {
            "low_ranks": [1, 2],
            "high_ranks": [3],
            "top_democratic": 1,
            "swing_window": [0.54, 0.60],
            "vra": {"c": 1.0, "required_districts": 1, "min_passing_elections": 3,
                    "black_candidate": ["18GOV", "20USS"], "bvap_floor": 0.45},
        },
    }
    (out / "config.json").write_text(json.dumps(config, indent=1) + "\n")


if __name__ == "__main__":
    main()
