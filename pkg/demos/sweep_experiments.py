"""Run the bundled sweep experiments and skim their CSV output.

Three one-axis experiments, each swept through the same machinery the
command-line `fragsim sweep` uses, with per-cell rows and per-value
means landing in demos/out/:

  fragment size 0.5 -> 8   bigger payloads make each migration slower
  query rate 0.25 -> 1.0   busier sites accumulate more response cost
  active sites 2 -> 8      wider request spread leaves the owner remote
                           more often
"""

import csv
import json
from pathlib import Path

from fragsim import reference_topology_dict
from fragsim.cli import main

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)


def sweep(name, doc, column):
    cfg = OUT / f"{name}.json"
    cfg.write_text(json.dumps(doc, indent=2))
    out_dir = OUT / name
    main(["sweep", "--config", str(cfg), "--out", str(out_dir)])
    with open(out_dir / "sweep.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    print(f"\n{name}: {len(rows)} rows -> {out_dir / 'sweep.csv'}")
    seen = set()
    for row in rows:
        if row["axis_value"] in seen:
            continue
        seen.add(row["axis_value"])
        print(f"  {row['axis']} = {row['axis_value']:>5}   mean {column} = {float(row['mean_' + column]):.2f}")


base = {
    "topology": reference_topology_dict(),
    "policy": {"name": "nna"},
    "workload": {"x_s": 0.6, "hot": 6},
    "num_steps": 20_000,
    "seed": 5,
}

sweep(
    "fragment_size",
    {**base, "sweep": {"axis": "fragment_size", "values": [0.5, 2, 8], "replications": 3}},
    "avg_move_time",
)
sweep(
    "query_rate",
    {**base, "sweep": {"axis": "rate", "values": [0.25, 0.5, 1.0], "replications": 3}},
    "response_cost",
)
sweep(
    "active_sites",
    {
        "topology": {"n": 9, "links": [[a, b, 1.0] for a in range(9) for b in range(a + 1, 9)]},
        "policy": {"name": "threshold", "t": 0},
        "workload": {"x_s": 1 / 9},
        "num_steps": 20_000,
        "seed": 5,
        "sweep": {"axis": "active_count", "values": [2, 3, 5, 8], "replications": 3},
    },
    "response_cost",
)
