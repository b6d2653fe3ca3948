"""Bundled reference topology and ready-to-run experiment documents.

The nine-site reference network (sites A..I mapped to ids 0..8) is the
one used in the one-hop walkthrough tests and demos::

    E(4)   H(7)
      \\     |
       G(6)-I(8)
        |
       B(1)-C(2)-A(0)-D(3)-F(5)

:func:`write_fixtures` drops the topology plus a handful of experiment
configs (threshold sweeps, an oscillation comparison, the walkthrough
run) into a directory; they are plain config documents for the CLI.
"""

from __future__ import annotations

import json
from pathlib import Path

from .topology import Topology, build_topology

FIG3_SITE_NAMES = "ABCDEFGHI"

_REFERENCE_LINKS = [
    [0, 2, 1.0],
    [2, 1, 1.0],
    [1, 6, 1.0],
    [6, 7, 1.0],
    [6, 8, 1.0],
    [6, 4, 1.0],
    [0, 3, 1.0],
    [3, 5, 1.0],
]


def reference_topology_dict() -> dict:
    return {"n": 9, "links": [list(link) for link in _REFERENCE_LINKS]}


def _dump_topology_doc(doc: dict) -> str:
    # keep each link on one line instead of json.dumps' one-number-per-line
    lines = ",\n".join(f"    {json.dumps(link)}" for link in doc["links"])
    return f'{{\n  "n": {doc["n"]},\n  "links": [\n{lines}\n  ]\n}}\n'


def reference_topology() -> Topology:
    return build_topology(9, _REFERENCE_LINKS)


def site_name(site: int) -> str:
    return FIG3_SITE_NAMES[site]


def _complete_topology_dict(n: int) -> dict:
    return {"n": n, "links": [[a, b, 1.0] for a in range(n) for b in range(a + 1, n)]}


def residency_vs_xs_sweep(t: int, n: int = 5, num_steps: int = 100_000, replications: int = 3) -> dict:
    """Sweep x_s at a fixed threshold: the residency-versus-skew curve."""
    return {
        "topology": _complete_topology_dict(n),
        "policy": {"name": "threshold", "t": t},
        "workload": {"x_s": 0.2},
        "num_steps": num_steps,
        "seed": 1,
        "sweep": {
            "axis": "x_s",
            "values": [round(0.1 * k, 1) for k in range(1, 10)],
            "replications": replications,
        },
        "output": {"metrics": f"residency_vs_xs_t{t}.csv"},
    }


def residency_vs_t_sweep(x_s: float, n: int = 5, num_steps: int = 100_000, replications: int = 3) -> dict:
    """Sweep the threshold at a fixed skew: convergence toward the hot site."""
    return {
        "topology": _complete_topology_dict(n),
        "policy": {"name": "threshold", "t": 0},
        "workload": {"x_s": x_s},
        "num_steps": num_steps,
        "seed": 1,
        "sweep": {
            "axis": "t",
            "values": [0, 1, 2, 3, 5, 7, 10, 15, 20, 30],
            "replications": replications,
        },
        "output": {"metrics": f"residency_vs_t_xs{int(round(x_s * 100)):03d}.csv"},
    }


def walkthrough_run() -> dict:
    """One fragment starting at A, workload on E, G, H, I; nna walks it to G."""
    row = [0.0] * 9
    for site in (4, 6, 7, 8):
        row[site] = 0.25
    return {
        "topology": "fig3.json",
        "policy": {"name": "nna"},
        "workload": {"probs": row},
        "initial_owners": 0,
        "num_steps": 200,
        "seed": 7,
        "output": {"metrics": "walkthrough_metrics.csv", "decisions": "walkthrough_decisions.csv"},
    }


def oscillation_compare_run(period: int = 50, num_steps: int = 10_000, num_fragments: int = 10) -> dict:
    """Hot mass flipping between the adjacent sites G and H every ``period`` events.

    Ten fragments follow the same alternating profile, so the aggregate
    migration count is what separates the policies: summing independent
    fragments washes out the occasional fragment whose counters drift far
    enough that the nearest-neighbour race goes quiet.
    """
    return {
        "topology": "fig3.json",
        "policy": {"name": "nna"},
        "fragments": {"count": num_fragments},
        "workload": {"x_s": 0.8, "hot": 6, "oscillation": {"site_a": 6, "site_b": 7, "period": period}},
        "initial_owners": 0,
        "num_steps": num_steps,
        "designated": 6,
        "seed": 1,
    }


def write_fixtures(out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    documents = {
        "fig3.json": reference_topology_dict(),
        "residency_vs_xs_t0.json": residency_vs_xs_sweep(0),
        "residency_vs_xs_t3.json": residency_vs_xs_sweep(3),
        "residency_vs_xs_t10.json": residency_vs_xs_sweep(10),
        "residency_vs_t_xs028.json": residency_vs_t_sweep(0.28),
        "residency_vs_t_xs012.json": residency_vs_t_sweep(0.12),
        "walkthrough.json": walkthrough_run(),
        "oscillation_compare.json": oscillation_compare_run(),
    }
    written = []
    for name, doc in documents.items():
        path = out / name
        if name == "fig3.json":
            path.write_text(_dump_topology_doc(doc))
        else:
            path.write_text(json.dumps(doc, indent=2) + "\n")
        written.append(path)
    return written
