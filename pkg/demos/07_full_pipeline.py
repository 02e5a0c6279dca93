#!/usr/bin/env python3
"""End-to-end pipeline on the Sanov generators: analyze the ambient ball, then
search annuli for a certified free generating set.

The annulus search is honest. At desk scale the anchored filter pins every
candidate's attracting data inside one epsilon-ball, so the packed sets fail the
center-separation rule of the certificate and the run reports search exhaustion
with the per-round reasons instead of inventing a pass.
"""

import json
import pathlib
import tempfile

from slnlab import SearchExhausted, cmd_analyze, cmd_build_semigroup, cmd_certify, load_generators
from slnlab.pipeline import PipelineConfig

workdir = pathlib.Path(tempfile.mkdtemp(prefix="slnlab-demo-"))
gens_path = workdir / "sanov.json"
gens_path.write_text(json.dumps({
    "n": 2,
    "generators": [
        {"matrix": [[1, 2], [0, 1]], "exact": [["1", "2"], ["0", "1"]]},
        {"matrix": [[1, 0], [2, 1]], "exact": [["1", "0"], ["2", "1"]]},
    ],
}))

config = PipelineConfig.from_dict({
    "generators_path": str(gens_path),
    "n": 2,
    "target_delta": 0.05,
    "epsilon": 0.05,
    "radius": 9,
    "seed": 7,
    "output_dir": str(workdir / "out"),
    "budgets": {"samples": 1200, "nodes": 10**7},
})

print("== analyze ==")
report = cmd_analyze(config)
print(f"records {report['records']}, delta_hat {report['delta_hat']:.4f}")
print("outputs:", sorted(p.name for p in (workdir / "out").iterdir()))

print("\n== build-semigroup ==")
try:
    cert, rep = cmd_build_semigroup(config)
    print("outcome: pass; checklist:", rep["checklist"])
except SearchExhausted as e:
    print("outcome: search exhausted -", e)
    rounds = json.loads((workdir / "out" / "report.json").read_text())["rounds"]
    for r in rounds:
        print("  round", r["attempt"], "->", r.get("failure", "ok"))

print("\n== certify an explicit strong pair instead ==")
strong_path = workdir / "strong.json"
strong_path.write_text(json.dumps({
    "n": 2,
    "generators": [
        {"matrix": [[148, 0], [0, 1 / 148]], "exact": [["148", "0"], ["0", "1/148"]]},
        {"matrix": [[350473 / 3700, 65709 / 925], [65709 / 925, 49288 / 925]],
         "exact": [["350473/3700", "65709/925"], ["65709/925", "49288/925"]]},
    ],
}))
cert = cmd_certify(load_generators(str(strong_path)), epsilon=0.1, exact_check=8)
print("verdict:", cert.verdict, "| crosscheck collisions:",
      cert.exact_crosscheck.collisions if cert.exact_crosscheck else "n/a")
print("\nworkdir:", workdir)
