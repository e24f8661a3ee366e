"""Scenario files and the command-line front end.

Shell equivalents:

    diffdrive simulate-regulate --scenario scenarios/parking.yaml --out run.csv
    diffdrive simulate-track --scenario scenarios/circle_tracking.yaml --format summary
    diffdrive design-gains --xi 1 --omega-n 1 --v-ref 0.5
    diffdrive check-stability --k-r 0.4 --k-etheta 2 --k-thetaE -1
"""
# %%
import tempfile
from pathlib import Path

from diffdrive import load_scenario, run
from diffdrive.cli import main
from diffdrive.output import summary_dict

root = Path(__file__).resolve().parent.parent / "scenarios"
cfg = load_scenario(root / "circle_tracking.yaml", overrides=["design.omega_n=1.5"])
print(cfg.design, cfg.max_time)
print(summary_dict(run(cfg)))

# %% analysis subcommands print straight to stdout
main(["design-gains", "--xi", "0.7", "--omega-n", "2", "--v-ref", "1", "--omega-ref", "1"])
main(["check-stability", "--k-r", "1", "--k-etheta", "1", "--k-thetaE", "-1"])

# %% a small sweep over k_r, one summary file per value
with tempfile.TemporaryDirectory() as tmp:
    main(["simulate-regulate", "--scenario", str(root / "parking.yaml"),
          "--out", f"{tmp}/reg.json", "--format", "summary", "--sweep", "gains.k_r=0.2:0.2:0.8"])
