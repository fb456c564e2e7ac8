"""Fully coupled flow, heat and deformation around an impermeable fault.

Hot water is injected at the base of a saturated block; the top drains.
An inclined fault blocks both the seepage and the convected heat, so
pressure and temperature build up beneath it and jump across it.  The
three fields solve monolithically; the heat equation is nonlinear because
the convective velocity comes from the current pressure gradient.
"""

import numpy as np
import yaml

from xthm.benchmarks.cases import inclined_fault_config
from xthm.config import parse_config
from xthm.runner import run_config

cfg_dict = inclined_fault_config(45.0, nx=31)  # coarse twin of the benchmark
cfg = parse_config(yaml.safe_dump(cfg_dict))
rep = run_config(cfg, None)

t = rep.probe_times
dp = rep.probe_values["low.p"] - rep.probe_values["up.p"]
dT = rep.probe_values["low.T"] - rep.probe_values["up.T"]
print("time [s]   dp across fault [kPa]   dT across fault [C]")
for k in range(0, len(t), 4):
    print(f"{t[k]:8.0f}   {dp[k] / 1e3:14.2f}   {dT[k]:14.3f}")
print(
    "the pressure jump settles once seepage reorganizes around the fault; "
    "the temperature jump peaks when the hot front arrives and decays as "
    "convection wraps around the tips"
)
