"""
The three reference scenarios over a full year
==============================================

Solves each reference scenario for one year at the 3-hour step (about a
minute each on a laptop) and writes the report directories under
``output/``. Pass ``--overwrite`` to replace earlier runs.
"""
import sys

from dhdispatch.config import load_config, reference_config_path
from dhdispatch.report import run_scenario

overwrite = "--overwrite" in sys.argv
rows = []
for name in ("scenario1", "scenario2", "scenario3"):
    cfg = load_config(reference_config_path(name))
    report = run_scenario(cfg, overwrite=overwrite)
    s = report.solution
    rows.append((name, s.heat_total("wte") / 1e3, s.heat_total("ccgt") / 1e3, s.heat_total("wood") / 1e3,
                 s.curtailment_total / 1e3, report.system_emissions))
    print("wrote", cfg.run.output_dir)

print("%-10s %8s %8s %8s %10s %14s" % ("scenario", "WtE", "CCGT", "wood", "curtailed", "system t CO2"))
for r in rows:
    print("%-10s %8.1f %8.1f %8.1f %10.1f %14.0f" % r)
