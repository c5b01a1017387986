"""
Scenario files and the command line
===================================

Write a scenario file, run ``solve`` and ``sweep`` through the CLI entry
point and read the CSV output back.
"""

import csv
import pathlib
import tempfile

from dynastic_olg.cli import main

SCENARIO = """\
name = baseline
gamma1 = 1.0
gamma_ph = 0.5
gamma2 = 1.0
gamma_c = 0.9
alpha = 0.4
tau = 0.3
phi = 0.1
wbar = 1.0
eps = 0.2
eta = 0.2
theta = 0.2
R = 1.5
bequest = zero
"""

work = pathlib.Path(tempfile.mkdtemp())
config = work / "baseline.cfg"
config.write_text(SCENARIO)

code = main(["solve", "--config", str(config), "--out", str(work / "solve.csv")])
print("solve exit code:", code)
print((work / "solve.csv").read_text().splitlines()[0])  # schema line

code = main(["sweep", "--config", str(config), "--param", "phi",
             "--from", "0.05", "--to", "0.3", "--steps", "6", "--out", str(work / "phi.csv")])
lines = (work / "phi.csv").read_text().splitlines()[1:]
for row in csv.DictReader(lines):
    print(row["param_value"], row["status"], row["n"])

# a broken file exits with code 2 and a one-line reason on stderr
config.write_text(SCENARIO.replace("alpha = 0.4", "alpha = lots"))
print("bad config exit code:", main(["solve", "--config", str(config), "--out", str(work / "x.csv")]))
