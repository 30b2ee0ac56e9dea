"""
Driving the pipeline from the command line
==========================================

The same computations are available through ``bellrecon``. Here the entry
point is called in-process and its CSV output is read back.
"""

import csv
import io
import tempfile
from contextlib import redirect_stdout
from pathlib import Path

from bellrecon.cli import main

buf = io.StringIO()
with redirect_stdout(buf):
    main(["--command", "pipeline", "--j", "1", "--b1", "0.5", "--b2", "0.5",
          "--n", "1", "--s", "1", "--theta", "90", "--degrees", "--t", "0.5", "--format", "csv"])
for key, value in csv.reader(io.StringIO(buf.getvalue())):
    if "fidelity" in key:
        print(key, value)

with tempfile.TemporaryDirectory() as tmp:
    out = Path(tmp) / "grid.csv"
    main(["--command", "sweep-theta-delta", "--n", "1", "--theta-steps", "3",
          "--delta-steps", "3", "--format", "csv", "--out", str(out)])
    print(out.read_text())
