"""
Driving the command line from Python
====================================

Every subcommand is reachable through ``mmmm.cli.main`` with an argv list,
which is handy in notebooks. The same calls work from a shell as ``mmmm ...``.
"""

import json
import os
import tempfile

from mmmm.cli import main

# Distribution at t = 0.5 from an empty one-server system, as JSON.
main(["transient", "--lambda0", "0.4", "--mu", "0.1", "--m", "1", "--t", "0.5", "--method", "exact"])

# The series method reports its truncation order and operation counts.
main(["transient", "--lambda0", "2", "--mu", "1", "--m", "10", "--t", "0.1",
      "--method", "series", "--tol", "1e-3", "--output", "csv", "--precision", "4"])

# Regenerate a truncation table into a file.
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "table_b.csv")
    main(["experiment", "--table", "B", "--out", path])
    with open(path) as fh:
        print(fh.read().splitlines()[:4])

# Compare the large-m approximations with the reference integrator.
main(["compare", "--lambda0", "25", "--mu", "1", "--m", "50", "--n0", "0",
      "--t", "0.5,1,2", "--n", "25,50", "--methods", "asymptotic,infinite", "--precision", "3"])

# Invalid requests return exit code 2 with a message on stderr.
code = main(["transient", "--lambda0", "1", "--mu", "1", "--m", "3", "--t", "1", "--method", "exact"])
print("exit code", code)

# Stationary law as JSON, parsed back.
import contextlib
import io

buf = io.StringIO()
with contextlib.redirect_stdout(buf):
    main(["stationary", "--lambda0", "0.4", "--mu", "0.1", "--m", "2"])
print(json.loads(buf.getvalue())["erlang_b"])
