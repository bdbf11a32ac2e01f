# !/env/bin/python

import os
import sys

import pytest

# Below are some sensible defaults for running tests which
# should improve overall developer experience.
DEFAULT_OPTS = [
    # Increase verbosity (so pytest-clarity kicks in)
    "-vv",
    # --last-failed: Run only the tests that failed in the last run
    "--lf",
    # Capture stdout and stderr
    "-s",
]

# Training and BPO-sized runs take minutes; RUN_SLOW=1 includes them
if os.getenv("RUN_SLOW", "") not in ("1", "true"):
    DEFAULT_OPTS += ["-m", "not slow"]

# Add the project root to the Python path
# so absolute imports work
sys.path.append(".")

args = DEFAULT_OPTS + sys.argv[1:]
print("Running pytest with the following args:", args)

sys.exit(pytest.main(args=args))
