# %% [markdown]
# # Command line
#
# The `elemental` command wraps the library.  Here it is driven through
# subprocess so the script stays self-contained.

# %%
import subprocess
import sys
import tempfile
from pathlib import Path


def elemental(*args):
    out = subprocess.run([sys.executable, "-m", "elemental", *args], capture_output=True, text=True)
    print(out.stdout[:600] or out.stderr)
    return out.returncode


# %%
tmp = Path(tempfile.mkdtemp())
elemental("sample", "--n", "8", "--xi", "0.5", "--reps", "2", "--seed", "1", "--out", str(tmp / "s.csv"))
elemental("estimate", "--data", str(tmp / "s.csv"), "--baselines")

# %%
print("exit", elemental("verify", "--n", "4"))

# %%
elemental("experiment", "bias", "--n", "5", "--reps", "2000", "--xi-grid", "-2:2:3")
