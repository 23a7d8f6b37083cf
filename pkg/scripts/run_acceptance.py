"""Run the acceptance criteria outside pytest, one PASS/FAIL line each."""

import runpy
from pathlib import Path

if __name__ == "__main__":
    runpy.run_path(str(Path(__file__).resolve().parent.parent / "tests" / "test_acceptance.py"), run_name="__main__")
