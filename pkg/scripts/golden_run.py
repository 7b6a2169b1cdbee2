"""The repository's golden verification run: seed 42, all suites.

Writes the machine report and human summary to the output directory and
prints the per-check verdicts.  Exit status follows the suite (0 = all
checks pass, 1 = some check failed).

Usage: python scripts/golden_run.py [outdir]
"""

import pathlib
import sys
import time

from opfam.verify import ScenarioConfig, run_suite


def main() -> int:
    outdir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "out/golden")
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    bundle = run_suite(ScenarioConfig(seed=42, out_dir=str(outdir)))
    elapsed = time.perf_counter() - t0
    for r in bundle.results:
        print(f"[{r.verdict:>12}] {r.check_id}")
    counts = bundle.counts()
    print(
        f"\n{counts['pass']} pass, {counts['fail']} fail, "
        f"{counts['inconclusive']} inconclusive in {elapsed:.1f}s"
    )
    print(f"report: {outdir / 'report.txt'}")
    print(f"summary: {outdir / 'summary.txt'}")
    return bundle.exit_code


if __name__ == "__main__":
    sys.exit(main())
