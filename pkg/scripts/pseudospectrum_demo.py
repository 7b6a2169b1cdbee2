"""Render the asymptotic-pseudospectrum phenomenon for the flip family.

The family [[0, 1], [h, 0]] has per-h eigenvalues at +-sqrt(h), yet its
family spectrum collapses to the origin: every fixed nonzero lambda keeps
a uniformly invertible tail.  The scan writes CSV/PGM/SVG renderings plus
a per-point probe table along the real axis.

Usage: python scripts/pseudospectrum_demo.py [outdir]
"""

import pathlib
import sys

from opfam.emit import emit_plot
from opfam.families import HGrid
from opfam.spectra import family_spectrum_grid, probe_resolvent, spectral_radius_bound
from opfam.verify import pseudospectrum_family


def main() -> int:
    outdir = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "out/pseudospectrum")
    outdir.mkdir(parents=True, exist_ok=True)
    grid = HGrid()
    fam = pseudospectrum_family()

    scan = family_spectrum_grid(fam, (-2, 2, -2, 2), 128, 128, grid)
    for fmt in ("csv", "pgm", "svg"):
        emit_plot(scan, fmt, str(outdir / f"flip_spectrum.{fmt}"))
    print("cells:", scan.counts())

    bound = spectral_radius_bound(fam, grid)
    print(f"spectral radius bound: {bound.value:.3e}")

    print(f"{'lambda':>8} {'class':>12} {'min tail sigma':>16}")
    for lam in (0.0, 0.05, 0.2, 0.5, 1.0):
        probe = probe_resolvent(fam, lam, grid)
        print(f"{lam:>8.2f} {probe.classification:>12} {probe.tail_sigma.min():>16.3e}")
    print(f"renderings written to {outdir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
