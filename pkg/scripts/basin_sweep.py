"""Basin sweep of the hemophilia operator with CSV and heatmaps for all slices.

    python scripts/basin_sweep.py --grid 10 --workers 8 --outdir results/sweep
"""
import argparse
from pathlib import Path

from gonosomal import analysis, output
from gonosomal.operators import hemophilia_operator


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=10)
    ap.add_argument("--eps", type=float, default=1e-4)
    ap.add_argument("--max-iter", type=int, default=100_000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--outdir", type=Path, default=Path("results/sweep"))
    args = ap.parse_args()

    args.outdir.mkdir(parents=True, exist_ok=True)
    records = analysis.basin_sweep(hemophilia_operator(), args.grid, args.eps, args.max_iter, args.workers)
    (args.outdir / f"sweep_grid{args.grid}.csv").write_text(output.sweep_csv(records))
    for name in output.SLICES:
        tag = name.replace("=", "eq")
        (args.outdir / f"heatmap_grid{args.grid}_{tag}.svg").write_text(output.sweep_svg(records, args.grid, name))

    summary = output.summarise_sweep(records)
    print(f"{summary['converged']}/{summary['points']} converged, max iterations {summary['max_iterations']}")
    slowest = sorted((r for r in records if r.iterations_to_eps is not None), key=lambda r: -r.iterations_to_eps)[:5]
    for r in slowest:
        print(f"  {r.iterations_to_eps:>7d}  from {tuple(str(c) for c in r.initial)}")
    for row in summary["not_reached"]:
        print(f"  not reached: {row}")


if __name__ == "__main__":
    main()
