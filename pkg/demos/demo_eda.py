"""Exploratory look at the Auto MPG data: correlation matrix, feature
distributions, and the efficiency class balance.

Run:  python3 demos/demo_eda.py
"""

from mpgworkbench.experiments import ExperimentConfig, run_eda


def main():
    eda = run_eda(ExperimentConfig())

    labels = eda["correlation"]["labels"]
    print("Correlation matrix (pairwise Pearson, after median imputation)")
    print(f"{'':>14}" + "".join(f"{lab[:6]:>8}" for lab in labels))
    for lab, row in zip(labels, eda["correlation"]["values"]):
        print(f"{lab:>14}" + "".join(f"{v:8.3f}" for v in row))

    print("\nStrongest mpg relationships:")
    mpg_row = eda["correlation"]["values"][labels.index("mpg")]
    pairs = sorted(zip(labels, mpg_row), key=lambda p: -abs(p[1]))
    for name, r in pairs[1:4]:
        print(f"  mpg vs {name}: r = {r:+.3f}")

    counts = eda["class_counts"]
    total = counts["high_efficiency"] + counts["low_efficiency"]
    print(f"\nEfficiency classes (threshold 25 mpg): "
          f"{counts['low_efficiency']} low / {counts['high_efficiency']} high "
          f"of {total} cars")

    print("\nmpg distribution (10 bins):")
    h = eda["distributions"]["mpg"]
    peak = max(h["counts"])
    for i, count in enumerate(h["counts"]):
        bar = "#" * round(40 * count / peak)
        print(f"  [{h['edges'][i]:5.1f}, {h['edges'][i + 1]:5.1f})  {count:3d}  {bar}")


if __name__ == "__main__":
    main()
