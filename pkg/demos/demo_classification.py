"""High/low fuel-efficiency classification (threshold 25 mpg): the
C-grid over SVM kernels and logistic regression, plus a decision tree,
with ROC AUC for the reported configurations.

Run:  python3 demos/demo_classification.py
"""

from mpgworkbench.experiments import ExperimentConfig, run_classification_grid


def main():
    grid = run_classification_grid(ExperimentConfig())

    header = f"{'Model':<32} {'Acc':>6} {'P0':>6} {'R0':>6} {'F1_0':>6} {'P1':>6} {'R1':>6} {'F1_1':>6}"
    print(header)
    print("-" * len(header))
    for row in grid["table"]:
        c0, c1 = row["class0"], row["class1"]
        print(f"{row['model']:<32} {row['accuracy']:6.3f} "
              f"{c0['precision']:6.3f} {c0['recall']:6.3f} {c0['f1']:6.3f} "
              f"{c1['precision']:6.3f} {c1['recall']:6.3f} {c1['f1']:6.3f}")

    print("\nROC AUC:")
    for key, curve in sorted(grid["roc"].items()):
        print(f"  {key:<22} {curve['auc']:.3f}")

    print(f"\nNote: {grid['class_summaries']['note']}.")


if __name__ == "__main__":
    main()
