"""Seven-model regression comparison on the Auto MPG data.

70/30 split at seed 1, features and target standardized with training
statistics, hyperparameters tuned by 10-fold CV on the training split.
Metrics are in standardized target units.

Run:  python3 demos/demo_regression.py        (takes a few seconds)
"""

from mpgworkbench.experiments import ExperimentConfig, run_regression_suite


def main():
    suite = run_regression_suite(ExperimentConfig())

    header = f"{'Model':<26} {'MAE':>7} {'MSE':>7} {'RMSE':>7} {'R2':>7} {'AdjR2':>7} {'CV R2':>7}"
    print(header)
    print("-" * len(header))
    for row in suite["table"]:
        cv = f"{row['cv_mean_r2']:7.3f}" if row["cv_mean_r2"] is not None else "       "
        print(f"{row['model']:<26} {row['mae']:7.3f} {row['mse']:7.3f} "
              f"{row['rmse']:7.3f} {row['r2']:7.3f} {row['adj_r2']:7.3f} {cv}")

    print("\nSelected hyperparameters:")
    for row in suite["table"]:
        if row["hyperparams"]:
            inner = ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                              for k, v in row["hyperparams"].items())
            print(f"  {row['model']}: {inner}")

    h = suite["figure_data"]["residual_histogram"]
    print("\nOLS test residuals (standardized units):")
    peak = max(h["counts"])
    for i, count in enumerate(h["counts"]):
        bar = "#" * round(30 * count / peak) if peak else ""
        print(f"  [{h['edges'][i]:+6.2f}, {h['edges'][i + 1]:+6.2f})  {count:3d}  {bar}")


if __name__ == "__main__":
    main()
