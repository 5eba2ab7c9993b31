"""mpgworkbench: a from-scratch classical machine-learning workbench for
the Auto MPG fuel-consumption study (regression suite, classification
grid, EDA tables and diagnostic figure data)."""

__version__ = "0.1.0"

from .ingest import (DATA_SHA256, Dataset, RawRecord, RawTable,
                     build_dataset, impute_horsepower_median, load_dataset,
                     parse_auto_mpg, reference_data_path)
from .preprocess import (Standardizer, apply_standardizer, fit_standardizer,
                         kfold, polynomial_features, train_test_split)

__all__ = [
    "DATA_SHA256", "Dataset", "RawRecord", "RawTable", "Standardizer",
    "apply_standardizer", "build_dataset", "fit_standardizer",
    "impute_horsepower_median", "kfold", "load_dataset", "parse_auto_mpg",
    "polynomial_features", "reference_data_path", "train_test_split",
    "__version__",
]
