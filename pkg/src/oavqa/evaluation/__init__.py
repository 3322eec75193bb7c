from ..stats import CorrelationError, plcc, srcc
from .benchmark import (
    BenchmarkCell,
    BenchmarkError,
    BenchmarkReport,
    SingleModeRow,
    average_reports,
    oriented_scores,
    run_benchmark,
)
from .mos import MosError, MosTable, compute_mos, write_mos_csv
from .split import SplitError, SplitPlan, split_by_content

__all__ = [
    "CorrelationError", "plcc", "srcc", "BenchmarkCell", "BenchmarkError", "BenchmarkReport", "SingleModeRow",
    "average_reports", "oriented_scores", "run_benchmark", "MosError", "MosTable", "compute_mos", "write_mos_csv",
    "SplitError", "SplitPlan", "split_by_content",
]
