from .align import AlignResult, TrainConfig, align
from .evaluation import EvalReport, evaluate, format_report, save_report
from .io import PosePairSet, load_metric, load_pairs, save_pairs
from .regressor import PoseRegressor, train_demo
from .stats import TTestResult, ttest
