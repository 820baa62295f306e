from jumpwass.schemas.config import AnalysisConfig, ConvergenceSpec, Engine, SamplerConfig
from jumpwass.schemas.report import ConvergenceStatus, ConvergenceVerdict, OracleComparison, StepCheck, TraceValidationReport
