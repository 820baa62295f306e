from enum import Enum
from typing import List, Optional

from pydantic import BaseModel


class ConvergenceStatus(str, Enum):
    CONVERGED = "converged"
    DIVERGING = "diverging"
    INCONCLUSIVE = "inconclusive"


class ConvergenceVerdict(BaseModel):
    status: ConvergenceStatus
    first_k_below_epsilon: Optional[int] = None
    final_w: float
    epsilon: float
    window: int


class StepCheck(BaseModel):
    k: int
    w_sq_hat: float
    mean_sq: float
    stderr: float
    deviation: float
    passed: bool


class TraceValidationReport(BaseModel):
    """Per-step comparison of analytic W^2(k) with Monte Carlo E||x(k)||^2"""

    sigma_mult: float
    checks: List[StepCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[StepCheck]:
        return [c for c in self.checks if not c.passed]


class OracleComparison(BaseModel):
    law_mode: str
    oracle_horizon: int
    max_abs_deviation: float
    max_rel_deviation: float
