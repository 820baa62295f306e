from dataclasses import dataclass, field
from typing import Dict, Optional

from jumpwass.models.moments import EmpiricalMoments
from jumpwass.models.trace import WassersteinTrace
from jumpwass.schemas.report import ConvergenceVerdict, TraceValidationReport


@dataclass(frozen=True, eq=False)
class AnalysisResult:
    """
    Output of one analysis run.

    `traces` holds each engine's own trace keyed by engine name
    (split_merge, mode_conditional, enumerate, single_mode_1..m);
    `table` is the combined per-k table written to CSV.
    """

    traces: Dict[str, WassersteinTrace]
    table: WassersteinTrace
    verdict: ConvergenceVerdict
    moments: Optional[EmpiricalMoments] = None
    mc_report: Optional[TraceValidationReport] = None
    mc_reference: Optional[str] = None
    metadata: Dict[str, str] = field(default_factory=dict)
