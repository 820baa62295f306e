from jumpwass.models.system import JumpLinearSystem, SwitchingLaw, IIDLaw, ScheduleLaw, MarkovLaw, ModePath, LawMode, ModeTiming
from jumpwass.models.gaussian import Gaussian, GaussianMixture
from jumpwass.models.trace import TraceEntry, WassersteinTrace, ModeConditionalState
