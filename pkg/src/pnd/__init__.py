"""Engineered photon-number-dependent cavity spectra via off-resonant qubit
drives: operator toolbox, perturbative and exact spectrum evaluators, drive
optimization, time-domain simulation, bosonic-code recovery, and the named
experiments built on them."""

__version__ = "0.1.0"

from .models import (  # noqa: F401
    Abrupt,
    DriveSpec,
    DriveTone,
    NoiseParams,
    RampUpDown,
    SineGate,
    SystemParams,
    TwoCavityParams,
)
from .effective import (  # noqa: F401
    EngineeredSpectrum,
    micromotion_period,
    spectrum_order2,
    spectrum_order4,
    stroboscopic_spectrum,
)
from .optimizer import OptimizerConfig, make_target, optimize_drives  # noqa: F401
from .presets import PRESETS  # noqa: F401
