"""Single trapped ion in a time-dependent harmonic trap."""
__version__ = "0.1.0"

from .profiles import Constant, Exponential, Modulated, Sampled, profile_from_dict  # noqa: E402
from .modes import SimulationWindow, ModeSolution, solve_modes, wronskian_deviation, rotate_modes  # noqa: E402
from .spectrum import (  # noqa: E402
    LaserDrive,
    PhysicalScales,
    SmoothSwitch,
    Spectrum,
    excitation_probability,
    fourier_amplitude,
    lamb_dicke,
    spectrum_sweep,
)
from .analytic import ExpChirpParams, closed_form_probability, gibbons_hawking_probability  # noqa: E402
