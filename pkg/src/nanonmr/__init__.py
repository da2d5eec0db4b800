"""Quantum Fisher information toolkit for NV-centre nanoscale NMR.

Units throughout: lengths in nm, times in microseconds, frequencies in rad/us.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: E402,F401,F403
from .qfi import (  # noqa: E402
    Coherence,
    CoherenceDerivative,
    MeasurementBasis,
    QfiBreakdown,
    bures_qfi,
    classical_fi,
    fi_xy_basis,
    fidelity,
    fidelity_qfi,
    infidelity,
)
from .simple_model import (  # noqa: E402
    SimpleModelParams,
    brute_force_coherence,
    coherence_exact,
    qfi_components,
    qfi_max_over_theta,
    qfi_optimal,
)
from .dipolar import (  # noqa: E402
    IntegralMethod,
    IntegralSpec,
    PhysicalConstants,
    SampleGeometry,
    b_rms_sq,
    dipolar_integral,
    field_moments,
    mean_field,
)
from .spatial import Regime, SpatialProtocolParams, mc_diffusion_oracle, qfi_spatial  # noqa: E402
from .undriven import PulseTrain, Strategy, filter_overlap_s2, undriven_operating_point  # noqa: E402
from .polarization import PolarizationParams, qfi_pol, strategy_times  # noqa: E402
from .multi_sensor import MultiSensorParams, fi_y, qfi_multi, symmetric_rho  # noqa: E402
