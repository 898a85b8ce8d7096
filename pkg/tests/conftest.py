import math

import pytest

from rydgate.atom import ExcitationKind, default_model
from rydgate.pulses import LcgParams, ZchgParams

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def dipole_model():
    return default_model(ExcitationKind.DIPOLE)


@pytest.fixture(scope="session")
def quad_model():
    return default_model(ExcitationKind.QUADRUPOLE)


def reference_lcg(duration: float) -> LcgParams:
    """Chirped-Gaussian reference pulse scaled to the given duration."""
    return LcgParams(
        duration=duration,
        omega0=TWO_PI * 24.92,
        delta0=TWO_PI * 49.55,
        tau=0.266 * duration,
    )


def reference_zchg(duration: float) -> ZchgParams:
    """Hyper-Gaussian STIRAP reference pulse scaled to the given duration."""
    return ZchgParams(
        duration=duration,
        omega_b0=TWO_PI * 300.0,
        omega_r0=TWO_PI * 300.0,
        delta_b=TWO_PI * 1762.90,
        tau_b=0.35 * duration,
        tau_r=0.35 * duration,
    )
