import math

import numpy as np
import pytest

from revmap.geometry import CLOSED_FORM, EquidistantMetric, RevolutionProfile

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_profile(r, dr, ddr, z, dz, ddz, domain):
    return RevolutionProfile(r, dr, ddr, z, dz, ddz, domain, CLOSED_FORM)


@pytest.fixture(scope="session")
def sphere_profile():
    return make_profile(np.sin, np.cos, lambda w: -np.sin(w),
                        lambda w: 1 - np.cos(w), np.sin, np.cos, (0.0, math.pi))


@pytest.fixture(scope="session")
def cylinder_profile():
    return make_profile(lambda w: np.ones_like(np.asarray(w, float)), lambda w: np.zeros_like(np.asarray(w, float)),
                        lambda w: np.zeros_like(np.asarray(w, float)), lambda w: np.asarray(w, float),
                        lambda w: np.ones_like(np.asarray(w, float)), lambda w: np.zeros_like(np.asarray(w, float)),
                        (0.0, 1.0))


def const(c):
    return lambda w: np.full_like(np.asarray(w, dtype=float), c)


@pytest.fixture(scope="session")
def sphere_metric():
    return EquidistantMetric(const(1.0), lambda w: np.sin(w) ** 2, const(0.0),
                             lambda w: 2 * np.sin(w) * np.cos(w), (0.0, math.pi), name="unit-sphere")


@pytest.fixture(scope="session")
def flat_polar_metric():
    return EquidistantMetric(const(1.0), lambda w: np.asarray(w, float) ** 2, const(0.0),
                             lambda w: 2 * np.asarray(w, float), (0.0, 20.0), name="flat-polar")


@pytest.fixture(scope="session")
def cylinder_metric():
    # r = 2
    return EquidistantMetric(const(1.0), const(4.0), const(0.0), const(0.0), (0.0, 1.0), name="cylinder")
