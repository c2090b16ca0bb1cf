import pytest

from pnd.experiments import (
    cphase_experiment,
    kerr_cancel_experiment,
    loss_transparency_experiment,
    micromotion_experiment,
    pi8_gate_experiment,
    snap_comparison_experiment,
    theta_scaling_experiment,
)


@pytest.fixture(scope="session")
def pi8_report():
    return pi8_gate_experiment()


@pytest.fixture(scope="session")
def snap_report():
    return snap_comparison_experiment()


@pytest.fixture(scope="session")
def theta_report():
    return theta_scaling_experiment()


@pytest.fixture(scope="session")
def kerr_report():
    return kerr_cancel_experiment()


@pytest.fixture(scope="session")
def micromotion_report():
    return micromotion_experiment()


@pytest.fixture(scope="session")
def cphase_report():
    return cphase_experiment()


@pytest.fixture(scope="session")
def loss_report():
    return loss_transparency_experiment()
