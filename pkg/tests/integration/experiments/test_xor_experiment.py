"""
Integration tests for the single-neuron XOR experiment.

Trains a standard relu neuron and an IC neuron for ten seeds each with the
settings of configs/xor/xor.yaml. The standard neuron gives a half-plane
decision and can never separate XOR; the IC neuron should solve it for
nearly every seed. Run with ``pytest -m slow``.
"""

import pytest
from loguru import logger

from icnet.geometry import region_map
from icnet.training import XORConfig, run_xor_experiment

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def xor_result():
    """
    Fixture running the full ten-seed experiment once for all tests.

    Returns:
        tuple[XORReport, SingleNeuronClassifier | None]: Report and last solved IC model
    """
    report, ic_model = run_xor_experiment(XORConfig(seeds=10, steps=5000))
    logger.info(f"IC {report.ic_successes}/10, standard {report.standard_successes}/10")
    return report, ic_model


def test_ic_neuron_solves_xor(xor_result):
    """Test that the IC neuron reaches 100% accuracy for at least 8 of 10 seeds."""
    report, _ = xor_result
    assert report.ic_successes >= 8, f"only {report.ic_successes}/10 IC runs solved XOR"


def test_standard_neuron_never_solves_xor(xor_result):
    """Test that no seed lets a single relu neuron classify all four points."""
    report, _ = xor_result
    assert report.standard_successes == 0


def test_solved_neuron_has_three_regions(xor_result):
    """Test that a solved IC neuron splits the plane into more than two linear regions."""
    _, ic_model = xor_result
    regions = region_map(ic_model.as_two_input(), (-1.5, 1.5, -1.5, 1.5), 256)
    assert regions.num_regions >= 3
