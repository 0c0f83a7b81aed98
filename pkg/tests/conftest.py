import warnings

import numpy as np
import pytest

from hypomix import models

ACCEPTANCE_RESULTS = []


@pytest.fixture
def record_criterion():
    """Store a pass/fail line for the end-of-run acceptance summary."""

    def record(label, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" :: {detail}" if detail else "")
        ACCEPTANCE_RESULTS.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def zoo(gamma=1.0):
    """Every built-in model at a representative parameter point."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return {
            "toy": models.toy_qubit(),
            "qutrit": models.qutrit(1.0, gamma),
            "tfim": models.tfim_dephasing(3, 1.0, gamma),
            "heisenberg": models.heisenberg_dephasing(3, 1.0, 1.0, 1.0, 1.0, gamma),
            "walk_c4": models.quantum_walk_dephasing(models.cycle_graph(4), gamma),
            "walk_k4": models.quantum_walk_dephasing(models.complete_graph(4), gamma),
        }
