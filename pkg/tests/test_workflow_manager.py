import pytest

from workflow_manager import STEPS, ReproductionWorkflow


@pytest.fixture(scope="module")
def quick_state(config, constants):
    return ReproductionWorkflow(config, constants).run(quick=True)


def test_every_step_reports(quick_state):
    for step in STEPS:
        assert set(quick_state[step]) == {"passed", "summary"}


def test_quick_run_passes(quick_state):
    failed = {step: quick_state[step]["summary"] for step in STEPS if not quick_state[step]["passed"]}
    assert failed == {}


def test_enumeration_summary(quick_state):
    assert "2965 levels" in quick_state["enumeration"]["summary"]
    assert "40 with dimension 100" in quick_state["enumeration"]["summary"]
