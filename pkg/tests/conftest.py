import pytest

from gaitevo.evolution import MODE_EVOLUTION, MODE_EVOLUTION_LEARNING
from gaitevo.experiment import make_spec, run_experiment


@pytest.fixture(scope="session")
def desk_results(tmp_path_factory):
    """One desk-preset experiment per mode, 3 seeded repetitions each.

    Shared by the learning-delta, directional, and determinism acceptance
    criteria so the expensive evolution+learning runs execute once.
    """
    out_dir = tmp_path_factory.mktemp("desk")
    logs = {}
    for mode in (MODE_EVOLUTION, MODE_EVOLUTION_LEARNING):
        spec = make_spec(mode, "desk", master_seed=1000, out_dir=out_dir)
        logs[mode] = run_experiment(spec)
    return out_dir, logs
