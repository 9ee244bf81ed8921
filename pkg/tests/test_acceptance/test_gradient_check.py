import pytest
from aqwm.dto import TrainingSample
from aqwm.sim.lstm import gradient_check, init_model
from aqwm.sim.rng import make_rng


@pytest.mark.parametrize(
    "input_dim, hidden_dim, output_dim, steps, seed",
    [
        (1, 2, 1, 8, 61),
        (2, 3, 1, 6, 62),
        (2, 4, 2, 5, 63),
        (2, 6, 6, 7, 64),
        (3, 8, 1, 10, 65),
    ],
)
def test_bptt_matches_finite_differences(input_dim, hidden_dim, output_dim, steps, seed):
    rng = make_rng(seed + 100)
    model = init_model(input_dim, hidden_dim, output_dim, seed=seed)
    sample = TrainingSample(
        inputs=rng.standard_normal((steps, input_dim)), targets=rng.standard_normal((steps, output_dim))
    )

    assert gradient_check(model, sample, epsilon=1e-6) <= 1e-5
