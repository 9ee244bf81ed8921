import pytest


def _manifest(name: str, mode: str, spec: dict) -> dict:
    return {
        "kind": "harness.aqwm.io/scenario",
        "version": "v1",
        "metadata": {"name": name},
        "spec": {"name": name, "mode": mode, **spec},
    }


@pytest.fixture(params=["static", "dynamic_oracle"])
def injection_manifest(request) -> dict:
    # 1 s at 1 kHz, 0.1 s windows, injection at 0.5 s
    return _manifest(
        f"{request.param}-injection",
        request.param,
        {
            "params": {"beta": 0.5, "n": 10, "n_s": 10, "sample_rate_hz": 1000.0},
            "source": {"type": "synthetic", "std": 0.25, "seed": 11},
            "attack": {"kind": "injection", "start_sample": 500, "injected_std": 1.0, "seed": 12},
            "duration_s": 1.0,
            "erasure_margin": 0.5,
            "power_ratio_windows": [1, 5, 10],
        },
    )


@pytest.fixture()
def eavesdrop_manifest() -> dict:
    # 100 recorded windows, then 1 s of forgery
    return _manifest(
        "eavesdrop",
        "static",
        {
            "params": {"beta": 1.0, "n": 10, "n_s": 10, "sample_rate_hz": 1000.0},
            "source": {"type": "synthetic", "std": 1.0, "seed": 21},
            "attack": {"kind": "eavesdrop_forge", "start_sample": 10_000, "eavesdrop_windows": 100, "seed": 22},
            "duration_s": 11.0,
            "power_ratio_windows": [1, 10, 100],
        },
    )
