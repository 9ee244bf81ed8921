import json
import logging
import os
from contextlib import contextmanager
from enum import Enum
from pathlib import Path
from typing import Annotated, Iterator, List, Optional

import numpy as np
import pandas as pd
import typer
from aqwm.dto import (
    FeatureCalibration,
    MetricsBundle,
    PlannerMode,
    ProductStats,
    SchemeMode,
    TrainConfig,
    WatermarkParams,
)
from dotenv import load_dotenv
from pydantic import ValidationError

from ..exc import AqwmError, CodecError, InvalidArgumentError, ParseError, ShapeError, SignalIOError
from ..fingerprint import fingerprint_bits
from ..signal import load_csv, split_windows
from ..sswm import correlate, embed, gen_bit_stream, gen_pn_key, hard_bits, plan_params
from ..utils.documents import load_document, save_document
from ..utils.package_utils import get_version
from .scenario import load_scenario, override_scenario, run_scenario
from .sweep import ber_sweep, write_metrics_csv
from .training import train_models

EXIT_INVALID = 2
EXIT_ALARM = 3

LOG_LEVEL_ENV = "AQWM_LOG_LEVEL"

app = typer.Typer(help="Spread-spectrum watermarking simulator")


class EmbedMode(str, Enum):
    STATIC = "static"
    DYNAMIC = "dynamic"


@contextmanager
def _cli_errors() -> Iterator[None]:
    try:
        yield
    except ValidationError as e:
        typer.echo(f"Invalid configuration: {e}", err=True)
        raise typer.Exit(code=EXIT_INVALID)
    except (InvalidArgumentError, ShapeError, ParseError, CodecError, SignalIOError) as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=EXIT_INVALID)
    except AqwmError as e:
        typer.echo(f"Error: {e}", err=True)
        raise typer.Exit(code=1)


def _version_callback(value: bool):
    if value:
        typer.echo(f"aqwm-sim {get_version()}".strip())
        raise typer.Exit()


@app.callback()
def main(
    log_level: Annotated[
        Optional[str], typer.Option(help=f"Logging level, defaults to ${LOG_LEVEL_ENV} or INFO")
    ] = None,
    version: Annotated[
        Optional[bool], typer.Option("--version", callback=_version_callback, is_eager=True, help="Show the version")
    ] = None,
):
    load_dotenv()
    level = (log_level or os.environ.get(LOG_LEVEL_ENV) or "INFO").upper()
    logging.basicConfig(level=level, format="%(asctime)s [%(levelname)8s] %(name)s: %(message)s")


def _params(beta: float, n: int, n_s: int, sample_rate_hz: float) -> WatermarkParams:
    return WatermarkParams(beta=beta, n=n, n_s=n_s, sample_rate_hz=sample_rate_hz)


def _windows(path: Path, params: WatermarkParams):
    frame = load_csv(path, params.sample_rate_hz)
    usable = len(frame) - len(frame) % params.window_len
    if usable == 0:
        raise InvalidArgumentError(f"{path} holds less than one {params.window_len}-sample window", field="input")
    if usable < len(frame):
        logging.warning("dropping %d trailing samples that do not fill a window", len(frame) - usable)
    return split_windows(frame.with_samples(frame.samples[:usable]), params.window_len)


def _write_bundle(bundle: MetricsBundle, out: Path, name: str):
    if out.suffix.lower() == ".csv":
        write_metrics_csv(bundle, out)
    else:
        save_document(out, bundle, name)


@app.command("embed")
def embed_cmd(
    input_csv: Annotated[Path, typer.Argument(help="Single-column CSV signal")],
    out: Annotated[Path, typer.Option(help="Watermarked single-column CSV")],
    beta: Annotated[float, typer.Option(help="Watermark amplitude")],
    n: Annotated[int, typer.Option(help="Chips per bit")],
    n_s: Annotated[int, typer.Option(help="Bits per window")],
    sample_rate_hz: Annotated[float, typer.Option(help="Sampling frequency")] = 1000.0,
    key_seed: Annotated[int, typer.Option(help="Seed of the shared key")] = 0,
    bits_seed: Annotated[int, typer.Option(help="Seed of the static bit stream")] = 0,
    mode: Annotated[EmbedMode, typer.Option(help="Static bits or per-window fingerprint bits")] = EmbedMode.STATIC,
    calibration: Annotated[
        Optional[Path], typer.Option(help="Fingerprint calibration document, required in dynamic mode")
    ] = None,
):
    """Watermark a recorded signal window by window"""
    with _cli_errors():
        params = _params(beta, n, n_s, sample_rate_hz)
        key = gen_pn_key(n, key_seed)
        windows = _windows(input_csv, params)
        if mode == EmbedMode.STATIC:
            bits = gen_bit_stream(n_s, bits_seed)
            marked = [embed(y, key, bits, beta) for y in windows]
        else:
            if calibration is None:
                raise InvalidArgumentError("dynamic mode needs a calibration document", field="calibration")
            calib = load_document(calibration, FeatureCalibration).spec
            marked = [embed(y, key, fingerprint_bits(y, key, calib, n_s), beta) for y in windows]
        out.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(np.concatenate([w.samples for w in marked])).to_csv(out, header=False, index=False)
        typer.echo(f"Watermarked {len(marked)} windows into {out}")


@app.command()
def extract(
    input_csv: Annotated[Path, typer.Argument(help="Single-column CSV signal")],
    beta: Annotated[float, typer.Option(help="Watermark amplitude")],
    n: Annotated[int, typer.Option(help="Chips per bit")],
    n_s: Annotated[int, typer.Option(help="Bits per window")],
    sample_rate_hz: Annotated[float, typer.Option(help="Sampling frequency")] = 1000.0,
    key_seed: Annotated[int, typer.Option(help="Seed of the shared key")] = 0,
    out: Annotated[Optional[Path], typer.Option(help="JSON file for the soft bits")] = None,
):
    """Correlate every window of a signal with the key"""
    with _cli_errors():
        params = _params(beta, n, n_s, sample_rate_hz)
        key = gen_pn_key(n, key_seed)
        windows = _windows(input_csv, params)
        soft = correlate(np.stack([w.samples for w in windows]), key, n_s, beta)
        for k, row in enumerate(hard_bits(soft)):
            typer.echo(f"{k}: {' '.join('+1' if b > 0 else '-1' for b in row)}")
        if out is not None:
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(json.dumps({"soft_bits": soft.tolist()}, indent=2), encoding="utf-8")


@app.command()
def plan(
    sigma: Annotated[float, typer.Option(help="Carrier standard deviation")],
    p_bar: Annotated[float, typer.Option(help="Upper bound on the legitimate bit error rate")],
    p_under: Annotated[float, typer.Option(help="Attack tolerance")],
    delay_s: Annotated[float, typer.Option(help="Detection delay budget in seconds")],
    sample_rate_hz: Annotated[float, typer.Option(help="Sampling frequency")],
    product_mean: Annotated[float, typer.Option(help="Mean of the product of two carrier realisations")] = 0.0,
    product_variance: Annotated[
        Optional[float], typer.Option(help="Variance of that product, defaults to sigma^4")
    ] = None,
    mode: Annotated[PlannerMode, typer.Option(help="Reading of the attacker constraint")] = PlannerMode.CONFUSION,
):
    """Smallest watermark meeting the error, attack and delay constraints"""
    with _cli_errors():
        variance = product_variance if product_variance is not None else sigma**4
        product = ProductStats(mean=product_mean, variance=variance)
        params = plan_params(sigma, product, p_bar, p_under, delay_s, sample_rate_hz, mode)
        typer.echo(params.model_dump_json(indent=2))


@app.command()
def train(
    scenario: Annotated[Path, typer.Argument(help="Scenario document")],
    out_dir: Annotated[Path, typer.Option(help="Directory for models and calibration")] = Path("models"),
    epochs: Annotated[int, typer.Option(help="Training epochs")] = 200,
    learning_rate: Annotated[float, typer.Option(help="Gradient descent step")] = 0.1,
    seed: Annotated[int, typer.Option(help="Seed of initialization, training data and sample order")] = 0,
    windows: Annotated[int, typer.Option(help="Training windows")] = 100,
    hidden_dim: Annotated[int, typer.Option(help="Hidden units")] = 32,
):
    """Train the device encoder and cloud decoder of a scenario"""
    with _cli_errors():
        sc = load_scenario(scenario)
        cfg = TrainConfig(epochs=epochs, learning_rate=learning_rate, seed=seed)
        trained = train_models(sc, cfg, out_dir, windows=windows, hidden_dim=hidden_dim, base_dir=scenario.parent)
        typer.echo(f"Encoder loss {trained.encoder_report.final_loss:.6g} -> {trained.encoder_path}")
        typer.echo(f"Decoder loss {trained.decoder_report.final_loss:.6g} -> {trained.decoder_path}")


@app.command()
def simulate(
    scenario: Annotated[Path, typer.Argument(help="Scenario document")],
    out: Annotated[Optional[Path], typer.Option(help="Metrics output, .json document or .csv table")] = None,
    fail_on_alarm: Annotated[bool, typer.Option(help="Exit with code 3 when the alarm is raised")] = False,
    mode: Annotated[Optional[SchemeMode], typer.Option(help="Override the scheme")] = None,
    beta: Annotated[Optional[float], typer.Option(help="Override the watermark amplitude")] = None,
    threshold: Annotated[Optional[float], typer.Option(help="Override the mismatch threshold")] = None,
    duration_s: Annotated[Optional[float], typer.Option(help="Override the stream length")] = None,
    key_seed: Annotated[Optional[int], typer.Option(help="Override the seed of the shared key")] = None,
    erasure_margin: Annotated[Optional[float], typer.Option(help="Override the erasure margin")] = None,
    transport: Annotated[Optional[bool], typer.Option(help="Override passing windows through the codec")] = None,
):
    """Run a scenario end to end, optionally overriding some of its fields"""
    with _cli_errors():
        sc = override_scenario(
            load_scenario(scenario),
            mode=mode,
            beta=beta,
            threshold=threshold,
            duration_s=duration_s,
            key_seed=key_seed,
            erasure_margin=erasure_margin,
            transport=transport,
        )
        bundle = run_scenario(sc, base_dir=scenario.parent)
        if out is not None:
            _write_bundle(bundle, out, f"{sc.name}-metrics")
    report = bundle.detection
    if report is not None and report.alarm:
        typer.echo(f"Alarm raised at window {report.alarm_window} (t = {report.alarm_time_s:g} s)")
        if fail_on_alarm:
            raise typer.Exit(code=EXIT_ALARM)
    else:
        typer.echo("No alarm")


@app.command()
def sweep(
    n: Annotated[List[int], typer.Option(help="Chips per bit, repeatable")],
    beta_over_sigma: Annotated[List[float], typer.Option(help="Amplitude over carrier deviation, repeatable")],
    trials: Annotated[int, typer.Option(help="Bits per grid point")] = 100_000,
    seed: Annotated[int, typer.Option(help="Parent seed")] = 0,
    workers: Annotated[int, typer.Option(help="Worker threads")] = 1,
    out: Annotated[Optional[Path], typer.Option(help="Metrics output, .json document or .csv table")] = None,
):
    """Empirical against closed-form bit error rate"""
    with _cli_errors():
        bundle = ber_sweep(n, beta_over_sigma, trials, seed, workers)
        if out is not None:
            _write_bundle(bundle, out, "ber-sweep")
    for p in bundle.ber_points:
        typer.echo(
            f"n={p.n} beta/sigma={p.beta_over_sigma:g} empirical={p.empirical_ber:.6g} theory={p.theoretical_ber:.6g}"
        )


if __name__ == "__main__":
    app()
