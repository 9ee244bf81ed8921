import numpy as np
import pytest
from aqwm.dto import SignalFrame
from aqwm.sim.exc import InvalidArgumentError, ParseError, ShapeError, SignalIOError
from aqwm.sim.signal import (
    concat_windows,
    gen_gaussian,
    load_csv,
    pooled_stats,
    product_stats,
    split_windows,
    stack_windows,
    stats,
)


def test_gen_gaussian_deterministic():
    a = gen_gaussian(1.0, 2.0, 100, 50.0, 1)
    b = gen_gaussian(1.0, 2.0, 100, 50.0, 1)

    assert a == b
    assert len(a) == 100
    assert a.sample_rate_hz == 50.0


def test_gen_gaussian_prefix():
    long = gen_gaussian(0.0, 1.0, 2000, 1000.0, 5)
    short = gen_gaussian(0.0, 1.0, 1000, 1000.0, 5)
    assert np.array_equal(long.samples[:1000], short.samples)


def test_gen_gaussian_moments():
    frame = gen_gaussian(3.0, 2.0, 200_000, 1000.0, 0)
    s = stats(frame)

    assert s.mean == pytest.approx(3.0, abs=0.03)
    assert s.variance == pytest.approx(4.0, rel=0.02)
    assert s.count == 200_000


def test_gen_gaussian_zero_std():
    frame = gen_gaussian(1.5, 0.0, 10, 1.0, 0)
    assert np.all(frame.samples == 1.5)
    assert stats(frame).variance == 0.0


@pytest.mark.parametrize(
    "mean,std,length,rate",
    [
        (0.0, -1.0, 10, 1.0),
        (0.0, 1.0, 0, 1.0),
        (0.0, 1.0, 10, 0.0),
        (float("nan"), 1.0, 10, 1.0),
    ],
)
def test_gen_gaussian_invalid(mean, std, length, rate):
    with pytest.raises(InvalidArgumentError):
        gen_gaussian(mean, std, length, rate, 0)


def test_stats_population_variance():
    s = stats(SignalFrame(samples=[1.0, 2.0, 3.0, 4.0], sample_rate_hz=1.0))
    assert s.mean == 2.5
    assert s.variance == pytest.approx(1.25)


def test_pooled_stats_matches_concatenation():
    a = gen_gaussian(0.0, 1.0, 300, 1.0, 1)
    b = gen_gaussian(2.0, 3.0, 500, 1.0, 2)

    pooled = pooled_stats(stats(a), stats(b))
    direct = stats(concat_windows([a, b]))

    assert pooled.count == direct.count
    assert pooled.mean == pytest.approx(direct.mean)
    assert pooled.variance == pytest.approx(direct.variance)


def test_product_stats():
    a = SignalFrame(samples=[1.0, 2.0], sample_rate_hz=1.0)
    b = SignalFrame(samples=[3.0, -1.0], sample_rate_hz=1.0)
    p = product_stats(a, b)

    assert p.mean == pytest.approx(0.5)
    assert p.variance == pytest.approx(6.25)

    with pytest.raises(ShapeError):
        product_stats(a, SignalFrame(samples=[1.0], sample_rate_hz=1.0))


def test_split_and_stack():
    frame = SignalFrame(samples=np.arange(12.0), sample_rate_hz=4.0)
    windows = split_windows(frame, 4)

    assert len(windows) == 3
    assert windows[1].samples.tolist() == [4.0, 5.0, 6.0, 7.0]
    assert windows[1].sample_rate_hz == 4.0
    assert stack_windows(windows, 4).shape == (3, 4)
    assert concat_windows(windows) == frame
    assert stack_windows([], 4).shape == (0, 4)

    with pytest.raises(ShapeError):
        split_windows(frame, 5)
    with pytest.raises(ShapeError):
        stack_windows(windows, 3)


def test_load_csv(write_signal_csv):
    path = write_signal_csv([1.5, -2.0, 3.25])
    frame = load_csv(path, 10.0)

    assert frame.samples.tolist() == [1.5, -2.0, 3.25]
    assert frame.sample_rate_hz == 10.0


def test_load_csv_header(write_signal_csv):
    path = write_signal_csv([20.1, 20.3], header="temperature")
    assert load_csv(path, 1.0).samples.tolist() == [20.1, 20.3]


def test_load_csv_bad_row(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1.0\n2.0\nabc\n4.0\n", encoding="utf-8")

    with pytest.raises(ParseError) as e:
        load_csv(path, 1.0)
    assert e.value.row == 3


def test_load_csv_missing(tmp_path):
    with pytest.raises(SignalIOError):
        load_csv(tmp_path / "missing.csv", 1.0)


def test_load_csv_header_only(tmp_path):
    path = tmp_path / "header.csv"
    path.write_text("temperature\n", encoding="utf-8")

    with pytest.raises(InvalidArgumentError):
        load_csv(path, 1.0)


@pytest.mark.parametrize("first", ["NaN", "inf", "-Infinity"])
def test_load_csv_non_finite_first_row_is_data(tmp_path, first: str):
    path = tmp_path / "first.csv"
    path.write_text(f"{first}\n1.0\n2.0\n", encoding="utf-8")

    with pytest.raises(ParseError) as e:
        load_csv(path, 1.0)
    assert e.value.row == 1


def test_load_csv_rows_count_blank_lines(tmp_path):
    path = tmp_path / "gaps.csv"
    path.write_text("value\n1.0\n\n2.0\n   \nabc\n", encoding="utf-8")

    with pytest.raises(ParseError) as e:
        load_csv(path, 1.0)
    assert e.value.row == 6


def test_load_csv_skips_blank_lines(tmp_path):
    path = tmp_path / "gaps.csv"
    path.write_text("value\n\n1.0\n\n2.0\n", encoding="utf-8")
    assert load_csv(path, 1.0).samples.tolist() == [1.0, 2.0]


def test_load_csv_not_utf8(tmp_path):
    path = tmp_path / "latin1.csv"
    path.write_bytes("température\n1.0\n".encode("latin-1"))

    with pytest.raises(SignalIOError):
        load_csv(path, 1.0)
