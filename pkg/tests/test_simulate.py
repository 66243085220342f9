import numpy as np
import pytest

from qcpart import partition as P
from qcpart import simulate as S
from qcpart.qc import expand, parse_base_matrix


@pytest.fixture(scope="module")
def small_code():
    text = "2 4 8\n1 3 0 5\n0 2 7 -1\n"
    b = parse_base_matrix(text)
    h = expand(b)
    sch = P.solve_greedy(h, 2).scheme
    return h, sch


def quick_cfg(**kw):
    base = dict(snr_db=(4.0,), rate=0.5, max_iters=10,
                min_frame_errors=5, max_frames=600, seed=7)
    base.update(kw)
    return S.ChannelConfig(**base)


def test_noise_sigma_value():
    # rate 1/2 at 3 dB: sigma^2 = 1/(2*0.5*10^0.3)
    assert S.noise_sigma(3.0, 0.5) == pytest.approx((1 / 10**0.3) ** 0.5)


def test_llr_statistics():
    sigma = S.noise_sigma(2.0, 0.5)
    llrs = np.concatenate([S.gen_frame_llrs(2.0, 0.5, 5000, s) for s in range(20)])
    assert llrs.mean() == pytest.approx(2 / sigma**2, rel=0.02)
    assert llrs.std() == pytest.approx(2 / sigma, rel=0.02)


def test_determinism(small_code):
    h, sch = small_code
    a = S.run_monte_carlo(h, sch, quick_cfg())
    b = S.run_monte_carlo(h, sch, quick_cfg())
    assert a.to_csv() == b.to_csv()


def test_worker_invariance(small_code):
    h, sch = small_code
    a = S.run_monte_carlo(h, sch, quick_cfg(), workers=1)
    b = S.run_monte_carlo(h, sch, quick_cfg(), workers=2)
    assert a.to_csv() == b.to_csv()


def test_csv_format(small_code):
    h, sch = small_code
    res = S.run_monte_carlo(h, sch, quick_cfg(snr_db=(4.0, 6.0)))
    lines = res.to_csv().strip().splitlines()
    assert lines[0] == "snr_db,frames,frame_errors,fer,avg_iterations,seed"
    assert len(lines) == 3
    for line in lines[1:]:
        snr, frames, errs, fer, it, seed = line.split(",")
        assert int(frames) > 0 and int(seed) == 7
        assert float(fer) == pytest.approx(int(errs) / int(frames), rel=1e-4)


def test_very_low_snr_all_errors(small_code):
    h, sch = small_code
    res = S.run_monte_carlo(h, sch, quick_cfg(snr_db=(-10.0,), min_frame_errors=20, max_frames=40))
    pt = res.points[0]
    assert pt.fer > 0.9


def test_high_snr_few_errors(small_code):
    h, sch = small_code
    res = S.run_monte_carlo(h, sch, quick_cfg(snr_db=(12.0,), min_frame_errors=3, max_frames=200))
    pt = res.points[0]
    assert pt.fer < 0.2


def test_stop_rules(small_code):
    h, sch = small_code
    res = S.run_monte_carlo(h, sch, quick_cfg(snr_db=(-10.0,), min_frame_errors=10, max_frames=10_000))
    pt = res.points[0]
    assert pt.frame_errors >= 10
    # batches are applied whole, so overshoot is bounded by one batch
    assert pt.frames <= ((10 + S.BATCH - 1) // S.BATCH) * S.BATCH

    res = S.run_monte_carlo(h, sch, quick_cfg(snr_db=(12.0,), min_frame_errors=10**9, max_frames=100))
    assert res.points[0].frames >= 100


def test_wilson_interval():
    lo, hi = S.wilson_interval(0, 100)
    assert lo == 0.0 and 0 < hi < 0.05
    lo, hi = S.wilson_interval(50, 100)
    assert lo < 0.5 < hi
    lo2, hi2 = S.wilson_interval(500, 1000)
    assert hi2 - lo2 < hi - lo  # more data, tighter interval


def test_config_validation():
    with pytest.raises(ValueError):
        S.ChannelConfig(snr_db=(1.0,), rate=0.0)
    with pytest.raises(ValueError):
        S.ChannelConfig(snr_db=(1.0,), rate=1.5)
    with pytest.raises(ValueError):
        S.ChannelConfig(snr_db=(), rate=0.5)


def test_default_rate(small_code):
    h, _ = small_code
    assert S.default_rate(h) == pytest.approx((h.num_cols - h.num_rows) / h.num_cols)
