import json
from pathlib import Path

import numpy as np
import pytest

import noisewarp as nw

DATA = Path(__file__).resolve().parents[1] / "data"


def test_white_noise_is_deterministic():
    a = nw.sample_white_noise(64, 64, 2, seed=3)
    assert a.shape == (2, 64, 64) and a.dtype == np.float32
    np.testing.assert_array_equal(a, nw.sample_white_noise(64, 64, 2, seed=3))


def test_warp_identity_and_pan():
    init = nw.sample_white_noise(32, 32, 1, seed=1)
    still = np.zeros((3, 2, 32, 32), np.float32)
    seq = nw.warp_sequence(init, still, seed=1)
    assert seq.shape == (4, 1, 32, 32)
    for t in range(4):
        np.testing.assert_array_equal(seq[t], init)

    pan = nw.camera_flow("pan", 2.0, 32, 32, 3)
    seq = nw.warp_sequence(init, pan, seed=1)
    np.testing.assert_array_equal(seq[1, 0, :, 2:], init[0, :, :-2])


def test_warped_zoom_passes_battery():
    flows = nw.camera_flow("zoom", 1.05, 64, 64, 31)
    seqs = [nw.warp_sequence(nw.sample_white_noise(64, 64, 1, seed=s), flows, seed=s)[1:] for s in range(4)]
    result = nw.gaussianity_battery(np.concatenate(seqs), seed=0)
    assert result["pass"]
    assert result["jsonl"].count("\n") == 121


def test_post_processing():
    seq = nw.warp_sequence(nw.sample_white_noise(64, 64, 1, seed=2), nw.camera_flow("rotate", 0.05, 64, 64, 9), seed=2)
    np.testing.assert_array_equal(nw.degrade(seq, 0.0), seq)
    latent = nw.downsample_to_latent(seq, 8, 4)
    assert latent.shape == (3, 1, 8, 8)


def test_stats_oracle():
    grad = np.tile(np.arange(16, dtype=np.float32), (16, 1))
    assert nw.morans_i(grad)["index"] == pytest.approx(0.93333333333333324, abs=1e-12)
    with pytest.raises(nw.DegenerateInputError):
        nw.morans_i(np.zeros((16, 16), np.float32))
    stat, p = nw.ks_test(nw.sample_white_noise(64, 64, 1, seed=0)[0], 200, seed=0)
    assert 0.0 <= stat <= 1.0 and 0.0 <= p <= 1.0


def test_golden_formats():
    flo = (DATA / "ramp_3x2.flo").read_bytes()
    flow = nw.read_flo(flo)
    assert flow.shape == (2, 2, 3)
    assert nw.write_flo(flow) == flo
    gwtf = (DATA / "ramp_2x1x4x4.gwtf").read_bytes()
    seq, seed = nw.read_container(gwtf)
    assert seq.shape == (2, 1, 4, 4) and seed == 0x0123456789ABCDEF
    assert nw.write_container(seq, seed) == gwtf
    with pytest.raises(nw.FormatError):
        nw.read_flo(b"\x00" * 20)


def test_scene_flows():
    scene = {
        "canvas": {"h": 16, "w": 16},
        "frames": 3,
        "layers": [],
        "background": {"track": [{"tx": 0}, {"tx": 1}, {"tx": 2}]},
    }
    flows = nw.render_scene_flows(json.dumps(scene))
    assert flows.shape == (2, 2, 16, 16)
    np.testing.assert_allclose(flows[:, 0], 1.0, atol=1e-6)
    with pytest.raises(ValueError):
        nw.render_scene_flows("{")
