"""Gaussian noise warping along optical flow.

Arrays are float32: noise frames are (C, H, W), sequences (F, C, H, W) and
flows (T, 2, H, W) with dx then dy.
"""

from ._core import (
    DegenerateInputError,
    FormatError,
    camera_flow,
    degrade,
    downsample_to_latent,
    gaussianity_battery,
    ks_test,
    morans_i,
    read_container,
    read_flo,
    render_scene_flows,
    sample_white_noise,
    warp_sequence,
    write_container,
    write_flo,
)

__all__ = [
    "DegenerateInputError",
    "FormatError",
    "camera_flow",
    "degrade",
    "downsample_to_latent",
    "gaussianity_battery",
    "ks_test",
    "morans_i",
    "read_container",
    "read_flo",
    "render_scene_flows",
    "sample_white_noise",
    "warp_sequence",
    "write_container",
    "write_flo",
]
