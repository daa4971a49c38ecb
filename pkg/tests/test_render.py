import json

import numpy as np
import pytest

from matebench import render as rnd


def test_param_render_deterministic():
    spec = rnd.RenderSpec(plane="parameter", resolution=128, max_iter=80)
    img1, side1 = rnd.render(spec)
    img2, _ = rnd.render(rnd.RenderSpec(plane="parameter", resolution=128, max_iter=80))
    assert np.array_equal(img1, img2)
    assert rnd.encode_png(img1) == rnd.encode_png(img2)


def test_param_render_structure():
    spec = rnd.RenderSpec(plane="parameter", resolution=160, max_iter=110)
    counts = rnd.escape_counts_parameter(spec)
    # outer quasicircle region escapes fast
    assert 1 <= counts[0, 0] <= 14
    # the mating locus is non-escaping: the rabbit-mating center stays black
    x, y = spec.to_pixel(1.5 + 0.8660254j, 160)
    assert counts[int(round(y)), int(round(x))] == 0
    # capture cascade: the region around a=2 escapes at a small index
    x, y = spec.to_pixel(2.0 + 0j, 160)
    assert 0 < counts[int(round(y)), int(round(x))] <= 10
    frac_black = (counts == 0).mean()
    assert 0.005 < frac_black < 0.5


def test_dynamical_render():
    spec = rnd.RenderSpec(plane="dynamical", a=2.0 + 0j, resolution=96,
                          max_iter=60)
    img, side = rnd.render(spec)
    assert img.shape == (96, 96, 3)
    assert side["spec"]["plane"] == "dynamical"


def test_overlay_sidecar():
    spec = rnd.RenderSpec(
        plane="dynamical", a=2.5 + 0.5j, center=-0.7 + 0j, half_width=3.0,
        resolution=96, max_iter=50,
        overlays=[{"kind": "bubble-ray", "theta": "1/7", "depth": 24}],
    )
    img, side = rnd.render(spec)
    ov = side["overlays"][0]
    assert ov["kind"] == "bubble-ray"
    assert ov["polylines"] and ov["markers"]
    json.dumps(side)  # serializable


def test_spec_validation():
    with pytest.raises(ValueError):
        rnd.RenderSpec(plane="nope").validate()
    with pytest.raises(ValueError):
        rnd.RenderSpec(resolution=0).validate()
    with pytest.raises(ValueError):
        rnd.RenderSpec(half_width=-1).validate()
    with pytest.raises(ValueError):
        rnd.RenderSpec(coloring="rainbow").validate()


def test_png_roundtrip_header():
    img = np.zeros((8, 8, 3), dtype=np.uint8)
    img[2, 3] = (10, 200, 30)
    data = rnd.encode_png(img)
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    ppm = rnd.encode_ppm(img)
    assert ppm.startswith(b"P6\n8 8\n255\n")


def test_tile_seams():
    # adjacent tiles at the same zoom share the sampling lattice on edges
    s1 = rnd.tile_spec("parameter", 1, 0, 0, max_iter=60)
    s2 = rnd.tile_spec("parameter", 1, 1, 0, max_iter=60)
    c1 = rnd.escape_counts_parameter(s1)
    c2 = rnd.escape_counts_parameter(s2)
    assert np.array_equal(c1[:, -1], c2[:, 0])


def test_tile_out_of_range():
    with pytest.raises(ValueError):
        rnd.tile_spec("parameter", 1, 2, 0)


def test_tile_zoom0_matches_render():
    s = rnd.tile_spec("parameter", 0, 0, 0, max_iter=60)
    img1, _ = rnd.render(s)
    spec = rnd.RenderSpec(plane="parameter", center=s.center,
                          half_width=s.half_width, resolution=256, max_iter=60)
    img2, _ = rnd.render(spec)
    assert np.array_equal(img1, img2)
