import json
import threading
import urllib.error
import urllib.request

import pytest

from matebench import service as svc


@pytest.fixture(scope="module")
def server():
    httpd = svc.serve(port=0)  # ephemeral port
    port = httpd.server_address[1]
    t = threading.Thread(target=httpd.serve_forever, daemon=True)
    t.start()
    yield f"http://127.0.0.1:{port}"
    httpd.shutdown()


def get(base, path):
    with urllib.request.urlopen(base + path, timeout=120) as r:
        return r.headers["Content-Type"], r.read()


def test_health(server):
    ct, body = get(server, "/health")
    d = json.loads(body)
    assert d["ok"] and "version" in d


def test_analyze_point(server):
    ct, body = get(server, "/analyze/point?a=2,0")
    d = json.loads(body)
    assert d["capture_generation"] == 2
    assert len(d["fixed_points"]) == 3


def test_portrait_endpoint(server):
    ct, body = get(server, "/portrait?angles=1/7,2/7,4/7")
    d = json.loads(body)
    assert d["valid"] and d["characteristic"] == "(1/7,2/7)"
    ct, body = get(server, "/portrait?angles=1/7,2/7")
    d = json.loads(body)
    assert not d["valid"] and d["reason"]


def test_trace_endpoint(server):
    ct, body = get(server, "/trace?a=2.5,0.5&theta=1/7&depth=40")
    d = json.loads(body)
    assert d["landed"] and d["landing"]
    assert d["bubbles"][0]["generation"] == 1


def test_tile_endpoint_and_cache(server):
    ct, b1 = get(server, "/tile?plane=parameter&zoom=1&x=0&y=0&max_iter=60")
    assert ct == "image/png" and b1[:4] == b"\x89PNG"
    ct, b2 = get(server, "/tile?plane=parameter&zoom=1&x=0&y=0&max_iter=60")
    assert b1 == b2


def test_bad_requests(server):
    with pytest.raises(urllib.error.HTTPError) as e:
        get(server, "/analyze/point")
    assert e.value.code == 400
    with pytest.raises(urllib.error.HTTPError) as e:
        get(server, "/nope")
    assert e.value.code == 404


def test_version_tag_everywhere(server):
    for path in ("/health", "/analyze/point?a=2,0", "/portrait?angles=1/3,2/3"):
        _, body = get(server, path)
        assert json.loads(body)["version"]


def test_cli_roundtrips(tmp_path):
    from matebench import cli

    rc = cli.main(["portrait", "--angles", "1/7,2/7,4/7"])
    assert rc == 0
    rc = cli.main(["portrait", "--angles", "1/7,3/7"])
    assert rc == 2
    out = tmp_path / "img.png"
    rc = cli.main([
        "render", "--plane", "dynamical", "--a", "2,0",
        "--resolution", "64", "--max-iter", "40", "--out", str(out),
    ])
    assert rc == 0 and out.exists()
    assert (tmp_path / "img.json").exists()


def test_cli_config(tmp_path):
    from matebench import cli

    cfg = tmp_path / "conf"
    cfg.write_text("half_width = 2.0  # comment\njunk line\n")
    assert cli.load_config(str(cfg)) == {"half_width": "2.0"}
