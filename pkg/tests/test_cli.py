import json
import subprocess
import sys

import pytest

from quadric_motives.cli import run
from quadric_motives.correspondences import Correspondence, diagonal
from quadric_motives.exact_linalg import ZZ, CoeffRing
from quadric_motives.motive_lift import IsoClass
from quadric_motives.rationality import RationalityContext
from quadric_motives.split_chow import GaloisContext, SplitQuadric

Z4 = CoeffRing(4)


def call(argv, capsys):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out), out


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_verify_passes(capsys):
    code, report, _ = call(["verify", "--dim-max", "2", "--n", "3"], capsys)
    assert code == 0 and report["verdict"] == "pass"
    assert {"dim", "disc", "mod2_classes", "integral_classes", "surjectivity",
            "injectivity", "witnesses"} <= set(report["shapes"][0])


def test_verify_is_byte_deterministic(capsys):
    argv = ["verify", "--dim-max", "2", "--n", "2", "--context", "invariant"]
    _, _, first = call(argv, capsys)
    _, _, second = call(argv, capsys)
    assert first == second


def test_verify_resource_error(capsys):
    code, out, _ = call(["verify", "--dim-max", "5"], capsys)
    assert code == 3 and out["error"] == "resource"


def test_verify_bad_galois(capsys):
    code, out, _ = call(["verify", "--n", "1", "--galois-r", "2"], capsys)
    assert code == 2


def test_enumerate(capsys):
    code, out, _ = call(["enumerate", "--dim", "2", "--disc", "1"], capsys)
    assert code == 0 and out["count"] == len(out["idempotents"]) == 2
    for item in out["idempotents"]:
        Correspondence.from_json(item["projector"])
        IsoClass.from_json(item["class"])


def test_enumerate_bad_disc(capsys):
    assert run(["enumerate", "--dim", "2", "--disc", "2"]) == 2
    assert run(["enumerate", "--dim", "3", "--disc", "1"]) == 2


def test_lift_projector_trace(tmp_path, capsys):
    X = SplitQuadric(2, (0,))
    tau = Correspondence.from_blocks(X, X, Z4, {1: [[3, 1], [2, 2]]})
    ctx = RationalityContext(X, X, GaloisContext(1, 2), [tau])
    path = write(tmp_path, "tau.json", {"projector": tau.to_json(), "context": ctx.to_json()})
    code, out, _ = call(["lift-projector", "--input", path], capsys)
    assert code == 0
    rho = Correspondence.from_json(out["projector"])
    assert rho.ring == ZZ and rho.blocks[1].to_rows() == [[-1, 1], [-2, 2]]


def test_lift_projector_from_mod2(tmp_path, capsys):
    X = SplitQuadric(3, (0,))
    pi = diagonal(X, CoeffRing(2))
    path = write(tmp_path, "pi.json", {"projector": pi.to_json(), "n": 3})
    code, out, _ = call(["lift-projector", "--input", path], capsys)
    assert code == 0 and Correspondence.from_json(out["projector"]) == diagonal(X)


def test_lift_iso_isomorphic(tmp_path, capsys):
    X = SplitQuadric(2, (0,))
    alpha = Correspondence.from_blocks(X, X, CoeffRing(8), {0: [[1]], 1: [[1, 2], [2, 1]], 2: [[1]]})
    ctx = RationalityContext(X, X, GaloisContext(1, 3), [alpha])
    data = {"rho": diagonal(X).to_json(), "sigma": diagonal(X).to_json(),
            "alpha": alpha.to_json(), "context": ctx.to_json()}
    code, out, _ = call(["lift-iso", "--input", write(tmp_path, "iso.json", data)], capsys)
    assert code == 0 and out["result"] == "isomorphic"
    c = Correspondence.from_json(out["iso"])
    assert c.blocks[1].to_rows() == [[-1, 0], [0, -1]]
    assert Correspondence.from_json(out["iso"]).to_json() == out["iso"]


def test_lift_iso_mismatched_markers(tmp_path, capsys):
    X, Y = SplitQuadric(2, (1, 0)), SplitQuadric(2, (0, 1))
    data = {"rho": diagonal(X).to_json(), "sigma": diagonal(Y).to_json(),
            "alpha": Correspondence.zero(X, Y, Z4).to_json()}
    code, out, _ = call(["lift-iso", "--input", write(tmp_path, "iso.json", data)], capsys)
    assert code == 0 and out == {"result": "not isomorphic"}


def test_classify(tmp_path, capsys):
    X = SplitQuadric(2, (1,))
    code, out, _ = call(["classify", "--input", write(tmp_path, "m.json", {"projector": diagonal(X).to_json()})], capsys)
    assert code == 0
    assert IsoClass.from_json(out["class"]) == IsoClass((0, 2), (1, (1,)))


def test_classify_non_idempotent(tmp_path, capsys):
    X = SplitQuadric(2, (0,))
    bad = diagonal(X).scale(2).to_json()
    code, out, _ = call(["classify", "--input", write(tmp_path, "bad.json", {"projector": bad})], capsys)
    assert code == 2 and out["error"] == "input"


@pytest.mark.parametrize("content", ["not json", "[1, 2]", '{"projector": {"source": {"dim": 0}}}'])
def test_malformed_input(tmp_path, capsys, content):
    path = tmp_path / "x.json"
    path.write_text(content)
    assert run(["classify", "--input", str(path)]) == 2
    assert run(["classify", "--input", str(tmp_path / "missing.json")]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "quadric_motives", "enumerate", "--dim", "1"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["count"] == 2
