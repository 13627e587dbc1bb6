import json
import xml.etree.ElementTree as ET

import pytest

from tangent_arctic.cli import main
from tangent_arctic.config import ExperimentConfig
from tangent_arctic.profile import DefectSequence
from tangent_arctic.sampler import TilingState

SVG = "{http://www.w3.org/2000/svg}"


def test_count(capsys):
    assert main(["count", "--a", "1,3", "--oracle"]) == 0
    assert capsys.readouterr().out.split("\n")[:2] == ["3", "oracle agrees"]
    assert main(["count", "--a", "1,2,3"]) == 0
    assert capsys.readouterr().out.strip() == "1"
    assert main(["count", "--preset", "gap", "--n", "4"]) == 0
    assert int(capsys.readouterr().out) > 0


def test_count_errors(capsys):
    assert main(["count", "--a", "3,2"]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["count"]) == 2
    assert main(["count", "--a", "1,2,3,4,5,6,7", "--oracle"]) == 2


def test_sample_reproducible(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"s{k}.csv"
        assert main(["sample", "--preset", "gap", "--n", "12", "--seed", "7",
                     "--sweeps", "200", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0].startswith(b"x,y,type\n")
    other = tmp_path / "o.csv"
    main(["sample", "--preset", "gap", "--n", "12", "--seed", "8", "--sweeps", "200",
          "--out", str(other)])
    assert other.read_bytes() != outs[0]


def test_sample_exact_and_density(tmp_path):
    out = tmp_path / "d.csv"
    assert main(["sample", "--a", "1,3", "--samples", "50", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x,y,U,R,F" and len(lines) == 1 + 9
    for line in lines[1:]:
        assert sum(float(v) for v in line.split(",")[2:]) == pytest.approx(1.0)


def test_sample_svg_and_render(tmp_path):
    svg, state, csv_out = tmp_path / "t.svg", tmp_path / "t.txt", tmp_path / "t.csv"
    assert main(["sample", "--preset", "gap", "--n", "10", "--sweeps", "100", "--seed", "1",
                 "--svg", str(svg), "--state", str(state), "--out", str(csv_out)]) == 0
    root = ET.parse(svg).getroot()
    polys = root.findall(f".//{SVG}polygon")
    seq = DefectSequence((2, 4, 6, 8, 10, 22, 24, 26, 28, 30))
    assert len(polys) == (seq.n + 1) * seq.a[-1]
    assert len(root.findall(f".//{SVG}path")) >= 3  # outline plus curve portions
    st = TilingState.from_text(seq, state.read_text())
    assert st.is_valid()
    again = tmp_path / "r.svg"
    assert main(["render", "--preset", "gap", "--n", "10", "--svg", str(again), str(state)]) == 0
    assert again.read_bytes() == svg.read_bytes()


def test_render_rejects_bad_state(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 9\n3\n")
    assert main(["render", "--a", "1,3", "--svg", str(tmp_path / "x.svg"), str(bad)]) == 2
    assert "invalid tiling state" in capsys.readouterr().err


def test_curve(tmp_path):
    out, svg = tmp_path / "c.csv", tmp_path / "c.svg"
    assert main(["curve", "--preset", "gap", "--samples", "20", "--out", str(out),
                 "--svg", str(svg)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,X,Y,x_t,dx_dt,portion" and len(lines) == 1 + 4 * 20
    ET.parse(svg)


def test_verify(capsys):
    assert main(["verify", "--preset", "sawtooth", "--kind", "R", "--z", "0.3333333333333333",
                 "--n-list", "30,60"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "n,ell_star_over_n,xi_star,deviation" and out[-1].startswith("# fit")
    assert main(["verify", "--preset", "uniform"]) == 2
    assert main(["verify", "--preset", "gap", "--n-list", "40,20"]) == 2


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"preset": "sawtooth", "kind": "R", "z": 1 / 3, "n_list": [30]}))
    assert main(["verify", "--config", str(cfg)]) == 0
    assert capsys.readouterr().out.startswith("n,")
    cfg.write_text(json.dumps({"preset": "gap", "bogus": 1}))
    with pytest.raises(ValueError):
        ExperimentConfig.load(cfg)
    with pytest.raises(ValueError):
        ExperimentConfig.from_dict({"preset": "nope"})


def test_unwritable_output(capsys):
    assert main(["curve", "--preset", "gap", "--out", "/nonexistent/dir/c.csv"]) == 2
    assert "cannot write" in capsys.readouterr().err


def test_help_lists_csv_columns(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    assert "t,X,Y,x_t,dx_dt,portion" in capsys.readouterr().out
