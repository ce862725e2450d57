import math
import os

import numpy as np
import pytest

from locpress.cli import main
from locpress.report import RunConfig, ConfigError


def read_csv(path):
    rows = []
    header = None
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    return header, rows


def test_pressure_preset_full2(tmp_path, capsys):
    code = main(["--out", str(tmp_path), "--system", "full2", "--potential", "zero",
                 "pressure"])
    assert code == 0
    header, rows = read_csv(tmp_path / "pressure.csv")
    assert header == ["t1", "pressure", "entropy", "rv1"]
    assert float(rows[0][1]) == pytest.approx(math.log(2), abs=1e-10)


def test_pressure_preset_golden(tmp_path):
    code = main(["--out", str(tmp_path), "--system", "golden", "--potential", "zero",
                 "pressure"])
    assert code == 0
    _, rows = read_csv(tmp_path / "pressure.csv")
    assert float(rows[0][1]) == pytest.approx(0.4812118250596035, abs=1e-8)


def test_pressure_grid_convex(tmp_path):
    grid = " ".join(str(round(t, 2)) for t in np.linspace(-2, 2, 9))
    code = main(["--out", str(tmp_path), "--system", "full2", "--potential",
                 "indicator:1", "pressure", "--t-grid", grid])
    assert code == 0
    _, rows = read_csv(tmp_path / "pressure.csv")
    ts = [float(r[0]) for r in rows]
    Ps = [float(r[1]) for r in rows]
    for t, P in zip(ts, Ps):
        assert P == pytest.approx(math.log(1 + math.exp(t)), abs=1e-10)
    second = np.diff(Ps, 2)
    assert np.all(second > -1e-10)  # convex along the grid


def test_rotset_segment(tmp_path):
    code = main(["--out", str(tmp_path), "--system", "full2", "--potential",
                 "indicator:1", "rotset", "--points", "50", "--max-period", "8"])
    assert code == 0
    header, rows = read_csv(tmp_path / "rotset.csv")
    assert header[:2] == ["period", "generator"]
    vals = [float(r[2]) for r in rows]
    assert min(vals) == 0.0 and max(vals) == 1.0
    assert not os.path.exists(tmp_path / "rotset.svg")  # 1-d cloud: no figure


def test_rotset_fish_figure(tmp_path):
    code = main(["--out", str(tmp_path), "--system", "full4", "--potential",
                 "fish-figure1", "rotset", "--points", "1000", "--fan"])
    assert code == 0
    header, rows = read_csv(tmp_path / "rotset.csv")
    assert len(rows) >= 1000
    svg = (tmp_path / "rotset.svg").read_text()
    assert svg.lstrip().startswith("<?xml") and "</svg>" in svg
    hull_header, hull_rows = read_csv(tmp_path / "rotset_hull.csv")
    assert len(hull_rows) >= 5


def test_localized_binary_benchmark(tmp_path):
    code = main(["--out", str(tmp_path), "--system", "full2", "--potential",
                 "indicator:1", "localized", "--w", "0.9", "--r", "0.05",
                 "--nmax", "12 16 20", "--mode", "both"])
    assert code == 0
    _, dual_rows = read_csv(tmp_path / "localized_dual.csv")
    H = -(0.9 * math.log(0.9) + 0.1 * math.log(0.1))
    assert float(dual_rows[0][2]) == pytest.approx(H, abs=1e-8)
    _, direct_rows = read_csv(tmp_path / "localized_direct.csv")
    final = [r for r in direct_rows if r[0] == "20"][0]
    assert abs(float(final[3]) - H) < 0.07


def test_localized_check_mode(tmp_path, capsys):
    code = main(["--out", str(tmp_path), "--system", "full2", "--potential",
                 "indicator:1", "localized", "--w", "0.5", "--mode", "check"])
    assert code == 0
    out = capsys.readouterr().out
    assert "dual dominates" in out
    header, rows = read_csv(tmp_path / "localized_check.csv")
    assert header[-1] == "dominated"
    assert all(r[-1] == "1" for r in rows)


def test_localized_fish_direct_only(tmp_path):
    code = main(["--out", str(tmp_path), "--system", "full4", "--potential",
                 "fish-figure1", "localized", "--w", "0 0", "--r", "0.05",
                 "--nmax", "12 18", "--direct-only"])
    assert code == 0
    _, rows = read_csv(tmp_path / "localized_direct.csv")
    final = [r for r in rows if r[0] == "18"][0]
    assert float(final[3]) >= math.log(2) - 0.01


def test_localized_dual_boundary_refused(tmp_path, capsys):
    code = main(["--out", str(tmp_path), "--system", "full2", "--potential",
                 "indicator:1", "localized", "--w", "1.0", "--mode", "dual"])
    assert code == 1
    assert "dual solve refused" in capsys.readouterr().err


def test_gallery_default(tmp_path):
    code = main(["--out", str(tmp_path), "gallery"])
    assert code == 0
    header, rows = read_csv(tmp_path / "gallery.csv")
    assert header == ["example", "claim", "expected", "measured", "tol", "pass",
                      "anchor"]
    assert {r[0] for r in rows} == {"example1", "example2", "example3", "fish"}
    assert all(r[5] == "pass" for r in rows)
    svg = (tmp_path / "fish.svg").read_text()
    assert "</svg>" in svg


def test_gallery_only(tmp_path):
    code = main(["--out", str(tmp_path), "gallery", "--only", "example2"])
    assert code == 0
    _, rows = read_csv(tmp_path / "gallery.csv")
    assert {r[0] for r in rows} == {"example2"}


def test_config_file_round_trip(tmp_path):
    config = tmp_path / "run.ini"
    config.write_text(
        "[system]\n"
        "matrix =\n"
        "  2\n"
        "  1 1\n"
        "  1 0\n"
        "[potential]\n"
        "kind = locally-constant\n"
        "depth = 1\n"
        "dim = 1\n"
        "values =\n"
        "  0 0.0\n"
        "  1 1.0\n"
        "[localized]\n"
        "w = 0.27\n"
        "r = 0.05\n"
        "horizons = 10 14\n"
    )
    code = main(["--config", str(config), "--out", str(tmp_path / "out"),
                 "localized", "--mode", "direct"])
    assert code == 0
    _, rows = read_csv(tmp_path / "out" / "localized_direct.csv")
    assert len(rows) == 2


def test_corrupt_config_exits_2(tmp_path, capsys):
    config = tmp_path / "bad.ini"
    config.write_text("[system]\nnonsense = 1\n")
    code = main(["--config", str(config), "--out", str(tmp_path), "pressure"])
    assert code == 2
    assert "unknown key" in capsys.readouterr().err


def test_unknown_section_rejected():
    with pytest.raises(ConfigError):
        RunConfig.parse("[mystery]\nx = 1\n")


def test_deterministic_outputs(tmp_path):
    for sub in ("a", "b"):
        main(["--out", str(tmp_path / sub), "--seed", "3", "--system", "full2",
              "--potential", "indicator:1", "pressure", "--t-grid", "0 1 2"])
    assert (tmp_path / "a" / "pressure.csv").read_text() == (
        tmp_path / "b" / "pressure.csv"
    ).read_text()


def test_seed_recorded_in_header(tmp_path):
    main(["--out", str(tmp_path), "--seed", "11", "--system", "full2",
          "--potential", "zero", "pressure"])
    text = (tmp_path / "pressure.csv").read_text()
    assert "# seed=11" in text
