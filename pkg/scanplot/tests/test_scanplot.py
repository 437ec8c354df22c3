import shutil
import subprocess

import numpy as np
import pytest

from scanplot import CsvFormatError, build_figure, load_scan, render
from scanplot.cli import main

HEADER = "phi00,phi10,classical_bound,argmax_a,argmax_b,family"


def grid_csv(tmp_path, phi00, phi10, values, family="A", name="scan.csv"):
    lines = [HEADER]
    for i, p00 in enumerate(phi00):
        for j, p10 in enumerate(phi10):
            lines.append(f"{p00:.17g},{p10:.17g},{values[i][j]:.15g},"
                         f"0;1;2,2;0;1,{family}")
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def small_csv(tmp_path):
    phi00 = np.linspace(0.0, 2.0, 4)
    phi10 = np.linspace(0.0, 3.0, 3)
    values = 5.0 + np.arange(12.0).reshape(4, 3) / 12.0
    return grid_csv(tmp_path, phi00, phi10, values), phi00, phi10, values


def test_load_scan_reconstructs_grid(small_csv):
    path, phi00, phi10, values = small_csv
    data = load_scan(path)
    assert data.family == "A"
    # axes are written at 17 significant digits and round-trip exactly;
    # bounds carry 15, so compare those at that precision
    np.testing.assert_array_equal(data.phi00, phi00)
    np.testing.assert_array_equal(data.phi10, phi10)
    np.testing.assert_allclose(data.values, values, rtol=1e-14, atol=0.0)


def test_colorbar_spans_csv_range(small_csv, tmp_path):
    path, _, _, values = small_csv
    out = tmp_path / "scan.png"
    data = render(path, out, marker=(1.0, 1.5))
    assert out.exists() and out.stat().st_size > 0
    fig, _, mesh, _ = build_figure(data)
    lo, hi = mesh.get_clim()
    # color limits are read from the file, never recomputed
    assert round(lo, 3) == round(float(np.min(values)), 3)
    assert round(hi, 3) == round(float(np.max(values)), 3)
    import matplotlib.pyplot as plt

    plt.close(fig)


def test_marker_is_wrapped_into_window(small_csv):
    path = small_csv[0]
    data = load_scan(path)
    # phi10 = -0.5 is outside [0, 3] but -0.5 + 2*pi is not inside either,
    # so it stays put; phi00 = 1.0 - 2*pi wraps back to 1.0
    fig, ax, _, _ = build_figure(data, marker=(1.0 - 2 * np.pi, 1.5))
    (line,) = [ln for ln in ax.get_lines()]
    assert line.get_xdata()[0] == pytest.approx(1.0, abs=1e-12)
    assert line.get_ydata()[0] == pytest.approx(1.5, abs=1e-12)
    import matplotlib.pyplot as plt

    plt.close(fig)


def test_single_cell_csv(tmp_path):
    path = grid_csv(tmp_path, [0.7], [1.1], [[5.5]])
    out = tmp_path / "one.png"
    data = render(path, out)
    assert data.values.shape == (1, 1)
    assert out.exists() and out.stat().st_size > 0


def test_family_b_same_path(tmp_path):
    phi00 = [0.0, 1.0]
    phi10 = [0.0, 1.0]
    values = [[5.4, 5.5], [5.6, 5.7]]
    path = grid_csv(tmp_path, phi00, phi10, values, family="B")
    data = load_scan(path)
    assert data.family == "B"
    fig, ax, _, _ = build_figure(data)
    assert "family B" in ax.get_title()
    import matplotlib.pyplot as plt

    plt.close(fig)


def test_output_format_follows_extension(small_csv, tmp_path):
    path = small_csv[0]
    out = tmp_path / "scan.pdf"
    render(path, out)
    assert out.read_bytes()[:5] == b"%PDF-"


# ---- malformed input -------------------------------------------------------

def run_cli(path, tmp_path, capsys):
    rc = main([str(path), str(tmp_path / "out.png")])
    return rc, capsys.readouterr().err


def test_bad_header_reports_line_1(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("phi00,phi10,bound\n0,0,5.5,0;1;2,2;0;1,A\n")
    rc, err = run_cli(path, tmp_path, capsys)
    assert rc == 1
    assert f"{path}:1:" in err


def test_wrong_field_count_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER + "\n0,0,5.5,0;1;2,2;0;1,A\n0,1,5.6\n")
    rc, err = run_cli(path, tmp_path, capsys)
    assert rc == 1
    assert f"{path}:3:" in err and "6 fields" in err


def test_unparsable_number_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER + "\n0,0,high,0;1;2,2;0;1,A\n")
    rc, err = run_cli(path, tmp_path, capsys)
    assert rc == 1
    assert f"{path}:2:" in err and "classical_bound" in err


def test_duplicate_cell_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER + "\n0,0,5.5,0;1;2,2;0;1,A\n0,0,5.6,0;1;2,2;0;1,A\n")
    rc, err = run_cli(path, tmp_path, capsys)
    assert rc == 1
    assert f"{path}:3:" in err and "duplicate" in err


def test_incomplete_grid_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER + "\n0,0,5.5,0;1;2,2;0;1,A\n"
                             "0,1,5.6,0;1;2,2;0;1,A\n"
                             "1,0,5.7,0;1;2,2;0;1,A\n")
    with pytest.raises(CsvFormatError, match="incomplete"):
        load_scan(path)


def test_mixed_families_rejected(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER + "\n0,0,5.5,0;1;2,2;0;1,A\n0,1,5.6,0;1;2,2;0;1,B\n")
    rc, err = run_cli(path, tmp_path, capsys)
    assert rc == 1
    assert f"{path}:3:" in err and "family" in err


def test_header_only_rejected(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text(HEADER + "\n")
    rc, err = run_cli(path, tmp_path, capsys)
    assert rc == 1
    assert "no data rows" in err


# ---- integration with the scan CLI ----------------------------------------

@pytest.mark.skipif(shutil.which("hwsteer") is None,
                    reason="scan CLI not on PATH")
def test_renders_real_scan_output(tmp_path):
    # a 46-point axis over [0, 2*pi] puts the distinguished point
    # (4*pi/9, 16*pi/9) on the lattice at indices (10, 40)
    csv_path = tmp_path / "scan.csv"
    subprocess.run(["hwsteer", "scan", "--resolution", "46x46",
                    "--out", str(csv_path)], check=True)
    out = tmp_path / "scan.png"
    rc = main([str(csv_path), str(out),
               "--marker", f"{4 * np.pi / 9}", f"{-2 * np.pi / 9}"])
    assert rc == 0
    assert out.exists() and out.stat().st_size > 0
    data = load_scan(csv_path)
    assert data.values.shape == (46, 46)
    assert data.values[10, 40] == pytest.approx(6 * np.cos(np.pi / 9), abs=1e-9)
    assert round(data.vmax, 3) == 6.0
