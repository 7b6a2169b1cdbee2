import numpy as np
import pytest

from opfam.cli import main
from opfam.families import CoeffFn, OperatorFamily
from opfam.fileio import save_family, save_matrix, save_vector


@pytest.fixture()
def workdir(tmp_path):
    save_matrix(2.0 * np.eye(3), tmp_path / "t.mat")
    save_matrix(2.0 * np.eye(3) + np.eye(3, k=1), tmp_path / "s.mat")
    save_family(OperatorFamily.constant(np.diag([1.0, 2.0])), tmp_path / "d.fam")
    flip = OperatorFamily.from_terms(
        2,
        [
            (CoeffFn.const(), np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)),
            (CoeffFn.pow_h(1.0), np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)),
        ],
    )
    save_family(flip, tmp_path / "flip.fam")
    save_vector(np.array([1.0, 0.0], dtype=complex), tmp_path / "e1.vec")
    return tmp_path


def test_bracket_command(workdir, capsys):
    rc = main(["bracket", "--t", str(workdir / "t.mat"), "--s", str(workdir / "s.mat"), "--nmax", "10"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "verdict: Equivalent" in out


def test_bracket_csv_output(workdir, capsys):
    out_path = workdir / "roots.csv"
    rc = main(
        [
            "bracket",
            "--t", str(workdir / "t.mat"),
            "--s", str(workdir / "s.mat"),
            "--nmax", "8",
            "--emit", "csv",
            "--out", str(out_path),
        ]
    )
    assert rc == 0
    lines = out_path.read_text().splitlines()
    assert lines[0] == "n,norm,root,rev_norm,rev_root"
    assert len(lines) == 9


def test_equivalence_command(workdir, capsys):
    rc = main(
        ["equivalence", "--f", str(workdir / "d.fam"), "--g", str(workdir / "d.fam")]
    )
    assert rc == 0
    assert "ToZero" in capsys.readouterr().out
    rc = main(
        [
            "equivalence",
            "--f", str(workdir / "d.fam"),
            "--g", str(workdir / "d.fam"),
            "--mode", "qn",
        ]
    )
    assert rc == 0
    assert "Equivalent" in capsys.readouterr().out


def test_spectrum_command_writes_outputs(workdir, capsys):
    csv_path = workdir / "grid.csv"
    pgm_path = workdir / "grid.pgm"
    svg_path = workdir / "grid.svg"
    rc = main(
        [
            "spectrum",
            "--family", str(workdir / "flip.fam"),
            "--rect", "-2:2:-2:2",
            "--res", "32",
            "--out", str(csv_path),
            "--pgm", str(pgm_path),
            "--svg", str(svg_path),
        ]
    )
    assert rc == 0
    assert csv_path.read_text().startswith("re,im,class,min_tail_sigma")
    assert pgm_path.read_text().startswith("P2\n32 32\n255")
    assert svg_path.read_text().startswith("<?xml")


def test_local_spectrum_and_member(workdir, capsys):
    rc = main(
        [
            "local-spectrum",
            "--family", str(workdir / "d.fam"),
            "--x", str(workdir / "e1.vec"),
            "--rect", "-3:3:-3:3",
            "--res", "32",
            "--out", str(workdir / "local.csv"),
        ]
    )
    assert rc == 0
    rc = main(
        [
            "local-member",
            "--family", str(workdir / "d.fam"),
            "--x", str(workdir / "e1.vec"),
            "--a", "disc 1,0,0.3",
            "--rect", "-3:3:-3:3",
            "--res", "32",
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert "member: True" in out


def test_plot_roundtrip(workdir, capsys):
    main(
        [
            "spectrum",
            "--family", str(workdir / "d.fam"),
            "--rect", "-3:3:-3:3",
            "--res", "16",
            "--out", str(workdir / "g.csv"),
            "--pgm", str(workdir / "g.pgm"),
        ]
    )
    rc = main(
        [
            "plot",
            "--grid-csv", str(workdir / "g.csv"),
            "--format", "pgm",
            "--out", str(workdir / "g2.pgm"),
        ]
    )
    assert rc == 0
    assert (workdir / "g.pgm").read_bytes() == (workdir / "g2.pgm").read_bytes()


def test_input_errors_exit_2(workdir, tmp_path, capsys):
    rc = main(["bracket", "--t", str(tmp_path / "missing.mat"), "--s", str(workdir / "s.mat")])
    assert rc == 2
    corrupt = tmp_path / "bad.fam"
    corrupt.write_text("dim 2\nterm wiggle\n")
    rc = main(["equivalence", "--f", str(corrupt), "--g", str(workdir / "d.fam")])
    err = capsys.readouterr().err
    assert rc == 2
    assert "bad.fam" in err
    rc = main(
        [
            "spectrum",
            "--family", str(workdir / "d.fam"),
            "--rect", "nonsense",
            "--res", "16",
        ]
    )
    assert rc == 2


def test_verify_subset(workdir, capsys, tmp_path):
    rc = main(
        [
            "verify",
            "--seed", "11",
            "--suite", "linalg",
            "--out", str(tmp_path / "rep"),
        ]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert "checks run" in out
    report = (tmp_path / "rep" / "report.txt").read_text()
    assert report.startswith("schema=opfam-verify-v1")
    assert "sup01-norm-algebra" in report
