import pytest

from opfam.errors import InputError
from opfam.verify import (
    ALL_SUITES,
    ANCHOR_TABLE,
    CHECKS,
    PASS,
    ScenarioConfig,
    _cells_match_one_off,
    run_suite,
)


def test_registry_sanity():
    ids = [cid for cid, _, _ in CHECKS]
    assert len(ids) == len(set(ids))
    assert all(suite in ALL_SUITES for _, suite, _ in CHECKS)
    assert len(ANCHOR_TABLE) == len(set(ANCHOR_TABLE))


def test_config_validation():
    with pytest.raises(InputError):
        ScenarioConfig(dim_min=1)
    with pytest.raises(InputError):
        ScenarioConfig(delta_res=0.0)
    cfg = ScenarioConfig(dim_min=2, dim_max=4)
    assert [cfg.dims(k) for k in range(4)] == [2, 3, 4, 2]


def test_subset_run_deterministic():
    cfg = ScenarioConfig(seed=3, suites=("linalg",))
    b1 = run_suite(cfg)
    b2 = run_suite(cfg)
    assert b1.render_machine() == b2.render_machine()
    assert all(r.suite == "linalg" for r in b1.results)
    assert all(r.verdict == PASS for r in b1.results)
    assert b1.exit_code == 0
    assert "schema=opfam-verify-v1" in b1.render_machine()


def test_unknown_suite_rejected():
    with pytest.raises(InputError):
        run_suite(ScenarioConfig(suites=("nope",)))


def test_seed_changes_report():
    a = run_suite(ScenarioConfig(seed=3, suites=("linalg",)))
    b = run_suite(ScenarioConfig(seed=4, suites=("linalg",)))
    assert a.render_machine() != b.render_machine()


def test_cells_match_one_off():
    assert _cells_match_one_off({(3, 3)}, {(3, 4)})
    assert _cells_match_one_off({(3, 3), (3, 4)}, {(3, 3)})
    assert not _cells_match_one_off({(3, 3)}, {(5, 5)})
    assert not _cells_match_one_off(set(), {(1, 1)})


def test_report_files_written(tmp_path):
    cfg = ScenarioConfig(seed=5, suites=("linalg",), out_dir=str(tmp_path / "rep"))
    bundle = run_suite(cfg)
    report = (tmp_path / "rep" / "report.txt").read_text()
    summary = (tmp_path / "rep" / "summary.txt").read_text()
    assert report == bundle.render_machine()
    assert "verification summary" in summary
