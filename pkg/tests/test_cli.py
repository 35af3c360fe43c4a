import json

import pytest

from ypqlab.cli import ALL_CHECK_GROUPS, RunConfig, main, run_geodesic, run_verify


def test_verify_exits_zero_and_writes_json(tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = main(["verify", "--a", "0.5", "--points", "2", "--seed", "3",
               "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["all_pass"] is True
    assert report["params"] == {"a": 0.5, "c": 1.0}
    names = [r["check"] for r in report["checks"]]
    assert "einstein_base" in names and "poisson_brackets" in names
    for r in report["checks"]:
        assert set(r) == {"check", "identity", "points", "max_residual",
                          "tolerance", "pass", "error"}


def test_verify_reports_are_deterministic(tmp_path):
    paths = [tmp_path / f"r{i}.json" for i in range(2)]
    for p in paths:
        main(["verify", "--points", "2", "--seed", "9", "--out", str(p)])
    a, b = (json.loads(p.read_text()) for p in paths)
    a.pop("wall_time_s"); b.pop("wall_time_s")
    assert a == b


def test_verify_homogeneous_limit_skips_form_checks(tmp_path):
    out = tmp_path / "t11.json"
    rc = main(["verify", "--a", "0.5", "--c", "0", "--points", "2",
               "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    names = {r["check"] for r in report["checks"]}
    assert "einstein_base" in names
    assert "cky_psi" not in names
    assert set(report["skipped"]) >= {"cky", "sky", "parallel"}


def test_verify_fails_with_impossible_tolerance(tmp_path):
    rc = main(["verify", "--points", "1", "--tol", "1e-30",
               "--out", str(tmp_path / "x.json")])
    assert rc == 1


def test_unknown_check_group_is_configuration_error(tmp_path):
    rc = main(["verify", "--checks", "einstein,nonsense",
               "--out", str(tmp_path / "x.json")])
    assert rc == 2


def test_invalid_parameters_exit_two(tmp_path):
    rc = main(["verify", "--a", "2.0", "--out", str(tmp_path / "x.json")])
    assert rc == 2


def test_check_subset_runs_only_requested_groups(tmp_path):
    out = tmp_path / "sub.json"
    rc = main(["verify", "--checks", "einstein", "--points", "2",
               "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    names = {r["check"] for r in report["checks"]}
    assert names == {"einstein_base", "einstein_cone"}


def test_geodesic_csv_shape(tmp_path):
    out = tmp_path / "drift.csv"
    rc = main(["geodesic", "--seed", "2", "--t-end", "5", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().splitlines()
    header = lines[0].split(",")
    assert header[0] == "t"
    assert "H" in header and "J2" in header
    assert len(lines) == 102  # header + 101 samples
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert all(float(v) == 0.0 for v in first[1:])


def test_geodesic_explicit_state_and_exit_marker(tmp_path):
    # radial momentum large enough to leave the chart: the CSV ends with
    # a comment row recording the exit time
    out = tmp_path / "exit.csv"
    state = "1.4,0.2,0.0,0.1,0.3,0.0,0.0,3.0,0.0,0.0"
    main(["geodesic", "--state", state, "--t-end", "50", "--out", str(out)])
    assert "# domain_exit t=" in out.read_text()


def test_geodesic_malformed_state_exits_two(tmp_path):
    rc = main(["geodesic", "--state", "1,2,3", "--out", str(tmp_path / "x.csv")])
    assert rc == 2


def test_rank_report_shape(tmp_path):
    out = tmp_path / "rank.json"
    main(["rank", "--points", "2", "--seed", "5", "--out", str(out)])
    report = json.loads(out.read_text())
    assert report["classical_rank_all"] == [5]
    assert set(report) >= {"modal_full_rank", "superintegrable", "states",
                           "degenerate"}
    for entry in report["states"]:
        assert entry["classical_rank"] == 5
        assert len(entry["classical_singular_values"]) == 5


def test_rank_rejects_homogeneous_limit(tmp_path):
    rc = main(["rank", "--c", "0", "--out", str(tmp_path / "x.json")])
    assert rc == 2


def test_run_verify_records_negative_control():
    config = RunConfig(n_points=1, checks=("cky",))
    report = run_verify(config)
    rec = {r["check"]: r for r in report["checks"]}
    assert rec["cky_negative_control"]["pass"] is True
    assert rec["cky_negative_control"]["max_residual"] > 1e-3


def test_all_check_groups_covered():
    config = RunConfig(n_points=1)
    report = run_verify(config)
    assert report["skipped"] == []
    assert set(config.checks) == set(ALL_CHECK_GROUPS)
