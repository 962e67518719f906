import csv
import io
import json

import pytest

from heckeverify import harness
from heckeverify.harness import ConfigError, RunConfig, load_config, main, run


def small_config(**kw):
    base = dict(systems=["zeta", "rk:2"], identities=["THM3"],
                grids={"s": [1.0, 2.0], "nu": [0.5]}, threads=1)
    base.update(kw)
    cfg = RunConfig(**{k: v for k, v in base.items() if k != "grids"})
    cfg.grids.update(base["grids"])
    return cfg.validate()


def write(tmp_path, obj, name="cfg.json"):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj), encoding="utf-8")
    return str(p)


def strip_timing(text):
    doc = json.loads(text)
    doc.pop("timing")
    return json.dumps(doc, sort_keys=True)


# ----------------------------------------------------------- config

def test_default_config_is_valid():
    cfg = load_config()
    assert cfg.systems == list(harness.REGISTRY_EXAMPLES)
    assert cfg.identities == ["THM3"]
    assert cfg.grids["s"] == [0.5, 1.0, 2.0, 4.0, 8.0]


def test_config_file_and_overrides(tmp_path):
    path = write(tmp_path, {"systems": ["zeta"], "identities": ["MODULAR"],
                            "grids": {"x": [1.0, 2.0]}, "tolerances": {"MODULAR": 1e-9}})
    cfg = load_config(path, {"grids": {"x": "3, 4"}, "threads": 2})
    assert cfg.systems == ["zeta"]
    assert cfg.grids["x"] == [3.0, 4.0]
    assert cfg.tolerances == {"MODULAR": 1e-9}
    assert cfg.threads == 2


def test_random_grid_is_seeded(tmp_path):
    path = write(tmp_path, {"grids": {"s": {"random": 4, "low": 1, "high": 3}}, "seed": 7})
    a, b = load_config(path), load_config(path)
    assert a.grids["s"] == b.grids["s"] and len(a.grids["s"]) == 4
    assert all(1 <= v <= 3 for v in a.grids["s"])
    c = load_config(path, {"seed": 8})
    assert c.grids["s"] != a.grids["s"]
    d = load_config(None, {"grids": {"nu": "random(3,0,1)"}})
    assert len(d.grids["nu"]) == 3


def test_syntax_error_reports_line_and_column(tmp_path):
    path = write(tmp_path, '{\n  "systems": ["zeta"],\n  "identities": [THM3]\n}')
    with pytest.raises(ConfigError, match=r"line 3, column \d+"):
        load_config(path)


@pytest.mark.parametrize("doc,needle", [
    ({"systems": []}, "systems"),
    ({"systems": ["nope"]}, r"systems\[0\]"),
    ({"identities": ["THM9"]}, r"identities\[0\]"),
    ({"grids": {"q": [1]}}, "grids.q"),
    ({"grids": {"s": [1, "a"]}}, r"grids.s\[1\]"),
    ({"grids": {"s": {"random": 0, "low": 1, "high": 2}}}, "grids.s"),
    ({"tolerances": {"THM3": -1}}, "tolerances.THM3"),
    ({"tolerances": {"XYZ": 1}}, "tolerances.XYZ"),
    ({"table_size": 5}, "table_size"),
    ({"threads": -1}, "threads"),
    ({"format": "xml"}, "format"),
    ({"colour": 1}, "colour"),
    ([1, 2], "top level"),
])
def test_config_errors_name_the_field(tmp_path, doc, needle):
    with pytest.raises(ConfigError, match=needle):
        load_config(write(tmp_path, doc))


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "absent.json"))


def test_thread_count_sources(monkeypatch):
    cfg = small_config(threads=0)
    monkeypatch.setenv("VERIFY_THREADS", "3")
    assert harness._threads(cfg) == 3
    monkeypatch.setenv("VERIFY_THREADS", "x")
    with pytest.raises(ConfigError):
        harness._threads(cfg)
    monkeypatch.delenv("VERIFY_THREADS")
    assert 1 <= harness._threads(cfg) <= 8
    assert harness._threads(small_config(threads=5)) == 5


# ----------------------------------------------------------- running

def test_small_run_passes():
    report = run(small_config())
    assert report.summary["total"] == 4
    assert report.summary["pass"] == 4 and report.exit_code == 0
    assert [r.system for r in report.records] == ["rk:2", "rk:2", "zeta", "zeta"]


def test_invalid_order_is_skipped_with_reason():
    report = run(small_config(grids={"s": [1.0], "nu": [-2.0, 0.5]}))
    skipped = [r for r in report.records if r.status == "skipped"]
    assert len(skipped) == 2
    assert all("ν ≤ −1" in r.reason for r in skipped)
    assert report.summary["skipped"] == 2 and report.exit_code == 0


def test_single_record_report():
    cfg = small_config(systems=["tau"], identities=["TAU_EXP"], grids={"s": [1.0]})
    report = run(cfg)
    assert len(report.records) == 1
    rec = report.records[0]
    assert rec.identity == "TAU_EXP" and rec.status == "pass"


def test_example_identities_only_run_on_their_systems():
    cfg = small_config(systems=["zeta", "char:4:1", "char:5:2"],
                       identities=["WATSON", "CHAR_ODD", "CHAR_EVEN"],
                       grids={"s": [1.0], "nu": [0.5], "r": [1.0]})
    pairs = {(r.system, r.identity) for r in run(cfg).records}
    assert pairs == {("zeta", "WATSON"), ("char:4:1", "CHAR_ODD"), ("char:5:2", "CHAR_EVEN")}


def test_failures_are_recorded_not_raised():
    cfg = small_config(systems=["rk:2"], identities=["MODULAR"], grids={"x": [50.0]})
    report = run(cfg)
    assert report.summary["fail"] == 1 and report.exit_code == 1


def test_fractional_rho_for_integer_identities_is_skipped():
    cfg = small_config(systems=["rk:2"], identities=["CN_EXP"], grids={"s": [2.0], "rho": [0.5]})
    (rec,) = run(cfg).records
    assert rec.status == "skipped" and "ρ" in rec.reason


def test_records_sorted_and_summary_consistent():
    cfg = small_config(systems=["zeta", "rk:2"], identities=["THM3", "MODULAR"],
                       grids={"s": [2.0, 1.0], "nu": [0.5], "x": [2.0, 0.5]})
    report = run(cfg)
    keys = [r.sort_key() for r in report.records]
    assert keys == sorted(keys)
    s = report.summary
    assert s["total"] == len(report.records) == s["pass"] + s["fail"] + s["skipped"]
    assert set(s["max_rel_residual"]) == {"THM3", "MODULAR"}


def test_json_report_is_deterministic_across_thread_counts():
    cfg1 = small_config(threads=1, identities=["THM3", "MODULAR"], grids={"x": [1.0, 2.0]})
    cfg8 = small_config(threads=8, identities=["THM3", "MODULAR"], grids={"x": [1.0, 2.0]})
    a, b = run(cfg1).to_json(), run(cfg8).to_json()
    assert strip_timing(a) == strip_timing(b)
    doc = json.loads(a)
    assert doc["schema"] == 1 and "version" in doc["build"]
    assert all("wall_time" not in r for r in doc["records"])
    assert len(doc["timing"]["record_wall_time"]) == len(doc["records"])


def test_csv_report_columns():
    report = run(small_config(grids={"s": [1.0], "nu": [0.5, -2.0]}))
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert tuple(rows[0]) == harness.CSV_COLUMNS
    assert len(rows) == 1 + len(report.records)
    statuses = {r[-1] for r in rows[1:]}
    assert statuses == {"pass", "skipped"}
    skipped = [r for r in rows[1:] if r[-1] == "skipped"][0]
    assert skipped[9] == ""


# ----------------------------------------------------------- explain and CLI

@pytest.mark.parametrize("ident", list(harness.IDENTITY_AXES))
def test_explain_every_identity(ident):
    text = harness.explain(ident)
    assert text.startswith(ident)
    assert "Domain:" in text and "Default tolerance" in text


def test_explain_content():
    assert "Watson" in harness.explain("WATSON")
    assert "Popov" in harness.explain("popov")
    with pytest.raises(KeyError):
        harness.explain("NOPE")


def test_cli_exit_codes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["run", "--systems", "zeta", "--grid.s", "1,2", "--grid.nu", "0.5",
                 "--threads", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["summary"]["pass"] == 2
    assert main(["run", "--systems", "rk:2", "--identities", "modular",
                 "--grid.x", "50", "--threads", "1"]) == 1
    assert main(["run", "--systems", "bogus"]) == 2
    bad = write(tmp_path, "{oops")
    assert main(["run", bad]) == 2
    assert main(["run", "--tol", "THM3"]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_csv_output(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["run", "--systems", "tau", "--identities", "TAU_EXP", "--grid.s", "1",
                 "--threads", "1", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert len(rows) == 2 and rows[1][-1] == "pass"


def test_cli_explain_and_list(capsys):
    assert main(["explain", "THM3"]) == 0
    assert "THM3" in capsys.readouterr().out
    assert main(["explain", "XYZ"]) == 2
    assert main(["list"]) == 0
    assert "dedekind:D" in capsys.readouterr().out
