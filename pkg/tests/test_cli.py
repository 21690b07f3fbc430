import json

import numpy as np
import pytest

from dhl import cli
from dhl.config import load, parse_text
from dhl.errors import ConfigError, InconclusiveRankError
from dhl.report import Record, Report


def test_config_defaults_and_overrides(tmp_path):
    vals = parse_text("")
    assert vals["resolution"] == 32 and vals["seed"] == 0
    p = tmp_path / "run.cfg"
    p.write_text("# comment\nmap.degree = 3\nflow.eps = 0.05, 0.2\nselectors = prime+dprime\n")
    cfg = load("verify", str(p), seed=7, resolution=24, out="x")
    assert cfg["map.degree"] == 3 and cfg["flow.eps"] == (0.05, 0.2)
    assert cfg.seed == 7 and cfg.N == 24 and cfg.out == "x"


@pytest.mark.parametrize("text,fragment", [
    ("map.degre = 2", ":1: unknown key 'map.degre'"),
    ("seed = 1\nseed = 2", ":2: duplicate key"),
    ("resolution = abc", "resolution"),
    ("surface.kind = klein", "surface.kind"),
    ("selectors = prime+prime*", "selectors"),
    ("resolution = 4", "resolution"),
    ("just words", "expected key = value"),
])
def test_config_errors_name_the_field(text, fragment):
    with pytest.raises(ConfigError) as info:
        parse_text(text, "c.cfg")
    assert fragment in str(info.value)


def test_report_ordering_and_json(tmp_path):
    rep = Report("verify", {"seed": 0, "x": np.float64(1.5)})
    rep.add(Record("b", "plumbing", 1, 1, "exact", True))
    rep.add(Record("a", "plumbing", 1.0, complex(1, 2), 1e-9, True))
    rep.add(Record("z", "plumbing", 0, 1, "exact", False))
    doc = json.loads(rep.to_json())
    assert [r["name"] for r in doc["records"]] == ["z", "a", "b"]
    assert doc["records"][1]["computed"] == [1.0, 2.0]
    assert doc["summary"] == {"records": 3, "failed": 1}
    rep.emit(str(tmp_path))
    assert (tmp_path / "report.json").read_text() == rep.to_json()
    assert (tmp_path / "tables" / "records.csv").read_text().splitlines()[1].startswith("z,")


def test_empty_report(tmp_path):
    rep = Report("corpus", {})
    rep.emit(str(tmp_path))
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["records"] == [] and rep.all_pass


def test_index_command(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("map.family = power\nmap.degree = 2\ntwist.kind = trivial\n")
    assert cli.main(["index", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    doc = json.loads((tmp_path / "o" / "report.json").read_text())
    rec = next(r for r in doc["records"] if r["name"].startswith("index/"))
    assert rec["predicted"] == [5, -3]
    c = rec["computed"]
    assert (c["ker1"], c["coker1"], c["ker2"], c["coker2"]) == (5, 0, 0, 3)
    assert (tmp_path / "o" / "plots" / "spectra.svg").exists()
    assert (tmp_path / "o" / "tables" / "spectra.csv").exists()


def test_amodel_command(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("amodel.n = 3\namodel.g = 0\namodel.c1A = 0\n")
    assert cli.main(["amodel", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    assert "w=6" in capsys.readouterr().out


def test_flow_command(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("flow.eps = 0.1\n")
    assert cli.main(["flow", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    doc = json.loads((tmp_path / "o" / "report.json").read_text())
    rec = next(r for r in doc["records"] if r["name"] == "flow/eps=0.1/energy")
    assert abs(rec["computed"] - 1.0) <= 1e-4
    assert (tmp_path / "o" / "plots" / "flow_energy.svg").exists()


def test_verify_command_on_torus(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("surface.kind = torus\nmap.family = torus_constant\nresolution = 8\npoints = 20\n")
    assert cli.main(["verify", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0


def test_exit_codes(tmp_path, monkeypatch):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense = 1\n")
    assert cli.main(["verify", "--config", str(bad)]) == 3
    mism = tmp_path / "m.cfg"
    mism.write_text("map.family = line\nsurface.kind = torus\n")
    assert cli.main(["verify", "--config", str(mism)]) == 3

    def inconclusive(cfg):
        raise InconclusiveRankError("gap too small", 10.0)

    monkeypatch.setattr(cli, "run", inconclusive)
    assert cli.main(["index", "--out", str(tmp_path / "o")]) == 2

    def failing(cfg):
        rep = Report(cfg.command, {})
        rep.add(Record("ok", "plumbing", 1, 1, "exact", True))
        rep.add(Record("bad", "plumbing", 1, 2, "exact", False))
        return rep

    monkeypatch.setattr(cli, "run", failing)
    assert cli.main(["verify", "--out", str(tmp_path / "f")]) == 1
    doc = json.loads((tmp_path / "f" / "report.json").read_text())
    assert doc["records"][0]["name"] == "bad"
