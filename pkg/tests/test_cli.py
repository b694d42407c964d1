import csv

import pytest

from conftest import FIXTURES
from mmsc.cli import main, parse_instance, serialize_instance
from mmsc.model import Shape


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


# -- parser -----------------------------------------------------------------

def test_parse_round_trip():
    text = (FIXTURES / "fig3.mmsc").read_text()
    inst = parse_instance(text)
    assert inst.graph.shape is Shape.CYCLE and inst.m == 9 and inst.n == 3
    again = parse_instance(serialize_instance(inst))
    assert again == inst


def test_parse_general_graph_with_edges():
    inst = parse_instance((FIXTURES / "fig1.mmsc").read_text())
    assert inst.graph.shape is Shape.GENERAL
    assert len(inst.graph.edges) == 10
    assert parse_instance(serialize_instance(inst)) == inst


@pytest.mark.parametrize("bad,fragment", [
    ("mmsc 2\ngraph cycle 3\nagents 1\nu 1 1 1\n", "header"),
    ("mmsc 1\ngraph blob 3\nagents 1\nu 1 1 1\n", "shape"),
    ("mmsc 1\ngraph cycle 3\nagents 1\nu 1 1\n", "3 values"),
    ("mmsc 1\ngraph cycle 3\nagents 1\nu 1 1 x\n", "rational"),
    ("mmsc 1\ngraph cycle 3\nagents 2\nu 1 1 1\nu 2 2 2\ntypes 1 1\n",
     "identical"),
])
def test_parse_errors(bad, fragment):
    with pytest.raises(Exception) as exc:
        parse_instance(bad)
    assert "line" in str(exc.value)


# -- commands ---------------------------------------------------------------

def test_cmd_mms_fig3(capsys):
    code, out, _ = run(capsys, "mms", str(FIXTURES / "fig3.mmsc"),
                       "--agent", "1")
    assert code == 0
    assert out.splitlines()[0] == "5"
    assert out.splitlines()[1].startswith("split ")


def test_cmd_mms_oracle_on_general(capsys):
    code, out, _ = run(capsys, "mms", str(FIXTURES / "fig1.mmsc"),
                       "--agent", "1", "--oracle")
    assert code == 0 and out.strip() == "5"
    # without --oracle: usage error
    code, _, err = run(capsys, "mms", str(FIXTURES / "fig1.mmsc"))
    assert code == 2 and "oracle" in err


def test_cmd_allocate_five_sixths(capsys):
    code, out, _ = run(capsys, "allocate", str(FIXTURES / "fig3.mmsc"),
                       "--method", "five-sixths")
    assert code == 0
    assert out.strip().splitlines()[-1] == "certified_c 5/6"


def test_cmd_allocate_none(capsys):
    code, out, _ = run(capsys, "allocate", str(FIXTURES / "fig3.mmsc"),
                       "--method", "dp-types")
    assert code == 1 and out.strip() == "NONE"


def test_cmd_oracle_exists(capsys):
    code, out, _ = run(capsys, "oracle", str(FIXTURES / "fig4n4.mmsc"),
                       "--exists")
    assert code == 1 and out.strip() == "NO"
    code, out, _ = run(capsys, "oracle", str(FIXTURES / "fig1.mmsc"),
                       "--exists")
    assert code == 0 and out.splitlines()[0] == "YES"


def test_cmd_oracle_budget(capsys, monkeypatch):
    monkeypatch.setenv("MMSC_ORACLE_MAX_GOODS", "4")
    code, _, err = run(capsys, "oracle", str(FIXTURES / "fig3.mmsc"),
                       "--max-c")
    assert code == 3 and "budget" in err


def test_cmd_gen_deterministic(capsys):
    code, out1, _ = run(capsys, "gen", "--m", "9", "--n", "3", "--seed", "7")
    assert code == 0
    _, out2, _ = run(capsys, "gen", "--m", "9", "--n", "3", "--seed", "7")
    assert out1 == out2
    inst = parse_instance(out1)
    assert inst.m == 9 and inst.n == 3


def test_cmd_gen_types(capsys):
    _, out, _ = run(capsys, "gen", "--m", "8", "--n", "6", "--types", "3",
                    "--seed", "1")
    inst = parse_instance(out)
    assert len({u.values for u in inst.agents}) <= 3
    assert inst.type_ids is not None


def test_cmd_batch(tmp_path, capsys):
    # small fixture dir: one good file, one malformed
    good = tmp_path / "ok.mmsc"
    good.write_text((FIXTURES / "fig3.mmsc").read_text())
    (tmp_path / "broken.mmsc").write_text("not an instance\n")
    out_csv = tmp_path / "report.csv"
    code, _, _ = run(capsys, "batch", str(tmp_path), "--csv", str(out_csv),
                     "--no-oracle")
    assert code == 0
    rows = list(csv.DictReader(out_csv.read_text().splitlines()))
    by_name = {r["instance"]: r for r in rows}
    assert by_name["broken.mmsc"]["error"].startswith("parse")
    assert by_name["ok.mmsc"]["certified_c"] == "5/6"


def test_cmd_batch_empty_dir(tmp_path, capsys):
    code, out, _ = run(capsys, "batch", str(tmp_path))
    assert code == 0
    assert out.splitlines()[0].startswith("instance,")
    assert len(out.strip().splitlines()) == 1
