from __future__ import annotations

import csv
import json

import pytest

from armad import load_context
from armad.cli import main
from helpers import TABLE1_ROWS

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


@pytest.fixture()
def data(tmp_path):
    ctx = tmp_path / "ctx.csv"
    with open(ctx, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tid", "item"])
        for tid, items in TABLE1_ROWS:
            for item in items:
                writer.writerow([tid, item])
    labels = tmp_path / "labels.txt"
    labels.write_text("o1\no3\no5\n")
    return tmp_path, str(ctx), str(labels)


def run_vr(ctx, labels, *extra):
    return [
        "run",
        "--context",
        f"d={ctx}",
        "--detector",
        "vr-arm",
        "--max-supp",
        "50",
        "--min-conf",
        "100",
        "--labels",
        labels,
        *extra,
    ]


def test_run_happy_path(data, capsys):
    tmp, ctx, labels = data
    ranking = tmp / "ranking.csv"
    rules = tmp / "rules.csv"
    report = tmp / "report.json"
    band = tmp / "band.svg"
    manifest_path = tmp / "manifest.json"
    code = main(
        run_vr(
            ctx,
            labels,
            "--ranking", str(ranking),
            "--rules", str(rules),
            "--report", str(report),
            "--band", str(band),
            "--manifest", str(manifest_path),
        )
    )
    assert code == 0

    manifest = json.loads(capsys.readouterr().out)
    assert manifest["command"] == "run"
    assert manifest["config"]["detector"] == "vr-arm"
    assert manifest["context"] == {"m": 6, "n": 5}
    assert manifest["n_rules"] == 14
    assert manifest["metrics"]["ndcg"] == pytest.approx(1.0, abs=1e-12)
    assert manifest["metrics"]["auc"] == pytest.approx(1.0, abs=1e-12)
    assert set(manifest["outputs"]) == {
        str(ranking), str(rules), str(report), str(band), str(manifest_path)
    }

    lines = ranking.read_text().splitlines()
    assert lines[0] == "rank,tid,score,n_matched_rules,detector"
    assert len(lines) == 7
    assert lines[1].split(",")[1] == "o3"

    with open(rules, newline="") as fh:
        recs = list(csv.reader(fh))
    assert len(recs) == 15

    assert json.loads(report.read_text())["attack_positions"] == [1, 2, 3]
    assert band.read_text().startswith("<svg ")
    on_disk = json.loads(manifest_path.read_text())
    assert on_disk["n_rules"] == 14
    assert str(manifest_path) not in on_disk["outputs"]


def test_run_explain_top(data, capsys):
    _, ctx, labels = data
    assert main(run_vr(ctx, labels, "--explain-top", "2")) == 0
    out = capsys.readouterr().out
    assert "o3  score 10.9925  (9 matched rules)" in out
    assert "o5  score 10.9925  (9 matched rules)" in out
    assert "  b;a -> c;d  " in out


def test_run_baseline_detectors(data, capsys):
    tmp, ctx, _ = data
    ranking = tmp / "avf.csv"
    code = main(
        ["run", "--context", f"d={ctx}", "--detector", "avf",
         "--ranking", str(ranking)]
    )
    assert code == 0
    lines = ranking.read_text().splitlines()
    assert len(lines) == 7
    assert lines[1].split(",")[1] == "o1"
    assert lines[1].endswith(",avf")
    capsys.readouterr()

    code = main(
        ["run", "--context", f"d={ctx}", "--detector", "od",
         "--min-supp-abs", "3", "--min-conf", "60"]
    )
    assert code == 0
    manifest = json.loads(capsys.readouterr().out)
    assert manifest["n_rules"] is None


def test_run_join(data, capsys):
    tmp, ctx, labels = data
    rules = tmp / "joined-rules.csv"
    ranking = tmp / "joined-ranking.csv"
    code = main(
        [
            "run",
            "--context", f"A={ctx}",
            "--context", f"B={ctx}",
            "--join",
            "--detector", "vr-arm",
            "--max-supp", "50",
            "--min-conf", "100",
            "--rules", str(rules),
            "--ranking", str(ranking),
        ]
    )
    assert code == 0
    manifest = json.loads(capsys.readouterr().out)
    assert manifest["context"] == {"m": 6, "n": 10}
    text = rules.read_text()
    assert "A:b;A:a" in text and "B:e" in text
    assert len(ranking.read_text().splitlines()) == 7


def test_run_band_png(data):
    tmp, ctx, labels = data
    png = tmp / "band.png"
    code = main(run_vr(ctx, labels, "--band-png", str(png)))
    assert code == 0
    assert png.read_bytes().startswith(PNG_MAGIC)


def test_run_validation_errors(data, capsys):
    tmp, ctx, labels = data
    cases = [
        ["run", "--detector", "avf"],
        ["run", "--context", f"A={ctx}", "--context", f"B={ctx}",
         "--detector", "avf"],
        ["run", "--context", f"d={ctx}", "--detector", "avf",
         "--report", str(tmp / "r.json")],
        ["run", "--context", f"d={ctx}", "--detector", "vr-arm",
         "--min-conf", "100"],
        ["run", "--context", f"d={ctx}", "--detector", "vr-arm",
         "--max-supp", "50"],
        ["run", "--context", f"d={ctx}", "--detector", "avf",
         "--rules", str(tmp / "r.csv")],
        ["run", "--context", f"bad-spec-without-equals",
         "--detector", "avf"],
        ["run", "--context", f"d={ctx}", "--detector", "od",
         "--min-conf", "60"],
    ]
    for argv in cases:
        assert main(argv) == 2, argv
        assert "error:" in capsys.readouterr().err


def test_run_missing_input(data, capsys):
    tmp, _, _ = data
    code = main(
        ["run", "--context", f"d={tmp / 'nope.csv'}", "--detector", "avf"]
    )
    assert code == 3
    assert "error:" in capsys.readouterr().err


def test_run_rolls_back_outputs(data, capsys):
    tmp, ctx, labels = data
    ranking = tmp / "ranking.csv"
    rules = tmp / "missing-dir" / "rules.csv"
    code = main(run_vr(ctx, labels, "--ranking", str(ranking),
                       "--rules", str(rules)))
    assert code == 3
    # the ranking was written first and must be rolled back
    assert not ranking.exists()
    assert not list(tmp.glob("*.tmp*"))
    capsys.readouterr()


def test_run_undefined_exits_4(data, capsys):
    tmp, ctx, labels = data
    code = main(
        ["run", "--context", f"d={ctx}", "--detector", "vr-arm",
         "--max-supp", "50", "--min-conf", "100",
         "--interest-mode", "literal"]
    )
    assert code == 4
    assert "error:" in capsys.readouterr().err

    empty = tmp / "empty-labels.txt"
    empty.write_text("\n")
    code = main(run_vr(ctx, str(empty)))
    assert code == 4
    capsys.readouterr()


def test_run_config_file(data, capsys):
    tmp, ctx, labels = data
    cfg = tmp / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "contexts": [f"d={ctx}"],
                "detector": "vr-arm",
                "max_supp": 50,
                "min_conf": 100,
                "max_len": 2,
            }
        )
    )
    assert main(["run", "--config", str(cfg)]) == 0
    manifest = json.loads(capsys.readouterr().out)
    assert manifest["n_rules"] == 2

    # an explicit flag beats the config value
    assert main(["run", "--config", str(cfg), "--max-len", "4"]) == 0
    manifest = json.loads(capsys.readouterr().out)
    assert manifest["n_rules"] == 14


def test_run_config_rejects_unknown_keys(data, capsys):
    tmp, ctx, _ = data
    cfg = tmp / "cfg.json"
    cfg.write_text(json.dumps({"contexts": [f"d={ctx}"], "supp": 50}))
    assert main(["run", "--config", str(cfg), "--detector", "avf"]) == 2
    err = capsys.readouterr().err
    assert "unknown config keys" in err

    cfg.write_text("not json")
    assert main(["run", "--config", str(cfg), "--detector", "avf"]) == 2
    capsys.readouterr()


def test_run_deterministic_outputs(data, capsys):
    tmp, ctx, labels = data
    first = tmp / "a.csv"
    second = tmp / "b.csv"
    band1 = tmp / "a.svg"
    band2 = tmp / "b.svg"
    assert main(run_vr(ctx, labels, "--ranking", str(first),
                       "--band", str(band1))) == 0
    assert main(run_vr(ctx, labels, "--ranking", str(second),
                       "--band", str(band2))) == 0
    capsys.readouterr()
    assert first.read_bytes() == second.read_bytes()
    assert band1.read_bytes() == band2.read_bytes()


def test_sweep(data, tmp_path, capsys):
    tmp, ctx, labels = data
    out_dir = tmp_path / "cells"
    summary_path = tmp_path / "summary.json"
    code = main(
        [
            "sweep",
            "--context", f"d={ctx}",
            "--detector", "vr-arm",
            "--grid", "50x100", "50x60", "25x100",
            "--labels", labels,
            "--out-dir", str(out_dir),
            "--summary", str(summary_path),
        ]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["command"] == "sweep"
    assert [c["supp"] for c in summary["cells"]] == [50.0, 50.0, 25.0]
    # two cells tie at nDCG 1; the lower confidence wins the tie
    assert summary["best"] == {
        "supp": 50.0, "conf": 60.0, "ndcg": 1.0, "auc": 1.0
    }
    for name in ("report_50x100.json", "report_50x60.json", "report_25x100.json"):
        assert (out_dir / name).exists()
    assert json.loads(summary_path.read_text())["best"] == summary["best"]
    cell = json.loads((out_dir / "report_25x100.json").read_text())
    assert cell["ndcg"] == pytest.approx(0.88546, abs=1e-5)


def test_sweep_figure(data, tmp_path):
    _, ctx, labels = data
    fig = tmp_path / "sweep.png"
    code = main(
        [
            "sweep",
            "--context", f"d={ctx}",
            "--grid", "50x100", "25x100",
            "--labels", labels,
            "--out-dir", str(tmp_path / "cells"),
            "--figure", str(fig),
        ]
    )
    assert code == 0
    assert fig.read_bytes().startswith(PNG_MAGIC)


def test_sweep_validation(data, capsys):
    tmp, ctx, labels = data
    cases = [
        ["sweep", "--context", f"d={ctx}", "--grid", "50x100"],
        ["sweep", "--context", f"d={ctx}", "--labels", labels],
        ["sweep", "--context", f"d={ctx}", "--grid", "5by100",
         "--labels", labels],
        ["sweep", "--context", f"d={ctx}", "--detector", "avf",
         "--grid", "50x100", "--labels", labels],
    ]
    for argv in cases:
        assert main(argv) == 2, argv
        assert "error:" in capsys.readouterr().err


def test_convert_matrix(tmp_path, capsys):
    src = tmp_path / "matrix.csv"
    with open(src, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tid", "a", "b", "c"])
        writer.writerow(["t1", "1", "0", "1"])
        writer.writerow(["t2", "0", "1", "0"])
    out = tmp_path / "pairs.csv"
    assert main(["convert", "matrix", str(src), str(out)]) == 0
    assert capsys.readouterr().out == f"wrote {out}\n"
    c = load_context(str(out))
    assert c.tid_names == ("t1", "t2")
    assert c.item_names == ("a", "c", "b")

    bad = tmp_path / "bad.csv"
    with open(bad, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["tid", "a"])
        writer.writerow(["t1", "2"])
    out2 = tmp_path / "pairs2.csv"
    assert main(["convert", "matrix", str(bad), str(out2)]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err
    assert not out2.exists()
    assert not list(tmp_path.glob("*.tmp*"))


def test_convert_basket(tmp_path, capsys):
    src = tmp_path / "baskets.txt"
    src.write_text("t1 a b\nt2 b\n\nt3 c a\n")
    out = tmp_path / "pairs.csv"
    assert main(["convert", "basket", str(src), str(out)]) == 0
    capsys.readouterr()
    c = load_context(str(out))
    assert c.tid_names == ("t1", "t2", "t3")
    assert sorted(c.item_names) == ["a", "b", "c"]
