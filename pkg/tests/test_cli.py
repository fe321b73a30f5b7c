import argparse

import pytest

from conftest import ADD_FAULT, ADD_REPORT, calc_files, write_corpus
from report_fault_injector.cli import build_parser, main, positive_int, seed_value
from report_fault_injector.report import load_report


@pytest.fixture(autouse=True)
def isolated(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for key in ("FAULTINJ_SEED", "FAULTINJ_BUDGETS", "FAULTINJ_CORPUS_ROOT"):
        monkeypatch.delenv(key, raising=False)


def test_value_parsers():
    assert positive_int("3") == 3
    assert seed_value(str(2**64 - 1)) == 2**64 - 1
    for bad in ("0", "x"):
        with pytest.raises(argparse.ArgumentTypeError):
            positive_int(bad)
    for bad in ("-1", str(2**64)):
        with pytest.raises(argparse.ArgumentTypeError):
            seed_value(bad)


def test_global_options_after_command(calc_dir):
    args = build_parser().parse_args(["localize", "--corpus", str(calc_dir), "--report", "R1"])
    assert args.corpus == calc_dir
    args = build_parser().parse_args(["--seed", "4", "localize", "--report", "R1"])
    assert args.seed == 4


def test_localize(calc_dir, capsys):
    assert main(["--corpus", str(calc_dir), "localize", "--report", "R1", "--top", "3"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "rank,path,statement_index,score,file_score"
    assert len(lines) == 4
    assert [line.split(",")[0] for line in lines[1:]] == ["1", "2", "3"]


def test_pipeline(calc_dir, tmp_path, capsys):
    out = tmp_path / "mutants"
    assert main(["--corpus", str(calc_dir), "inject", "--report", "R1", "--n", "5", "--both", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "emitted=5 requested=5 source=ibir group=R1"
    assert lines[1].startswith("emitted=") and lines[1].endswith("source=baseline group=R1")
    assert (out / "R1" / "ibir-0-1" / "meta.json").is_file()

    cfg = tmp_path / "experiment.cfg"
    cfg.write_text("BUDGETS=1,2\nN_SUITE_SAMPLES=10\nSAMPLE_BAND=0.2,0.5\nSTEP_BUDGET=20000\n", encoding="utf-8")
    report_path = tmp_path / "report.json"
    matrices = tmp_path / "matrices"
    argv = ["--corpus", str(calc_dir), "--config", str(cfg), "evaluate", "--mutants", str(out)]
    assert main([*argv, "--out", str(report_path), "--emit-matrix", str(matrices)]) == 0
    assert capsys.readouterr().out == f"faults=1 out={report_path}\n"
    report = load_report(report_path)
    assert report.budgets == [1, 2]
    assert report.faults["F1"]["ibir"]["1"].best_similarity == 1.0
    header = (matrices / "F1.csv").read_text(encoding="utf-8").splitlines()[0].split(",")
    assert header[0] == "test" and header[-1] == "F1"
    assert "ibir-0-1" in header and "baseline-0-1" in header

    figures = tmp_path / "figures"
    assert main(["report", "--input", str(report_path), "--out", str(figures)]) == 0
    printed = capsys.readouterr().out.splitlines()
    assert len(printed) == 6
    assert (figures / "summary.md").read_text(encoding="utf-8").startswith("# Fault injection evaluation")


def test_report_less_baseline(calc_dir, tmp_path, capsys):
    out = tmp_path / "mutants"
    assert main(["--corpus", str(calc_dir), "inject", "--baseline", "--n", "3", "--out", str(out)]) == 0
    assert capsys.readouterr().out.endswith("source=baseline group=calc\n")
    assert any((out / "calc").iterdir())


def test_report_less_baseline_per_project(tmp_path, capsys):
    collection = tmp_path / "projects"
    write_corpus(collection / "alpha", calc_files(), [ADD_REPORT], [ADD_FAULT])
    write_corpus(collection / "beta", calc_files(), [{**ADD_REPORT, "id": "R2", "linked_fault_id": None}])
    out = tmp_path / "mutants"
    assert main(["--corpus", str(collection), "inject", "--baseline", "--n", "2", "--out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == [
        "emitted=2 requested=2 source=baseline group=alpha",
        "emitted=2 requested=2 source=baseline group=beta",
    ]
    assert sorted(p.name for p in (out / "alpha").iterdir()) == ["baseline-0-1", "baseline-0-2"]
    assert sorted(p.name for p in (out / "beta").iterdir()) == ["baseline-0-1", "baseline-0-2"]


def test_usage_errors(calc_dir, capsys):
    assert main(["--corpus", str(calc_dir), "inject"]) == 2
    assert "--report or --all-reports" in capsys.readouterr().err
    assert main(["--corpus", str(calc_dir), "inject", "--baseline", "--both"]) == 2
    assert "--both needs --report or --all-reports" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exit_info:
        main(["--seed", "-1", "localize", "--report", "R1"])
    assert exit_info.value.code == 2


def test_invalid_configuration(tmp_path, capsys):
    assert main(["--config", str(tmp_path / "absent.cfg"), "report"]) == 2
    assert "invalid configuration" in capsys.readouterr().err


def test_runtime_errors(calc_dir, tmp_path, capsys):
    assert main(["--corpus", str(calc_dir), "localize", "--report", "R9"]) == 1
    assert "unknown bug report 'R9'" in capsys.readouterr().err
    assert main(["report", "--input", str(tmp_path / "missing.json")]) == 1
    assert main(["--corpus", str(calc_dir), "evaluate", "--mutants", str(tmp_path / "none")]) == 1
