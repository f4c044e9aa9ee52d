"""
命令行测试：退出码、文本与 JSON 报告
"""
import json

import pytest

from flowcalc.cli import EXIT_BAD_INPUT, EXIT_OK, EXIT_REFUSED, run
from flowcalc.core.demos import same_labelled_graph
from flowcalc.core.fixtures import golden_mean
from flowcalc.core.formats import load_shift
from flowcalc.core.reports import ReturnsReport


def _json(capsys, argv):
    code = run(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


def test_invariants_text_report(capsys, data_dir):
    assert run(["invariants", str(data_dir / "full2_matrix.txt")]) == EXIT_OK
    out = capsys.readouterr().out
    assert "ps: -1" in out.splitlines()
    assert "bf_factors: []" in out.splitlines()


def test_invariants_json_report(capsys, data_dir):
    code, report = _json(capsys, ["invariants", str(data_dir / "golden_matrix.txt")])
    assert code == EXIT_OK
    assert report == {"ps": -1, "bf_factors": [], "free_rank": 0, "group": "0"}


def test_global_flag_before_subcommand(capsys, data_dir):
    assert run(["--json", "invariants", str(data_dir / "full2_matrix.txt")]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["ps"] == -1


def test_decide_fe(capsys, data_dir):
    code, report = _json(capsys, ["decide-fe", str(data_dir / "full2_matrix.txt"),
                                  str(data_dir / "golden_matrix.txt")])
    assert code == EXIT_OK
    assert report["verdict"] == "equivalent"


def test_decide_fe_refuses_reducible(capsys, data_dir):
    code, report = _json(capsys, ["decide-fe", str(data_dir / "reducible_matrix.txt"),
                                  str(data_dir / "full2_matrix.txt")])
    assert code == EXIT_REFUSED
    assert report["refused"] == "NotIrreducible"


def test_parse_error_reports_line_and_token(capsys, tmp_path):
    bad = tmp_path / "bad.txt"
    bad.write_text("# matrix\n1 x\n1 1\n", encoding="utf-8")
    assert run(["invariants", str(bad)]) == EXIT_BAD_INPUT
    err = capsys.readouterr().err
    assert f"{bad}:2" in err
    assert "'x'" in err


def test_missing_file(capsys, tmp_path):
    assert run(["invariants", str(tmp_path / "nope.txt")]) == EXIT_BAD_INPUT


def test_unknown_subcommand():
    with pytest.raises(SystemExit) as err:
        run(["frobnicate"])
    assert err.value.code == 2


def test_expand_writes_graph(capsys, data_dir, tmp_path):
    out = tmp_path / "golden.txt"
    code, report = _json(capsys, ["expand", str(data_dir / "full2.txt"), "a", "-o", str(out)])
    assert code == EXIT_OK
    assert report["kind"] == "symbol-expansion"
    assert report["fresh_symbol"] == "a'"
    assert report["vertex"] == "v0.a"
    assert report["matrix"] == [[1, 1], [1, 0]]
    assert same_labelled_graph(load_shift(out), golden_mean())


def test_split(capsys, data_dir):
    code, report = _json(capsys, ["split", str(data_dir / "full2.txt"), "v0", "a", "b"])
    assert code == EXIT_OK
    assert report["classes"] == [["a"], ["b"]]
    assert report["matrix"] == [[1, 1], [1, 1]]


def test_split_bad_partition(capsys, data_dir):
    assert run(["split", str(data_dir / "full2.txt"), "v0", "a"]) == EXIT_BAD_INPUT


def test_split_unknown_vertex(capsys, data_dir):
    assert run(["split", str(data_dir / "full2.txt"), "nowhere", "a", "b"]) == EXIT_BAD_INPUT
    assert run(["split", str(data_dir / "golden.txt"), "nowhere", "a'", "b", "--in"]) == EXIT_BAD_INPUT
    assert "unknown vertex" in capsys.readouterr().err


def test_in_split(capsys, data_dir):
    code, report = _json(capsys, ["split", str(data_dir / "golden.txt"), "u", "a'", "b", "--in"])
    assert code == EXIT_OK
    assert report["kind"] == "in-split"


def test_section_validate_and_returns(capsys, data_dir):
    graph, section = str(data_dir / "paired.txt"), str(data_dir / "paired_section.txt")
    code, report = _json(capsys, ["section", "validate", graph, section])
    assert code == EXIT_OK
    assert report == {"valid": True, "max_return": 2, "witness": None}
    code, report = _json(capsys, ["section", "returns", graph, section])
    assert report["return_words"] == ["a1 a2", "b"]
    assert report["symbols"] == {"[a1a2]": "a1 a2", "[b]": "b"}


def test_section_validate_reports_witness(capsys, data_dir, tmp_path):
    section = tmp_path / "a_only.txt"
    section.write_text("radius 0\na\n", encoding="utf-8")
    code, report = _json(capsys, ["section", "validate", str(data_dir / "golden.txt"), str(section)])
    assert code == EXIT_OK
    assert report["valid"] is False
    assert report["witness"] == "(b)"


def test_section_pullback(capsys, data_dir, tmp_path):
    section = tmp_path / "a.txt"
    section.write_text("radius 0\nheight 1/4\na\n", encoding="utf-8")
    code, report = _json(capsys, ["section", "pullback", str(data_dir / "paired.txt"), str(data_dir / "full2.txt"),
                                  str(section), "--map", "a1=a", "a2=a", "b=b"])
    assert code == EXIT_OK
    assert report == {"radius": 0, "height": "1/4", "centers": ["a1", "a2"]}


def test_section_ps_case1(capsys, data_dir):
    code, report = _json(capsys, ["section", "ps-case1", str(data_dir / "golden.txt"),
                                  str(data_dir / "golden_c1.txt"), str(data_dir / "golden_c2.txt"),
                                  "--period", "5"])
    assert code == EXIT_OK
    assert report["delta"] == "1/2"
    assert report["d"]["radius"] == 1
    assert report["intertwining_checked"] > 0


def _code_args(data_dir, graph, target, code):
    return [str(data_dir / graph), str(data_dir / target), str(data_dir / code)]


def test_code_build_and_apply(capsys, data_dir):
    args = _code_args(data_dir, "paired.txt", "full2.txt", "collapse_code.txt")
    code, report = _json(capsys, ["code", "build"] + args)
    assert code == EXIT_OK
    assert report["M"] == 0 and report["windows"] == 2
    code, report = _json(capsys, ["code", "apply"] + args + ["a1", "a2", "b"])
    assert report["image"] == "(a a b)"
    assert (report["domain_length"], report["image_length"], report["hits"]) == (3, 3, 2)


def test_code_verify_and_certificate(capsys, data_dir):
    args = _code_args(data_dir, "full2.txt", "golden.txt", "expansion_code.txt")
    code, report = _json(capsys, ["code", "verify"] + args + [str(data_dir / "golden_section.txt"), "--period", "6"])
    assert code == EXIT_OK
    assert report["holds"] is True
    code, report = _json(capsys, ["code", "certificate"] + args)
    assert code == EXIT_OK
    assert report["certified"] is False
    assert report["witness"] == "(a)"
    assert report["total"] == "1"


def test_code_openness(capsys, data_dir):
    args = _code_args(data_dir, "paired.txt", "full2.txt", "collapse_code.txt")
    code, report = _json(capsys, ["code", "openness"] + args + ["--kmax", "2", "--period", "10"])
    assert code == EXIT_OK
    assert report["open"] is False
    assert [w["window"] for w in report["witnesses"]] == ["a", "a a a", "a a a a a"]


def test_code_file_with_missing_block(capsys, data_dir, tmp_path):
    broken = tmp_path / "broken.txt"
    broken.write_text(f"section {data_dir / 'paired_section.txt'} M 0\n[b] -> b\n", encoding="utf-8")
    argv = ["code", "build", str(data_dir / "paired.txt"), str(data_dir / "full2.txt"), str(broken)]
    assert run(argv) == EXIT_BAD_INPUT


def test_livsic_check(capsys, data_dir):
    code, report = _json(capsys, ["livsic", "check", str(data_dir / "golden.txt"), str(data_dir / "golden_weights.txt")])
    assert code == EXIT_OK
    assert report["zero"] is True
    assert report["potential"] == {"u": "0", "v": "1"}
    code, report = _json(capsys, ["livsic", "check", str(data_dir / "full2.txt"), str(data_dir / "full2_weights.txt")])
    assert code == EXIT_OK
    assert (report["zero"], report["witness"], report["total"]) == (False, "(a)", "1")


def test_livsic_solve(capsys, data_dir):
    code, report = _json(capsys, ["livsic", "solve", str(data_dir / "golden.txt"), str(data_dir / "golden_weights.txt")])
    assert code == EXIT_OK
    assert report["coboundary"] == {"a": "0", "a'": "1", "b": "0"}
    code, report = _json(capsys, ["livsic", "solve", str(data_dir / "full2.txt"), str(data_dir / "full2_weights.txt")])
    assert code == EXIT_REFUSED
    assert report["refused"] == "CycleObstruction"
    assert report["witness"] == "(a)"


@pytest.mark.parametrize("argv, name", [
    (["example", "symbol-expansion"], "symbol-expansion"),
    (["example", "non-open-image", "--kmax", "2", "--period", "10"], "non-open-image"),
    (["example", "reducible-guard"], "reducible-guard"),
    (["example", "expansion-5.6"], "symbol-expansion"),
    (["example", "not-open-5.9", "--kmax", "3"], "non-open-image"),
    (["example", "reducible-3.4"], "reducible-guard"),
])
def test_examples_pass(capsys, argv, name):
    code, report = _json(capsys, argv)
    assert code == EXIT_OK
    assert report["passed"] is True
    assert report["name"] == name


def test_json_report_round_trips(capsys, data_dir):
    run(["section", "returns", str(data_dir / "paired.txt"), str(data_dir / "paired_section.txt"), "--json"])
    text = capsys.readouterr().out.strip()
    assert ReturnsReport.model_validate_json(text).model_dump_json() == text
