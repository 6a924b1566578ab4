import pytest

from mcgkit.cli import main
from mcgkit.grammar_io import serialize_grammar
from mcgkit.phenomena import build_cfg_fig2


@pytest.fixture()
def fig2_file(tmp_path):
    path = tmp_path / "fig2.mcg"
    path.write_text(serialize_grammar(build_cfg_fig2()), encoding="utf-8")
    return str(path)


def test_recognize_exit_codes(fig2_file, capsys):
    assert main(["recognize", "--grammar", fig2_file, "--string", "the dog likes icecream"]) == 0
    assert "recognized" in capsys.readouterr().out
    assert main(["recognize", "--grammar", fig2_file, "--string", "dog the"]) == 1
    assert main(["recognize", "--grammar", "builtin:fig2_cfg", "--string", "the dog likes icecream"]) == 0


def test_usage_errors_exit_2(fig2_file, capsys):
    assert main(["recognize", "--grammar", "missing.mcg", "--string", "x"]) == 2
    assert "cannot read grammar" in capsys.readouterr().err
    assert main(["frobnicate"]) == 2
    assert main(["recognize", "--grammar", fig2_file]) == 2  # missing --string
    assert main(["recognize", "--grammar", "builtin:zzz", "--string", "x"]) == 2


def test_bad_grammar_text_exits_2(tmp_path, capsys):
    path = tmp_path / "bad.mcg"
    path.write_text("grammar g\nstart S\ntree t initial (S N*)\n", encoding="utf-8")
    assert main(["validate", "--grammar", str(path)]) == 2
    assert "foot node in initial tree" in capsys.readouterr().err


def test_validate_output(fig2_file, capsys):
    assert main(["validate", "--grammar", fig2_file]) == 0
    out = capsys.readouterr().out
    assert "fig2_cfg: ok" in out and "substitution-only" in out


def test_generate_output(capsys):
    assert main(["generate", "--grammar", "builtin:fig1_fsg", "--max-len", "5"]) == 0
    assert capsys.readouterr().out.strip() == "the dog likes icecream"


def test_derive_writes_dots(fig2_file, tmp_path, capsys):
    dot_dir = tmp_path / "dots"
    code = main(
        [
            "derive", "--grammar", fig2_file,
            "--string", "the dog likes icecream",
            "--dot-dir", str(dot_dir),
        ]
    )
    assert code == 0
    assert "1 derivation(s), exhausted=true" in capsys.readouterr().out
    assert (dot_dir / "derivation_0.dot").read_text().startswith("digraph")


def test_scramble_matrix_csv_and_dots(tmp_path, capsys):
    csv_path = tmp_path / "matrix.csv"
    dot_dir = tmp_path / "witnesses"
    code = main(
        [
            "scramble-matrix", "--grammar", "builtin:scrambling_n4",
            "--depth", "1",
            "--csv", str(csv_path),
            "--dot-dir", str(dot_dir),
        ]
    )
    assert code == 0
    content = csv_path.read_text()
    assert content.splitlines()[0] == (
        "depth,permutation,string,string_derivable,cooccurrence_derivable,witness_size,exhausted"
    )
    assert len(list(dot_dir.glob("*.dot"))) == 2


def test_scramble_matrix_text_output(capsys):
    assert main(["scramble-matrix", "--grammar", "builtin:scrambling_n4", "--depth", "0"]) == 0
    out = capsys.readouterr().out
    assert "perm" in out and "1" in out


def test_center_embed_csv(tmp_path):
    csv_path = tmp_path / "p.csv"
    code = main(
        [
            "center-embed", "--grammar", "builtin:fsg_center_m1",
            "--max-depth", "2",
            "--csv", str(csv_path),
        ]
    )
    assert code == 0
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "grammar,property,depth,outcome,crash_depth"
    assert lines[3] == "fsg_center_m1,P,2,false,2"


def test_grammars_listing(capsys):
    assert main(["grammars"]) == 0
    out = capsys.readouterr().out
    assert "fig2_cfg" in out
    assert main(["grammars", "fig1_fsg"]) == 0
    assert capsys.readouterr().out.startswith("grammar fig1_fsg")
