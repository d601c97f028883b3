"""Command-line contract: exit codes, output formats, byte stability."""

from __future__ import annotations

from pathlib import Path

import pytest

from gmtannot import canonicalize_ag, parse_ag, parse_gmt, serialize_gmt
from gmtannot.cli import main
from conftest import FIXTURES, load_fixture

SENTENCE_XML = str(FIXTURES / "msannot_sentence.xml")
TOKENS = str(FIXTURES / "msannot_sentence.tokens")
AG_XML = str(FIXTURES / "annotation_graph.xml")


# ---------------------------------------------------------------------------
# validate


def test_validate_sentence_fixture(capsys):
    assert main(["validate", SENTENCE_XML]) == 0
    captured = capsys.readouterr()
    assert captured.out == ""


def test_validate_zero_byte_file(tmp_path, capsys):
    empty = tmp_path / "empty.xml"
    empty.write_text("")
    assert main(["validate", str(empty)]) == 2
    assert capsys.readouterr().err != ""


def test_validate_missing_file(capsys):
    assert main(["validate", "/no/such/file.xml"]) == 2


def test_validate_duplicate_ids(tmp_path, capsys):
    bad = tmp_path / "dup.xml"
    bad.write_text(
        '<struct type="MSAnnot">'
        '<struct type="W-level" id="w1"/><struct type="W-level" id="w1"/>'
        "</struct>"
    )
    assert main(["validate", str(bad)]) == 1
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1
    severity, code, path, message = lines[0].split("\t")
    assert (severity, code) == ("ERROR", "DUPLICATE_ID")
    assert path == "/struct[1]/struct[2]"
    assert "w1" in message


def test_validate_with_custom_registry(tmp_path, capsys):
    doc = tmp_path / "doc.xml"
    doc.write_text('<struct type="x"><feat type="colour">red</feat></struct>')
    assert main(["validate", str(doc)]) == 1
    assert "UNKNOWN_CATEGORY" in capsys.readouterr().out
    registry = tmp_path / "reg.txt"
    registry.write_text("colour kind=set:red,green\n")
    assert main(["validate", str(doc), "--registry", str(registry)]) == 0


# ---------------------------------------------------------------------------
# convert


def test_convert_ag_to_gmt(tmp_path, capsys):
    out = tmp_path / "gmt"
    assert main(["convert", "--from", "ag", "--to", "gmt", AG_XML, "-o", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["landmarks.xml", "morphAnnot.xml", "phoneticAnnot.xml"]


def test_convert_empty_graph(tmp_path):
    source = tmp_path / "empty.xml"
    source.write_text("<annotation/>")
    out = tmp_path / "gmt"
    assert main(["convert", "--from", "ag", "--to", "gmt", str(source), "-o", str(out)]) == 0
    assert [p.name for p in out.iterdir()] == ["landmarks.xml"]


def test_convert_round_trip(tmp_path):
    out = tmp_path / "gmt"
    assert main(["convert", "--from", "ag", "--to", "gmt", AG_XML, "-o", str(out)]) == 0
    back = tmp_path / "back.xml"
    assert (
        main(
            [
                "convert", "--from", "gmt", "--to", "ag",
                str(out / "landmarks.xml"),
                str(out / "phoneticAnnot.xml"),
                str(out / "morphAnnot.xml"),
                "-o", str(back),
            ]
        )
        == 0
    )
    original = parse_ag(load_fixture("annotation_graph.xml"))
    rebuilt = parse_ag(back.read_text())
    assert canonicalize_ag(rebuilt) == canonicalize_ag(original)


def test_convert_unknown_arc_type(tmp_path, capsys):
    source = tmp_path / "q.xml"
    source.write_text(
        "<annotation>"
        '<arc><source id="0" offset="0"/><label att_1="Q" att_2="x"/><target id="1" offset="5"/></arc>'
        "</annotation>"
    )
    assert main(["convert", "--from", "ag", "--to", "gmt", str(source), "-o", str(tmp_path / "o")]) == 1
    assert "Q" in capsys.readouterr().err


def test_convert_malformed_ag(tmp_path, capsys):
    source = tmp_path / "bad.xml"
    source.write_text("<annotation><arc></annotation>")
    assert main(["convert", "--from", "ag", "--to", "gmt", str(source), "-o", str(tmp_path / "o")]) == 2


def test_convert_with_map_file(tmp_path):
    source = tmp_path / "q.xml"
    source.write_text(
        "<annotation>"
        '<arc><source id="0" offset="0"/><label att_1="Q" att_2="x"/><target id="1" offset="5"/></arc>'
        "</annotation>"
    )
    mapping = tmp_path / "map.tsv"
    mapping.write_text("Q\tquestionAnnot\tcue\n")
    out = tmp_path / "gmt"
    assert main(
        ["convert", "--from", "ag", "--to", "gmt", str(source), "-o", str(out), "--map", str(mapping)]
    ) == 0
    assert sorted(p.name for p in out.iterdir()) == ["landmarks.xml", "questionAnnot.xml"]


# ---------------------------------------------------------------------------
# resolve


def test_resolve_sentence_against_tokens(capsys):
    assert main(["resolve", SENTENCE_XML, "--tokens", TOKENS]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4
    spans = [tuple(line.split("\t")) for line in lines]
    assert spans == [
        ("/struct[1]/struct[1]", "0", "4"),
        ("/struct[1]/struct[2]", "5", "9"),
        ("/struct[1]/struct[3]", "10", "13"),
        ("/struct[1]/struct[4]", "14", "24"),
    ]


def test_resolve_positional_spans_without_context(capsys):
    assert main(["resolve", str(FIXTURES / "temporal_phone.xml")]) == 0
    assert capsys.readouterr().out == "/struct[1]\t2300\t3200\n"


def test_resolve_with_landmarks(capsys):
    assert main(
        [
            "resolve",
            str(FIXTURES / "event_anchored_phones.xml"),
            "--landmarks",
            str(FIXTURES / "landmark_desc.xml"),
        ]
    ) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == [
        "/struct[1]/struct[1]\t0\t2360",
        "/struct[1]/struct[2]\t2360\t5200",
    ]


def test_resolve_strict_fails_on_bad_target(tmp_path, capsys):
    doc = tmp_path / "bad.xml"
    doc.write_text('<struct type="x"><struct><seg target="#zz"/></struct></struct>')
    assert main(["resolve", str(doc), "--tokens", TOKENS]) == 1
    assert "zz" in capsys.readouterr().err


def test_resolve_lenient_skips_bad_target(tmp_path, capsys):
    doc = tmp_path / "bad.xml"
    doc.write_text(
        '<struct type="x">'
        '<struct><seg target="#zz"/></struct><struct><seg startsAt="1" endsAt="2"/></struct>'
        "</struct>"
    )
    assert main(["resolve", str(doc), "--tokens", TOKENS, "--lenient"]) == 0
    captured = capsys.readouterr()
    assert captured.out == "/struct[1]/struct[2]\t1\t2\n"
    assert "zz" in captured.err


def test_resolve_missing_context_file(capsys):
    assert main(["resolve", SENTENCE_XML, "--tokens", "/no/such/tokens.tab"]) == 2


# ---------------------------------------------------------------------------
# merge


def test_merge_fixture_with_itself_is_canonical(tmp_path):
    out = tmp_path / "merged.xml"
    assert main(["merge", SENTENCE_XML, SENTENCE_XML, "-o", str(out), "--policy", "dedup"]) == 0
    doc, _ = parse_gmt(load_fixture("msannot_sentence.xml"))
    assert out.read_text() == serialize_gmt(doc)
    assert out.read_bytes() == (FIXTURES / "msannot_sentence.xml").read_bytes()


def test_merge_fold_reproduces_alternatives_fixture(tmp_path):
    verb = tmp_path / "verb.xml"
    verb.write_text(
        '<struct type="W-level"><seg target="#w1"/>'
        '<feat type="lemma">boucher</feat><feat type="pos">VERB</feat>'
        '<feat type="tense">present</feat><feat type="confidence">0.4</feat>'
        "</struct>"
    )
    noun = tmp_path / "noun.xml"
    noun.write_text(
        '<struct type="W-level"><seg target="#w1"/>'
        '<feat type="lemma">bouche</feat><feat type="pos">NOUN</feat>'
        '<feat type="confidence">0.6</feat>'
        "</struct>"
    )
    out = tmp_path / "folded.xml"
    assert main(["merge", str(verb), str(noun), "-o", str(out), "--policy", "fold-alt"]) == 0
    assert out.read_bytes() == (FIXTURES / "msannot_alternatives_bouche.xml").read_bytes()


def test_merge_mixed_doc_types(tmp_path, capsys):
    out = tmp_path / "merged.xml"
    assert (
        main(["merge", SENTENCE_XML, str(FIXTURES / "msannot_fusion_du.xml"), "-o", str(out)]) == 1
    )
    assert "mixed document types" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# diff


def test_diff_identical_files(capsys):
    assert main(["diff", SENTENCE_XML, SENTENCE_XML]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4
    assert all(line.startswith("bothEqual\t") for line in lines)


def test_diff_single_edit(tmp_path, capsys):
    edited = tmp_path / "edited.xml"
    edited.write_text(load_fixture("msannot_sentence.xml").replace("VERB", "NOUN"))
    assert main(["diff", SENTENCE_XML, str(edited)]) == 1
    lines = capsys.readouterr().out.splitlines()
    differing = [line for line in lines if line.startswith("bothDiffer\t")]
    assert len(differing) == 1
    assert "pos" in differing[0]


def test_diff_against_empty(tmp_path, capsys):
    empty = tmp_path / "empty.xml"
    empty.write_text('<struct type="MSAnnot"/>')
    assert main(["diff", SENTENCE_XML, str(empty)]) == 1
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4
    assert all(line.startswith("onlyLeft\t") for line in lines)


def test_diff_unreadable_file(capsys):
    assert main(["diff", SENTENCE_XML, "/no/such/file.xml"]) == 2


# ---------------------------------------------------------------------------
# determinism


@pytest.mark.parametrize(
    "argv",
    [
        ["validate", SENTENCE_XML],
        ["resolve", SENTENCE_XML, "--tokens", TOKENS],
        ["diff", SENTENCE_XML, str(FIXTURES / "msannot_fusion_du.xml")],
    ],
)
def test_outputs_are_byte_stable(argv, capsys):
    first_code = main(argv)
    first = capsys.readouterr()
    second_code = main(argv)
    second = capsys.readouterr()
    assert first_code == second_code
    assert first.out == second.out
