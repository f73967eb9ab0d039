"""Adapter acceptance: archives interoperate with the main toolkit."""

from collections import Counter

from plsim.archive import import_archive
from plsim.cli import main as plsim_main
from plsim.report import parse_matrix_csv

from plsim_adapter import ExtractionJob, extract
from plsim_adapter.extract import read_samples

from conftest import write_samples

VARIANT_RECORDS = [
    ("f0p2", "total", ["total", "=", "0", ";"], 0),
    ("f0p6", "total", ["(", "total", ")", ";"], 1),
    ("f1p1", "value", ["value", "+", "index"], 0),
    ("f1p5", "value", ["index", "=", "value", ";"], 2),
    ("f2p3", "=", ["count", "=", "7", ";"], 1),
    ("f2p9", "=", ["total", "=", "value", ";"], 1),
    ("f3p2", "index", ["value", "+", "index", ";"], 2),
    ("f3p6", "index", ["index", "-", "1"], 0),
    ("f4p0", "count", ["count", ";"], 0),
    ("f4p4", "count", ["1", "+", "count", ";"], 2),
]


def test_criterion_adapter_conformance(checkpoint, samples_file, tmp_path):
    """10-sample fixture: archive validates, token multiset round-trips, and
    a two-archive `plsim sim` run yields a 2x2 matrix with unit diagonal."""
    archive_a = tmp_path / "lang_a.lrep"
    skipped = []
    written = extract(ExtractionJob(str(checkpoint), samples_file),
                      archive_a, skipped=skipped)
    assert written == 10 and skipped == []

    rep = import_archive(archive_a)
    assert rep.language == "lang_a"
    _, samples = read_samples(samples_file)
    expected = Counter(s.token for s in samples)
    got = Counter({t: s.size for t, s in rep.sets.items()})
    assert got == expected

    samples_b = write_samples(tmp_path / "lang_b.samples", "lang_b",
                              VARIANT_RECORDS)
    archive_b = tmp_path / "lang_b.lrep"
    extract(ExtractionJob(str(checkpoint), samples_b), archive_b)

    out = tmp_path / "sim"
    assert plsim_main(["sim", "--archives", str(archive_a), str(archive_b),
                       "--out", str(out)]) == 0
    languages, directed = parse_matrix_csv(
        (out / "directed.csv").read_text(encoding="utf-8")
    )
    assert languages == ["lang_a", "lang_b"]
    assert directed.shape == (2, 2)
    assert abs(directed[0, 0] - 1.0) < 1e-6
    assert abs(directed[1, 1] - 1.0) < 1e-6
    print("\nPASS adapter conformance: archive validated, token multiset "
          "round-tripped, 2x2 sim matrix with unit diagonal")
