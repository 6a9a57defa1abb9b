import csv
import io
import json

import pytest
from gmpy2 import mpq

from simplexmoments import catalog as cat
from simplexmoments.moments import ClosedFormValue
from simplexmoments.serialization import (
    SchemaError, dump_polytope, format_number, load_polytope, polytope_from_dict, polytope_to_dict,
    reports_to_csv, reports_to_json,
)
from simplexmoments.verify import Report, config_report, run_suite, suite_names


# ---------------------------------------------------------------------------
# polytope documents
# ---------------------------------------------------------------------------

def test_round_trip_keeps_vertices_and_generators():
    entry = cat.get("T3")
    P, gens = load_polytope(dump_polytope(entry.polytope, entry.generators))
    assert P.vertices == entry.polytope.vertices
    assert gens == [list(g) for g in entry.generators]


def test_round_trip_of_non_integer_coordinates():
    entry = cat.get("truncated tetrahedron")
    P, _ = polytope_from_dict(json.loads(json.dumps(polytope_to_dict(entry.polytope))))
    assert P.vertices == entry.polytope.vertices
    assert P.volume == entry.polytope.volume


def test_string_coordinates_are_accepted():
    P, gens = polytope_from_dict({"dim": 2, "vertices": [["0", "0"], ["3/2", 0], [0, [1, 2]]]})
    assert P.vertices[1] == (mpq(3, 2), 0) and gens == []


@pytest.mark.parametrize("doc, message", [
    ({"dim": 2, "vertices": [[0, 0], [1, 0], [0, [1, 0]]]}, "vertices[2][1]: denominator must be positive"),
    ({"dim": 2, "vertices": [[0, 0], [1, 0], [0]]}, "vertices[2]: has 1 coordinates, dim is 2"),
    ({"vertices": [[0]]}, "dim: missing field"),
    ({"dim": 1, "vertices": [[0], [True]]}, "vertices[1][0]: expected a rational, got a boolean"),
    ({"dim": 1, "vertices": [[0], ["x"]]}, "vertices[1][0]: cannot parse"),
    ({"dim": 1, "vertices": [[0], [0]]}, "vertices: contains duplicate points"),
    ({"dim": 1, "vertices": [[0], [1]], "generators": [[0, 0]]}, "generators[0]: must be a permutation"),
    ([], "document must be an object"),
])
def test_schema_errors_name_the_offending_path(doc, message):
    with pytest.raises(SchemaError) as err:
        polytope_from_dict(doc)
    assert str(err.value).startswith(message)


def test_invalid_json():
    with pytest.raises(SchemaError, match="invalid JSON"):
        load_polytope("{")


def test_format_number():
    assert format_number(mpq(3, 2000)) == "3/2000"
    assert format_number(mpq(4)) == "4"
    assert format_number(1 / 3) == "0.333333333333333"
    assert format_number(None) is None
    assert format_number(True) == "true"


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def test_tesseract():
    entry = cat.get("C4")
    assert len(entry.polytope.vertices) == 16
    assert entry.group.order == 384
    assert cat.get("tesseract") is entry


def test_octahedron_volume():
    assert cat.get("O3").polytope.volume == mpq(4, 3)


@pytest.mark.parametrize("alias", ["Rhombic Dodecahedron", "rhombic_dodecahedron", "rhombic-dodecahedron"])
def test_aliases(alias):
    assert cat.get(alias).name == "rhombic dodecahedron"


def test_unknown_solid():
    with pytest.raises(cat.UnknownSolidError):
        cat.get("dodecahedron")


def test_rhombic_dodecahedron_reference():
    ref = cat.reference("rhombic dodecahedron", 1)
    assert float(ref) == pytest.approx(0.012938482, abs=5e-10)
    assert ref.provenance


def test_starred_solids_have_no_reference():
    for name in cat.names():
        if cat.get(name).starred:
            assert not cat.references_for(name), name


def test_registry_lint_is_clean():
    assert cat.lint_references() == []


def test_lint_catches_problems():
    bad = cat.Reference("T3", "moment", 1, ClosedFormValue(approx=0.0174), "")
    problems = cat.lint_references([bad, bad])
    assert any("missing provenance" in p for p in problems)
    assert any("duplicate" in p for p in problems)
    assert any("significant digits" in p for p in problems)


def test_errata_keep_the_printed_value():
    ref = cat.reference("T2", 8)
    assert ref.value == mpq(13, 2646000) and ref.erratum == mpq(13, 264600)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def test_csv_has_one_row_per_report():
    reports = run_suite("mc-small")
    rows = list(csv.DictReader(io.StringIO(reports_to_csv(reports))))
    assert len(rows) == len(reports)
    assert {"abs_discrepancy", "rel_discrepancy", "tolerance", "passed"} <= set(rows[0])


def test_json_reports_are_byte_identical_across_runs():
    a = reports_to_json(run_suite("mc-small", seed=3))
    b = reports_to_json(run_suite("mc-small", seed=3))
    assert a == b
    assert all(row["runtime_s"] is None for row in json.loads(a))


def test_odd_report_carries_discrepancies():
    reports = run_suite("d3-odd-first")
    t3 = next(r for r in reports if r.name.startswith("T3"))
    row = json.loads(reports_to_json([t3]))[0]
    assert row["passed"] is True
    assert float(row["rel_discrepancy"]) < 1e-4


def test_config_report_marks_conflicts():
    assert config_report("O3").passed
    assert not config_report("T3").passed


def test_report_dict():
    r = Report("x", "moment", mpq(1, 72), mpq(1, 72), 0.0, True, 0.0, 0.0)
    assert r.as_dict()["value"] == "1/72"


def test_suite_names():
    assert {"even-table", "closed-forms", "configs", "d3-odd-first", "mc-small", "mc-t4", "efron"} <= set(suite_names())
    with pytest.raises(KeyError):
        run_suite("nope")
