import numpy as np
import pytest

from mmstab.errors import DomainError, ParseError
from mmstab.problemfile import (
    COUNTEREXAMPLE_DOC,
    ProblemFile,
    counterexample_problem,
    emit,
    parse,
    parse_string,
)

H6 = np.array(
    [
        [1.0, 1.0, 1.0, 1.0, 1.0, 1.0],
        [0.0, 0.5, 1.0, 1.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 0.35, 1.0, 1.0],
        [0.0, 0.0, 0.35, 0.0, 1.0, 1.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 0.15],
        [0.0, 0.0, 0.0, 0.0, 0.15, 0.0],
    ]
)
V6 = np.array([0.05, 0.10, 0.05, 0.15, 0.25, 0.20])
W6 = np.array([0.65, 0.15, 0.10, 0.05, 0.30, 0.80])

PLAIN = """\
# leading comment
2
1 1   # trailing comment
0 1

v: 0 1
w: 1 0
"""

JSON_DOC = """\
{
  "name": "demo",
  "description": "all blocks",
  "H": [[0.0, 1.0], [1.0, 0.0]],
  "v": [1.0, 2.0],
  "w": [3.0, 4.0],
  "C": [[1.0, 0.0], [0.0, 2.0]],
  "K": [[0.5, 0.5], [0.5, 0.5]]
}
"""


def fields_equal(a, b):
    for key in ("v", "w", "C", "K"):
        x, y = getattr(a, key), getattr(b, key)
        if (x is None) != (y is None):
            return False
        if x is not None and not np.array_equal(x, y):
            return False
    return np.array_equal(a.H, b.H) and a.name == b.name and a.description == b.description


class TestPlainFormat:
    def test_full_document(self):
        pf = parse_string(PLAIN)
        assert np.array_equal(pf.H, [[1.0, 1.0], [0.0, 1.0]])
        assert np.array_equal(pf.v, [0.0, 1.0])
        assert np.array_equal(pf.w, [1.0, 0.0])
        assert pf.C is None and pf.K is None
        assert pf.name == ""

    def test_one_by_one(self):
        pf = parse_string("1\n0\n")
        assert pf.H.shape == (1, 1)
        assert pf.H[0, 0] == 0.0

    def test_vectors_may_wrap_lines(self):
        pf = parse_string("3\n1 0 0\n0 1 0\n0 0 1\nv: 1 2\n3\nw:\n4 5 6\n")
        assert np.array_equal(pf.v, [1.0, 2.0, 3.0])
        assert np.array_equal(pf.w, [4.0, 5.0, 6.0])

    def test_scientific_notation(self):
        pf = parse_string("2\n1e-3 2.5E+1\n+0.5 -1.25e0\n")
        assert pf.H == pytest.approx(np.array([[1e-3, 25.0], [0.5, -1.25]]))

    @pytest.mark.parametrize(
        "text, line, column",
        [
            ("2\n1 a\n0 1\n", 2, 3),
            ("2\n1 2 3\n0 1\n", 2, 5),
            ("2\n1\n0 1\n", 2, 2),
        ],
    )
    def test_bad_rows_report_position(self, text, line, column):
        with pytest.raises(ParseError) as exc:
            parse_string(text)
        assert exc.value.line == line
        assert exc.value.column == column

    def test_missing_rows(self):
        with pytest.raises(ParseError, match="expected 3 rows"):
            parse_string("3\n1 0 0\n")

    @pytest.mark.parametrize("head", ["x", "0", "-1", "2.5"])
    def test_bad_dimension(self, head):
        with pytest.raises(ParseError, match="dimension"):
            parse_string(f"{head}\n1\n")

    def test_extra_token_on_dimension_line(self):
        with pytest.raises(ParseError, match="single number"):
            parse_string("2 2\n1 0\n0 1\n")

    def test_vector_overflow(self):
        with pytest.raises(ParseError, match="more than 2"):
            parse_string("2\n1 0\n0 1\nv: 1 2 3\n")

    def test_vector_underflow(self):
        with pytest.raises(ParseError, match="expected 2"):
            parse_string("2\n1 0\n0 1\nv: 1\n")

    def test_duplicate_block(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_string("2\n1 0\n0 1\nv: 1 2\nv: 3 4\n")

    def test_unknown_tag(self):
        with pytest.raises(ParseError, match="unexpected token"):
            parse_string("2\n1 0\n0 1\nu: 1 2\n")

    def test_non_finite_rejected(self):
        with pytest.raises(ParseError, match="finite"):
            parse_string("2\n1 nan\n0 1\n")

    @pytest.mark.parametrize("text", ["", "   \n\t\n", "# only comments\n"])
    def test_empty_document(self, text):
        with pytest.raises(ParseError, match="empty"):
            parse_string(text)


class TestJsonFormat:
    def test_full_document(self):
        pf = parse_string(JSON_DOC)
        assert pf.name == "demo"
        assert pf.description == "all blocks"
        assert np.array_equal(pf.H, [[0.0, 1.0], [1.0, 0.0]])
        assert np.array_equal(pf.v, [1.0, 2.0])
        assert np.array_equal(pf.w, [3.0, 4.0])
        assert np.array_equal(pf.C, [[1.0, 0.0], [0.0, 2.0]])
        assert np.array_equal(pf.K, [[0.5, 0.5], [0.5, 0.5]])

    def test_detected_after_leading_whitespace(self):
        pf = parse_string('\n\n  {"H": [[1.0]]}')
        assert pf.H.shape == (1, 1)

    def test_syntax_error_carries_position(self):
        with pytest.raises(ParseError) as exc:
            parse_string('{"H": [[1.0,]]}')
        assert exc.value.line == 1
        assert exc.value.column is not None

    def test_top_level_must_be_object(self):
        with pytest.raises(ParseError, match="object"):
            parse_string("[1, 2]")

    def test_missing_h(self):
        with pytest.raises(ParseError, match='"H"'):
            parse_string('{"v": [1.0]}')

    def test_unknown_key(self):
        with pytest.raises(ParseError, match="unknown keys: Q"):
            parse_string('{"H": [[1.0]], "Q": 1}')

    @pytest.mark.parametrize(
        "doc",
        [
            '{"H": [[1.0, "x"]]}',
            '{"H": [[true]]}',
            '{"H": [[NaN]]}',
            '{"H": [[1.0], [2.0, 3.0]]}',
            '{"H": []}',
            '{"H": 3}',
            '{"H": [[1.0]], "v": [1.0, 2.0]}',
            '{"H": [[1.0]], "C": [[1.0, 0.0], [0.0, 1.0]]}',
            '{"H": [[1.0]], "name": 7}',
        ],
    )
    def test_malformed_documents(self, doc):
        with pytest.raises(ParseError):
            parse_string(doc)


class TestEmit:
    def test_round_trip_identity(self):
        first = parse_string(COUNTEREXAMPLE_DOC)
        second = parse_string(emit(first))
        assert fields_equal(first, second)
        assert emit(second) == emit(first)

    def test_round_trip_preserves_awkward_floats(self):
        pf = ProblemFile(H=[[0.1 + 0.2, 1e-17], [3.0, 0.3]], v=[1.0 / 3.0, 2.0])
        again = parse_string(emit(pf))
        assert fields_equal(pf, again)

    def test_emit_requires_problem(self):
        with pytest.raises(DomainError):
            emit({"H": [[1.0]]})


class TestBuiltin:
    def test_matches_reference_arrays(self):
        pf = counterexample_problem()
        assert np.array_equal(pf.H, H6)
        assert np.array_equal(pf.v, V6)
        assert np.array_equal(pf.w, W6)
        assert pf.name == "builtin-counterexample"

    def test_shipped_file_is_byte_identical(self, repo_root):
        path = repo_root / "problems" / "counterexample.json"
        assert path.read_text(encoding="utf-8") == COUNTEREXAMPLE_DOC
        assert fields_equal(parse(path), counterexample_problem())

    def test_shipped_two_dimensional_files(self, repo_root):
        marginal = parse(repo_root / "problems" / "marginal_2x2.txt")
        assert np.array_equal(marginal.H, [[1.0, 1.0], [0.0, 1.0]])
        assert np.array_equal(marginal.v, [0.0, 1.0])
        assert np.array_equal(marginal.w, [1.0, 0.0])
        uncoupled = parse(repo_root / "problems" / "uncoupled_2x2.txt")
        assert np.array_equal(uncoupled.H, [[0.0, 1.0], [0.0, 1.0]])
        assert np.array_equal(uncoupled.v, [1.0, 0.0])
        assert np.array_equal(uncoupled.w, [1.0, 1.0])


class TestProblemFileType:
    def test_reads_file(self, tmp_path):
        target = tmp_path / "p.txt"
        target.write_text("1\n2.5\n", encoding="utf-8")
        assert parse(target).H[0, 0] == 2.5

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError, match="cannot read"):
            parse(tmp_path / "absent.txt")

    def test_dimension_checks(self):
        with pytest.raises(DomainError):
            ProblemFile(H=[[1.0, 0.0], [0.0, 1.0]], v=[1.0])
        with pytest.raises(DomainError):
            ProblemFile(H=[[1.0]], C=[[1.0, 0.0], [0.0, 1.0]])
        with pytest.raises(DomainError):
            ProblemFile(H=[[1.0, 0.0]])

    def test_repr(self):
        pf = parse_string(JSON_DOC)
        assert "blocks=['v', 'w', 'C', 'K']" in repr(pf)
        assert "name='demo'" in repr(pf)
