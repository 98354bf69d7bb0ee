import io

import pytest

from mopdom.generators import enumerate_triangulations, family
from mopdom.mop_core import Mop
from mopdom.mop_format import MopFormatError, format_mop, parse_mops, parse_text, write_mops

TWO_RECORDS = """# two small mops
5
0 2
0 3

# the snowflake
6
0 2
0 4
2 4
"""


class TestParse:
    def test_two_records(self):
        records = parse_text(TWO_RECORDS)

        assert len(records) == 2
        assert records[0].mop == Mop(5, frozenset({(0, 2), (0, 3)}))
        assert records[0].index == 0
        assert records[0].line_no == 2
        assert records[1].mop.n == 6
        assert records[1].index == 1
        assert records[1].line_no == 7

    def test_triangle_has_no_diagonal_lines(self):
        records = parse_text("3\n")

        assert records[0].mop == Mop(3, frozenset())

    def test_non_integer_line(self):
        with pytest.raises(MopFormatError) as excinfo:
            parse_text("5\n0 2\na\n")

        # Should point at the offending line
        assert excinfo.value.line_no == 3

    def test_reversed_diagonal(self):
        with pytest.raises(MopFormatError) as excinfo:
            parse_text("5\n2 0\n0 3\n")

        assert excinfo.value.line_no == 2

    def test_unsorted_diagonals(self):
        with pytest.raises(MopFormatError) as excinfo:
            parse_text("5\n0 3\n0 2\n")

        assert excinfo.value.line_no == 3

    def test_repeated_diagonal(self):
        # Should not merge the repeat into one diagonal
        with pytest.raises(MopFormatError) as excinfo:
            parse_text("5\n0 2\n0 2\n0 3\n")

        assert excinfo.value.line_no == 3

    def test_order_resets_between_records(self):
        records = parse_text("5\n0 2\n0 3\n\n5\n0 2\n0 3\n")

        assert records[0].mop == records[1].mop

    def test_three_tokens(self):
        with pytest.raises(MopFormatError):
            parse_text("5\n0 2 3\n")

    def test_bad_header(self):
        with pytest.raises(MopFormatError) as excinfo:
            parse_text("five\n")

        assert excinfo.value.line_no == 1

    def test_parser_does_not_validate(self):
        # Structure is checked by validate(), not by the parser
        records = parse_text("7\n0 2\n0 3\n")

        assert records[0].mop.n == 7
        assert len(records[0].mop.diagonals) == 2


class TestWrite:
    def test_format(self):
        text = format_mop(family('fan', 5), comment="fan")

        assert text == "# fan\n5\n0 2\n0 3\n\n"

    def test_write_and_read_back(self, tmp_path):
        mops = list(enumerate_triangulations(6))
        path = tmp_path / "six.mop"
        with open(path, 'w') as f:
            count = write_mops(f, mops)

        assert count == 14
        with open(path) as f:
            assert [r.mop for r in parse_mops(f)] == mops

    def test_stream_output(self):
        buffer = io.StringIO()
        write_mops(buffer, [family('fan', 4), family('serpentine', 6)])

        records = parse_text(buffer.getvalue())
        assert [r.mop.n for r in records] == [4, 6]
