"""Shipped golden table, offline compilation, and the diff tooling."""

import pytest

from ffsched.errors import OutOfRangeError, TableError
from ffsched.fuzzy import (
    LookupTable,
    agreement_within,
    compile_lookup_table,
    diff_report,
    format_table,
    load_golden_table,
    lookup,
    parse_table_text,
)
from oracle_tables import GOLDEN_CELLS


@pytest.fixture(scope="module")
def golden():
    return load_golden_table()


@pytest.fixture(scope="module")
def compiled():
    return compile_lookup_table()


class TestGoldenTable:
    def test_matches_reference_copy_cell_for_cell(self, golden):
        assert golden.provenance == "golden"
        assert golden.cells == GOLDEN_CELLS

    def test_spot_values(self, golden):
        assert lookup(golden, -6, -6) == 6
        assert lookup(golden, 6, 6) == -6
        assert lookup(golden, 0, 0) == 0
        assert lookup(golden, -3, 0) == 5
        assert lookup(golden, 6, 0) == -5
        assert lookup(golden, 0, -6) == 5
        assert lookup(golden, 0, 6) == -2

    def test_central_band_is_dead(self, golden):
        # small positive error with steady utilization asks for no change
        for e_q in range(0, 4):
            assert lookup(golden, e_q, 0) == 0

    def test_lookup_rejects_bad_levels(self, golden):
        with pytest.raises(OutOfRangeError):
            lookup(golden, 7, 0)
        with pytest.raises(OutOfRangeError):
            lookup(golden, 0, -7)


def _assert_monotone(table: LookupTable) -> None:
    for row in table.cells:
        assert all(a >= b for a, b in zip(row, row[1:])), row
    for col in zip(*table.cells):
        assert all(a >= b for a, b in zip(col, col[1:])), col


class TestCompiledTable:
    def test_both_tables_monotone(self, golden, compiled):
        _assert_monotone(golden)
        _assert_monotone(compiled)

    def test_agreement_with_golden(self, golden, compiled):
        assert compiled.provenance == "compiled"
        assert agreement_within(compiled, golden, tolerance=1) == 1.0
        assert agreement_within(compiled, golden, tolerance=0) == pytest.approx(126 / 169)

    def test_compiled_corners_and_centre(self, compiled):
        assert lookup(compiled, -6, -6) == 6
        assert lookup(compiled, 6, 6) == -6
        assert lookup(compiled, 0, 0) == 0

    def test_diff_report_content(self, golden, compiled):
        report = diff_report(compiled, golden)
        assert "cells equal: 126/169 (74.6%)" in report
        assert "cells within +/-1: 169/169 (100.0%)" in report
        assert "max abs difference: 1" in report
        # 13 difference rows plus header and three stat lines
        assert len(report.strip().splitlines()) == 17

    def test_self_diff_is_all_zero(self, golden):
        report = diff_report(golden, golden)
        assert "cells equal: 169/169 (100.0%)" in report
        assert "max abs difference: 0" in report


class TestParseFormat:
    def test_round_trip(self, golden):
        again = parse_table_text(format_table(golden), provenance="golden")
        assert again.cells == golden.cells

    def test_comments_and_blank_lines_ignored(self):
        text = "# header\n\n" + "\n".join(" ".join("0" for _ in range(13)) for _ in range(13))
        table = parse_table_text(text, provenance="compiled")
        assert table.cells[0] == (0,) * 13

    def test_wrong_shape_rejected(self):
        with pytest.raises(TableError):
            parse_table_text("1 2 3\n4 5 6\n")

    def test_non_integer_cell_rejected(self):
        bad = "\n".join(" ".join("x" if (i, j) == (5, 5) else "0" for j in range(13)) for i in range(13))
        with pytest.raises(TableError):
            parse_table_text(bad)

    def test_out_of_range_cell_rejected(self):
        rows = [[0] * 13 for _ in range(13)]
        rows[0][0] = 8
        with pytest.raises(TableError):
            LookupTable(cells=tuple(tuple(r) for r in rows), provenance="golden")

    def test_monotonicity_violation_rejected(self):
        rows = [[0] * 13 for _ in range(13)]
        rows[6][7] = 1  # jumps up along the row
        with pytest.raises(TableError):
            LookupTable(cells=tuple(tuple(r) for r in rows), provenance="golden")
