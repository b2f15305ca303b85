#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mexec/lindyn.hpp"

namespace mexec {

/// Shortest text with 17 significant digits, '.' as the decimal separator.
std::string format_number(double value);

/// Comment lines ("# ...") followed by a header and numeric rows.
struct Table {
    std::vector<std::string> comments;
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_table(std::ostream& out, const Table& table);
Table read_table(std::istream& in);

/// Columns t, X_1..X_n, D_1..D_n, H_1..H_n. Row 0 holds the values before the first trade,
/// rows 1..N the grid nodes and the last row the terminal values at T.
Table solution_table(const TimeGrid& grid, const ExecutionPlan& plan, const DeviationPath& deviation,
                     const HiddenState& hidden);

/// Reads the X columns of a solution-shaped table back into a plan on `grid`.
ExecutionPlan plan_from_table(const Table& table, const TimeGrid& grid, int assets);

}  // namespace mexec
