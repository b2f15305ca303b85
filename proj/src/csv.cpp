#include "mexec/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "mexec/error.hpp"

namespace mexec {

std::string format_number(double value) {
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

void write_table(std::ostream& out, const Table& table) {
    for (const auto& c : table.comments) out << "# " << c << '\n';
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
        out << '\n';
    }
}

Table read_table(std::istream& in) {
    Table table;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            table.comments.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream stream(line);
        std::string cell;
        while (std::getline(stream, cell, ',')) cells.push_back(cell);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) fail(ErrorKind::Shape, "row width differs from header");
        std::vector<double> row;
        for (const auto& c : cells) {
            double v = 0.0;
            const auto result = std::from_chars(c.data(), c.data() + c.size(), v);
            if (result.ec != std::errc() || result.ptr != c.data() + c.size())
                fail(ErrorKind::Shape, "not a number: '" + c + "'");
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) fail(ErrorKind::Shape, "table has no header");
    return table;
}

Table solution_table(const TimeGrid& grid, const ExecutionPlan& plan, const DeviationPath& deviation,
                     const HiddenState& hidden) {
    const auto n = plan.x_pre.size();
    Table table;
    table.header.push_back("t");
    for (const char* prefix : {"X_", "D_", "H_"})
        for (Eigen::Index k = 0; k < n; ++k) table.header.push_back(prefix + std::to_string(k + 1));
    const auto row = [&](double t, const Vector& x, const Vector& d, const Vector& h) {
        std::vector<double> r{t};
        for (const Vector* v : {&x, &d, &h})
            for (Eigen::Index k = 0; k < n; ++k) r.push_back((*v)(k));
        table.rows.push_back(std::move(r));
    };
    const auto steps = plan.steps();
    row(0.0, plan.x_pre, deviation.d_pre, hidden.values.front());
    for (std::size_t i = 0; i < steps; ++i)
        row(grid.at(static_cast<int>(i)), plan.values[i], deviation.values[i], hidden.values[i]);
    row(grid.horizon(), plan.terminal, deviation.terminal, hidden.values.back());
    return table;
}

ExecutionPlan plan_from_table(const Table& table, const TimeGrid& grid, int assets) {
    require(static_cast<int>(table.header.size()) >= 1 + assets && table.header[0] == "t", ErrorKind::Shape,
            "plan table needs columns t, X_1..X_n");
    for (int k = 0; k < assets; ++k)
        require(table.header[1 + k] == "X_" + std::to_string(k + 1), ErrorKind::Shape,
                "plan table needs columns t, X_1..X_n");
    const auto steps = static_cast<std::size_t>(grid.steps());
    require(table.rows.size() == steps + 2, ErrorKind::Shape,
            "plan table needs N + 2 rows (pre-trade, grid nodes, terminal)");
    const auto x_of = [&](std::size_t r) {
        Vector v(assets);
        for (int k = 0; k < assets; ++k) v(k) = table.rows[r][1 + k];
        return v;
    };
    const double tol = 1e-9 * grid.horizon();
    for (std::size_t i = 0; i < steps; ++i)
        require(std::abs(table.rows[i + 1][0] - grid.at(static_cast<int>(i))) <= tol, ErrorKind::Shape,
                "plan times do not match the scenario grid");
    require(std::abs(table.rows.front()[0]) <= tol && std::abs(table.rows.back()[0] - grid.horizon()) <= tol,
            ErrorKind::Shape, "plan must start at 0 and end at T");
    ExecutionPlan plan{x_of(0), std::vector<Vector>(steps), x_of(steps + 1)};
    for (std::size_t i = 0; i < steps; ++i) plan.values[i] = x_of(i + 1);
    return plan;
}

}  // namespace mexec
