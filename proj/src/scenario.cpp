#include "mexec/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mexec/error.hpp"

namespace mexec {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& what) { fail(ErrorKind::Schema, what); }

double number(const json& j, const std::string& key) {
    if (!j.is_number()) schema(key + ": expected a number");
    return j.get<double>();
}

Vector vector_of(const json& j, int n, const std::string& key) {
    if (!j.is_array() || static_cast<int>(j.size()) != n) schema(key + ": expected an array of " + std::to_string(n) + " numbers");
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = number(j[i], key);
    return v;
}

// Nested rows or a flat row-major array.
Matrix matrix_of(const json& j, int rows, int cols, const std::string& key) {
    if (!j.is_array()) schema(key + ": expected an array");
    Matrix m(rows, cols);
    if (!j.empty() && j[0].is_array()) {
        if (static_cast<int>(j.size()) != rows) schema(key + ": expected " + std::to_string(rows) + " rows");
        for (int r = 0; r < rows; ++r) {
            if (!j[r].is_array() || static_cast<int>(j[r].size()) != cols)
                schema(key + ": expected " + std::to_string(cols) + " columns");
            for (int c = 0; c < cols; ++c) m(r, c) = number(j[r][c], key);
        }
        return m;
    }
    if (static_cast<int>(j.size()) != rows * cols)
        schema(key + ": expected " + std::to_string(rows * cols) + " entries in row-major order");
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = number(j[r * cols + c], key);
    return m;
}

template <class Value, class Read>
TimeFunction<Value> function_of(const json& j, const std::string& key, Read&& read) {
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            if (k != "times" && k != "values") schema(key + ": unknown key '" + k + "'");
        if (!j.contains("times") || !j.contains("values")) schema(key + ": table needs times and values");
        const json& times = j.at("times");
        const json& values = j.at("values");
        if (!times.is_array() || !values.is_array() || times.size() != values.size() || times.empty())
            schema(key + ": times and values must be arrays of equal, non-zero length");
        StepTable<Value> table;
        for (std::size_t i = 0; i < times.size(); ++i) {
            table.times.push_back(number(times[i], key));
            table.values.push_back(read(values[i], key));
        }
        for (std::size_t i = 1; i < table.times.size(); ++i)
            if (!(table.times[i] > table.times[i - 1])) schema(key + ": table times must increase");
        return table;
    }
    return TimeFunction<Value>(read(j, key));
}

json write_vector(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json write_matrix(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

template <class Value, class Write>
json write_function(const TimeFunction<Value>& fn, const char* key, Write&& write) {
    if (const auto* c = fn.constant()) return write(*c);
    if (const auto* table = fn.table()) {
        json values = json::array();
        for (const auto& v : table->values) values.push_back(write(v));
        return json{{"times", table->times}, {"values", values}};
    }
    fail(ErrorKind::Schema, std::string(key) + ": callable coefficients cannot be serialized");
}

const std::set<std::string> kKeys = {"n", "m", "T", "O", "lambda0", "mu", "sigma", "rho", "Xi",
                                     "xi", "zeta", "x0", "d0", "grid_steps", "sim"};
const std::set<std::string> kRequired = {"n", "T", "O", "lambda0", "rho", "x0", "grid_steps"};

int positive_integer(const json& j, const std::string& key) {
    if (!j.is_number_integer() || j.get<long long>() < 1) schema(key + ": expected a positive integer");
    return static_cast<int>(j.get<long long>());
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        schema(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) schema("scenario must be a JSON object");
    for (const auto& [key, value] : doc.items())
        if (!kKeys.count(key)) schema("unknown key '" + key + "'");
    for (const auto& key : kRequired)
        if (!doc.contains(key)) schema("missing required key '" + key + "'");

    const int n = positive_integer(doc.at("n"), "n");
    const int m = doc.contains("m") ? positive_integer(doc.at("m"), "m") : 1;
    const double horizon = number(doc.at("T"), "T");
    if (!(horizon > 0.0)) schema("T: must be positive");
    MarketSpec spec = MarketSpec::zeros(n, m, horizon);
    spec.grid_steps = positive_integer(doc.at("grid_steps"), "grid_steps");
    spec.frame = matrix_of(doc.at("O"), n, n, "O");
    spec.lambda0 = vector_of(doc.at("lambda0"), n, "lambda0");
    spec.x0 = vector_of(doc.at("x0"), n, "x0");
    if (doc.contains("d0")) spec.d0 = vector_of(doc.at("d0"), n, "d0");
    if (doc.contains("xi")) spec.terminal_target = vector_of(doc.at("xi"), n, "xi");
    const auto read_vec = [n](const json& j, const std::string& key) { return vector_of(j, n, key); };
    const auto read_square = [n](const json& j, const std::string& key) { return matrix_of(j, n, n, key); };
    const auto read_sigma = [n, m](const json& j, const std::string& key) { return matrix_of(j, n, m, key); };
    spec.resilience = function_of<Matrix>(doc.at("rho"), "rho", read_square);
    if (doc.contains("mu")) spec.drift = function_of<Vector>(doc.at("mu"), "mu", read_vec);
    if (doc.contains("sigma")) spec.volatility = function_of<Matrix>(doc.at("sigma"), "sigma", read_sigma);
    if (doc.contains("Xi")) spec.risk = function_of<Matrix>(doc.at("Xi"), "Xi", read_square);
    if (doc.contains("zeta")) spec.running_target = function_of<Vector>(doc.at("zeta"), "zeta", read_vec);

    Scenario out{std::move(spec), std::nullopt};
    if (doc.contains("sim")) {
        const json& sim = doc.at("sim");
        if (!sim.is_object()) schema("sim: expected an object");
        SimSettings settings;
        for (const auto& [key, value] : sim.items()) {
            if (key == "n_paths") {
                settings.n_paths = static_cast<std::size_t>(positive_integer(value, "sim.n_paths"));
            } else if (key == "seed") {
                if (!value.is_number_unsigned()) schema("sim.seed: expected a non-negative integer");
                settings.seed = value.get<std::uint64_t>();
            } else {
                schema("sim: unknown key '" + key + "'");
            }
        }
        out.sim = settings;
    }
    try {
        out.spec.validate();
    } catch (const Error& e) {
        schema(e.what());
    }
    return out;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Schema, "cannot read scenario " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scenario(text.str());
}

std::string scenario_to_json(const Scenario& scenario) {
    const MarketSpec& spec = scenario.spec;
    json doc;
    doc["n"] = spec.assets;
    doc["m"] = spec.factors;
    doc["T"] = spec.horizon;
    doc["O"] = write_matrix(spec.frame);
    doc["lambda0"] = write_vector(spec.lambda0);
    doc["mu"] = write_function(spec.drift, "mu", write_vector);
    doc["sigma"] = write_function(spec.volatility, "sigma", write_matrix);
    doc["rho"] = write_function(spec.resilience, "rho", write_matrix);
    doc["Xi"] = write_function(spec.risk, "Xi", write_matrix);
    doc["xi"] = write_vector(spec.terminal_target);
    doc["zeta"] = write_function(spec.running_target, "zeta", write_vector);
    doc["x0"] = write_vector(spec.x0);
    doc["d0"] = write_vector(spec.d0);
    doc["grid_steps"] = spec.grid_steps;
    if (scenario.sim) doc["sim"] = {{"n_paths", scenario.sim->n_paths}, {"seed", scenario.sim->seed}};
    return doc.dump(2) + "\n";
}

}  // namespace mexec
