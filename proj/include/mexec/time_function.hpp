#pragma once

#include <algorithm>
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "mexec/linalg.hpp"

namespace mexec {

/// Piecewise-constant table: values[k] holds on [times[k], times[k+1]), the last one up to the horizon.
template <class Value>
struct StepTable {
    std::vector<double> times;
    std::vector<Value> values;
};

/// Deterministic coefficient as a function of time: constant, step table or arbitrary callable.
template <class Value>
class TimeFunction {
public:
    using Callable = std::function<Value(double)>;

    TimeFunction() = default;
    TimeFunction(Value constant) : repr_(std::move(constant)) {}
    TimeFunction(StepTable<Value> table) : repr_(std::move(table)) {}
    TimeFunction(Callable fn) : repr_(std::move(fn)) {}

    Value operator()(double t) const {
        if (const auto* c = std::get_if<Value>(&repr_)) return *c;
        if (const auto* table = std::get_if<StepTable<Value>>(&repr_)) {
            std::size_t k = 0;
            while (k + 1 < table->times.size() && table->times[k + 1] <= t) ++k;
            return table->values[k];
        }
        return std::get<Callable>(repr_)(t);
    }

    const Value* constant() const { return std::get_if<Value>(&repr_); }
    const StepTable<Value>* table() const { return std::get_if<StepTable<Value>>(&repr_); }
    bool is_callable() const { return std::holds_alternative<Callable>(repr_); }

    /// Integral of f(value(s)) over [a, b]; exact for constants and tables, Gauss-Legendre otherwise.
    template <class Fn>
    auto integrate(double a, double b, Fn&& f) const -> decltype(f(std::declval<Value>())) {
        using Result = decltype(f(std::declval<Value>()));
        if (const auto* c = std::get_if<Value>(&repr_)) return Result(f(*c) * (b - a));
        if (const auto* table = std::get_if<StepTable<Value>>(&repr_)) {
            Result total = Result(f(table->values.front()) * 0.0);
            for (std::size_t k = 0; k < table->times.size(); ++k) {
                const double lo = k == 0 ? a : std::max(a, table->times[k]);
                const double hi = k + 1 < table->times.size() ? std::min(b, table->times[k + 1]) : b;
                if (hi > lo) total = Result(total + f(table->values[k]) * (hi - lo));
            }
            return total;
        }
        static constexpr double nodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.9061798459386640};
        static constexpr double weights[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                              0.4786286704993665, 0.2369268850561891};
        const auto& fn = std::get<Callable>(repr_);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        Result total = Result(f(fn(mid)) * 0.0);
        for (int q = 0; q < 5; ++q) total = Result(total + f(fn(mid + half * nodes[q])) * (weights[q] * half));
        return total;
    }

private:
    std::variant<Value, StepTable<Value>, Callable> repr_;
};

using VectorFunction = TimeFunction<Vector>;
using MatrixFunction = TimeFunction<Matrix>;

}  // namespace mexec
