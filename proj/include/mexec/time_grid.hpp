#pragma once

#include <cstddef>

namespace mexec {

/// Uniform grid 0 = t_0 < ... < t_N = T.
class TimeGrid {
public:
    TimeGrid(double horizon, int steps);

    double horizon() const noexcept { return horizon_; }
    int steps() const noexcept { return steps_; }
    double dt() const noexcept { return horizon_ / steps_; }
    double at(int i) const noexcept;
    std::size_t nodes() const noexcept { return static_cast<std::size_t>(steps_) + 1; }

    /// Grid with `factor` sub-steps per step; node i here is node factor*i there.
    TimeGrid refined(int factor) const;

    bool operator==(const TimeGrid&) const = default;

private:
    double horizon_;
    int steps_;
};

}  // namespace mexec
