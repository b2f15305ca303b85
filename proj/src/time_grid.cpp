#include "mexec/time_grid.hpp"

#include "mexec/error.hpp"

namespace mexec {

TimeGrid::TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
    require(horizon > 0.0, ErrorKind::Configuration, "horizon must be positive");
    require(steps >= 1, ErrorKind::Configuration, "grid needs at least one step");
}

double TimeGrid::at(int i) const noexcept { return i == steps_ ? horizon_ : horizon_ * i / steps_; }

TimeGrid TimeGrid::refined(int factor) const {
    require(factor >= 1, ErrorKind::Configuration, "refinement factor must be positive");
    return TimeGrid(horizon_, steps_ * factor);
}

}  // namespace mexec
