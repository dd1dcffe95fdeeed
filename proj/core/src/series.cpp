#include "sojourn/series.hpp"

namespace sojourn {

void SeriesControl::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw std::invalid_argument("SeriesControl: tolerances must be positive");
    }
    if (max_terms < 8) {
        throw std::invalid_argument("SeriesControl: max_terms must be at least 8");
    }
}

}  // namespace sojourn
