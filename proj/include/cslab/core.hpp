#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cslab {

using cx = std::complex<double>;

/// Error raised on malformed inputs, violated preconditions and
/// unsatisfiable requests.  Carries a human-readable message only.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Tolerance policy used throughout: an absolute floor that is widened
/// proportionally once the magnitudes in play exceed 1.
struct Tol {
    double abs = 1e-9;

    double at_scale(double scale) const {
        return abs * (scale > 1.0 ? scale : 1.0);
    }
};

inline constexpr double kTinyDenominator = 1e-300;

inline bool nearly_zero(cx z, double tol) { return std::abs(z) <= tol; }

inline double rel(double value, double scale) {
    return value / (scale > kTinyDenominator ? scale : 1.0);
}

}  // namespace cslab
