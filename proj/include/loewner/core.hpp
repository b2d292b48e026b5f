#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace loewner {

using cplx = std::complex<double>;

inline constexpr cplx I{0.0, 1.0};

/// A geometric configuration the conformal maps cannot handle: slits that
/// touch, cross, or come closer than the working tolerance.
class GeometricConflict : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A monotone scalar solve whose bracket does not contain a root.
class BracketFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative procedure that ran into its iteration cap or stalled.
class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Requested something only defined for multiply connected canonical domains.
class UnsupportedConnectivity : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Projects a point that is meant to lie on the unit circle back onto it.
inline cplx unit(cplx z) {
    const double r = std::abs(z);
    return r > 0.0 ? z / r : cplx{1.0, 0.0};
}

}  // namespace loewner
