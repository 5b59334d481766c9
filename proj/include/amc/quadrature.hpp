#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace amc {

using RealFunction = std::function<double(double)>;

/// Thrown when an integral cannot be brought under tolerance within the
/// subdivision or horizon budget. Never carries a partial value.
class QuadratureError : public std::runtime_error {
  public:
    explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

class OptimizerError : public std::runtime_error {
  public:
    explicit OptimizerError(const std::string& what) : std::runtime_error(what) {}
};

struct QuadratureSettings {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    std::size_t max_subdivisions = 2000;
    double horizon_growth = 2.0;

    void validate() const;
};

struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
};

/// Globally adaptive 21-point Gauss-Kronrod integration over [a, b].
/// Stops when the summed error estimate is below max(abs_tol, rel_tol*|value|).
QuadResult adaptive_quad(const RealFunction& f, double a, double b,
                         const QuadratureSettings& settings = {});

struct HorizonOptions {
    double initial_width = 1.0;
    // Stop once a horizon extension adds less than this. Zero means use
    // settings.abs_tol.
    double increment_tol = 0.0;
    std::size_t max_extensions = 256;
};

struct ImproperResult {
    double value = 0.0;         // integral over [a, horizon]
    double tail_estimate = 0.0; // extrapolated mass beyond horizon
    double horizon = 0.0;
    double last_increment = 0.0;
    std::size_t extensions = 0;

    double total() const { return value + tail_estimate; }
};

/// Integral over [a, inf) for a non-negative, eventually decaying f.
/// The horizon grows geometrically by settings.horizon_growth; each new
/// segment is integrated with adaptive_quad. The tail estimate is the
/// geometric extrapolation of the last two increments.
ImproperResult improper_quad(const RealFunction& f, double a,
                             const QuadratureSettings& settings = {},
                             const HorizonOptions& horizon = {});

struct ErfPair {
    double erf;
    double erfc;
};

ErfPair erf_pair(double x);

struct MaximizeResult {
    double argmax;
    double max;
};

/// Maximizes a unimodal g on [lo, hi]: a 33-point pre-scan locates the best
/// cell, golden-section search refines within its two neighbours. Throws
/// OptimizerError when the scan shows separated maxima.
MaximizeResult maximize_unimodal(const RealFunction& g, double lo, double hi, double tol);

} // namespace amc
