#include "amc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace amc {

namespace {

// QUADPACK qk21 abscissae and weights.
constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208931645062, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes.
constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a;
    double b;
    double value;
    double error;

    bool operator<(const Segment& other) const { return error < other.error; }
};

double checked_eval(const RealFunction& f, double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
        std::ostringstream msg;
        msg << "integrand is not finite at x = " << x;
        throw QuadratureError(msg.str());
    }
    return y;
}

Segment gauss_kronrod21(const RealFunction& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double abs_half = std::abs(half);

    const double f_center = checked_eval(f, center);
    double kronrod = f_center * kKronrodWeights[10];
    double abs_sum = std::abs(kronrod);
    double gauss = 0.0;

    std::array<double, 10> f_left{};
    std::array<double, 10> f_right{};
    for (std::size_t j = 0; j < 10; ++j) {
        const double dx = half * kKronrodNodes[j];
        f_left[j] = checked_eval(f, center - dx);
        f_right[j] = checked_eval(f, center + dx);
        const double pair = f_left[j] + f_right[j];
        kronrod += kKronrodWeights[j] * pair;
        abs_sum += kKronrodWeights[j] * (std::abs(f_left[j]) + std::abs(f_right[j]));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
    }

    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[10] * std::abs(f_center - mean);
    for (std::size_t j = 0; j < 10; ++j) {
        asc += kKronrodWeights[j] * (std::abs(f_left[j] - mean) + std::abs(f_right[j] - mean));
    }

    const double result = kronrod * half;
    double err = std::abs((kronrod - gauss) * half);
    const double resasc = asc * abs_half;
    const double resabs = abs_sum * abs_half;
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
        err = std::max(err, 50.0 * eps * resabs);
    }
    return {a, b, result, err};
}

} // namespace

void QuadratureSettings::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
        throw std::invalid_argument("quadrature tolerances must be positive");
    }
    if (max_subdivisions < 1) {
        throw std::invalid_argument("max_subdivisions must be at least 1");
    }
    if (!(horizon_growth > 1.0)) {
        throw std::invalid_argument("horizon_growth must exceed 1");
    }
}

QuadResult adaptive_quad(const RealFunction& f, double a, double b,
                         const QuadratureSettings& settings) {
    settings.validate();
    if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
        throw std::invalid_argument("adaptive_quad requires finite a <= b");
    }
    if (a == b) return {};

    std::priority_queue<Segment> heap;
    Segment first = gauss_kronrod21(f, a, b);
    double total = first.value;
    double total_err = first.error;
    std::size_t evaluations = 21;
    heap.push(first);

    auto target = [&] { return std::max(settings.abs_tol, settings.rel_tol * std::abs(total)); };

    while (total_err > target()) {
        if (heap.size() >= settings.max_subdivisions) {
            std::ostringstream msg;
            msg << "adaptive_quad did not converge on [" << a << ", " << b << "] after "
                << heap.size() << " subdivisions (error estimate " << total_err << ")";
            throw QuadratureError(msg.str());
        }
        const Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a) || !(mid < worst.b)) {
            std::ostringstream msg;
            msg << "adaptive_quad cannot subdivide near x = " << worst.a
                << " (error estimate " << total_err << ")";
            throw QuadratureError(msg.str());
        }
        const Segment left = gauss_kronrod21(f, worst.a, mid);
        const Segment right = gauss_kronrod21(f, mid, worst.b);
        evaluations += 42;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum from the segments to shed drift accumulated by the running
    // updates.
    double value = 0.0;
    double err = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().error;
        heap.pop();
    }
    return {value, err, evaluations};
}

ImproperResult improper_quad(const RealFunction& f, double a, const QuadratureSettings& settings,
                             const HorizonOptions& horizon) {
    settings.validate();
    if (!std::isfinite(a)) throw std::invalid_argument("improper_quad requires a finite start");
    if (!(horizon.initial_width > 0.0)) {
        throw std::invalid_argument("improper_quad initial_width must be positive");
    }
    const double stop_tol = horizon.increment_tol > 0.0 ? horizon.increment_tol : settings.abs_tol;

    ImproperResult out;
    double lo = a;
    double width = horizon.initial_width;
    double hi = a + width;
    double previous = std::numeric_limits<double>::infinity();

    out.value = adaptive_quad(f, lo, hi, settings).value;
    out.last_increment = out.value;
    for (std::size_t n = 0; n < horizon.max_extensions; ++n) {
        lo = hi;
        width *= settings.horizon_growth;
        hi = a + width;
        const double increment = adaptive_quad(f, lo, hi, settings).value;
        out.value += increment;
        out.extensions = n + 1;
        out.horizon = hi;
        previous = out.last_increment;
        out.last_increment = increment;

        const double inc = std::abs(increment);
        if (inc < stop_tol && inc < std::abs(previous)) {
            const double ratio = inc / std::abs(previous);
            out.tail_estimate = ratio < 1.0 ? increment * ratio / (1.0 - ratio) : increment;
            return out;
        }
    }
    std::ostringstream msg;
    msg << "improper_quad: tail not below " << stop_tol << " after " << horizon.max_extensions
        << " horizon extensions (last increment " << out.last_increment << ")";
    throw QuadratureError(msg.str());
}

ErfPair erf_pair(double x) {
    return {std::erf(x), std::erfc(x)};
}

MaximizeResult maximize_unimodal(const RealFunction& g, double lo, double hi, double tol) {
    if (!(lo < hi)) throw std::invalid_argument("maximize_unimodal requires lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("maximize_unimodal requires tol > 0");

    constexpr std::size_t kScan = 33;
    std::array<double, kScan> xs{};
    std::array<double, kScan> ys{};
    const double step = (hi - lo) / static_cast<double>(kScan - 1);
    for (std::size_t i = 0; i < kScan; ++i) {
        xs[i] = i + 1 == kScan ? hi : lo + step * static_cast<double>(i);
        ys[i] = g(xs[i]);
        if (std::isnan(ys[i])) throw OptimizerError("objective returned NaN during pre-scan");
    }

    const auto [ymin_it, ymax_it] = std::minmax_element(ys.begin(), ys.end());
    const double spread = *ymax_it - *ymin_it;
    const double slack = 1e-9 * spread + 64.0 * std::numeric_limits<double>::epsilon() *
                                             std::max(std::abs(*ymax_it), std::abs(*ymin_it));

    // A point lying clearly below the best values on both of its sides is a
    // valley between two separated maxima.
    std::array<double, kScan> left_max{};
    std::array<double, kScan> right_max{};
    left_max[0] = ys[0];
    for (std::size_t i = 1; i < kScan; ++i) left_max[i] = std::max(left_max[i - 1], ys[i]);
    right_max[kScan - 1] = ys[kScan - 1];
    for (std::size_t i = kScan - 1; i-- > 0;) right_max[i] = std::max(right_max[i + 1], ys[i]);
    for (std::size_t i = 1; i + 1 < kScan; ++i) {
        if (ys[i] < std::min(left_max[i - 1], right_max[i + 1]) - slack) {
            std::ostringstream msg;
            msg << "objective is not unimodal on [" << lo << ", " << hi
                << "]: valley near x = " << xs[i];
            throw OptimizerError(msg.str());
        }
    }

    const auto best = static_cast<std::size_t>(ymax_it - ys.begin());
    double a = xs[best == 0 ? 0 : best - 1];
    double b = xs[best + 1 == kScan ? kScan - 1 : best + 1];

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double gc = g(c);
    double gd = g(d);
    while (b - a > tol) {
        if (gc >= gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }

    MaximizeResult out{0.5 * (a + b), 0.0};
    out.max = g(out.argmax);
    // The bracket endpoints may beat the interior when the optimum sits on
    // the boundary of [lo, hi].
    for (const double x : {a, b, xs[best]}) {
        const double y = g(x);
        if (y > out.max) out = {x, y};
    }
    return out;
}

} // namespace amc
