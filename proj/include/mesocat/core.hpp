#pragma once

// Shared vocabulary: scalar/matrix aliases, the error hierarchy, and a small
// deterministic parallel-for used by grid sweeps and multistart searches.

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <complex>
#include <cstddef>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mesocat {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

#ifdef MESOCAT_VERSION
inline constexpr const char* version = MESOCAT_VERSION;
#else
inline constexpr const char* version = "0.0.0";
#endif

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Fock truncation too small for the amplitudes involved.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// ODE or quadrature failed its convergence check.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Projection with zero (or numerically zero) weight.
class DegenerateOutcomeError : public Error {
public:
    using Error::Error;
};

/// Phase-space bounds do not cover the support of the function.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown (loss of positivity, non-finite values).
class NumericalError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

/// Round-trip decimal form (17 significant digits).
inline std::string format_double(double x) {
    std::ostringstream os;
    os << std::setprecision(17) << x;
    return os.str();
}

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
    static std::atomic<unsigned> n{1};
    return n;
}
}  // namespace detail

inline void set_thread_count(unsigned n) { detail::thread_setting() = std::max(1u, n); }
inline unsigned thread_count() { return detail::thread_setting(); }

/// Runs fn(i) for i in [0, n). Work is split into contiguous blocks, so
/// callers that write results by index get output independent of the
/// thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t block = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * block;
        const std::size_t hi = std::min(n, lo + block);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
}

}  // namespace mesocat
