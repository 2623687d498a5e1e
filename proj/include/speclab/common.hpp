#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace speclab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

// Bad input: malformed config, violated precondition.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation that started from valid input could not finish
// (non-SPD mass matrix, cluster merge, dual-path disagreement, ...).
struct ComputeError : std::runtime_error {
    explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Refused up front because the requested problem exceeds a size budget.
struct ResourceLimitError : ComputeError {
    explicit ResourceLimitError(const std::string& msg) : ComputeError(msg) {}
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline long long binomial(long long n, long long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    long long r = 1;
    for (long long i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace speclab
