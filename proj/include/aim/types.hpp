#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace aim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Global numeric policy.  All tolerances are relative unless noted.
inline constexpr double kDefaultRankTol = 1e-9;   // singular values vs sigma_max
inline constexpr double kConditionLimit = 1e12;   // beyond this a matrix counts as singular
inline constexpr double kCollisionTol = 1e-6;     // eigenvalue separation vs max |Q|
inline constexpr double kSingularTauTol = 1e-8;   // |tau| below this is treated as a zero
inline constexpr int kDefaultMaxTimeIndex = 16;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Eigendecomposition rejected: spectrum too close to defective.
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

/// tau vanishes (or nearly so) where a formula needs to divide by it.
class SingularTau : public Error {
 public:
  using Error::Error;
};

class ExpmOverflow : public Error {
 public:
  using Error::Error;
};

/// Condition-number guard tripped (gl_action, inverse_symmetry, ...).
class ConditioningError : public Error {
 public:
  using Error::Error;
};

/// Eigenvalue trajectories got too close to continue safely.
class CollisionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

inline bool all_finite(const CMatrix& a) { return a.allFinite(); }
inline bool all_finite(const CVector& v) { return v.allFinite(); }

inline void require_square(const CMatrix& a, const char* who) {
  if (a.rows() != a.cols() || a.rows() < 1)
    throw DimensionMismatch(std::string(who) + ": matrix must be square and non-empty");
}

inline void require_same_dim(const CMatrix& a, const CMatrix& b, const char* who) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionMismatch(std::string(who) + ": dimension mismatch");
}

}  // namespace aim
