#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dtnlab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Complex = std::complex<double>;
using VecXc = Eigen::VectorXcd;
using MatXc = Eigen::MatrixXcd;

/// Raised when an input violates an operation's contract (bad mesh, bad
/// catalog parameters, precondition failures).
class ContractError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an elliptic operator is singular on the interior DOFs.
class SingularOperatorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an iterative method fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A catalog key with named numeric parameters, written as
/// `key` or `key:name=value,name=value`.
struct CatalogSpec {
  std::string key;
  std::map<std::string, double> params;

  static CatalogSpec parse(std::string_view text);
  std::string to_string() const;

  double get(const std::string& name, double fallback) const;
  bool has(const std::string& name) const { return params.count(name) != 0; }
  /// Throws ContractError if any parameter outside `allowed` is present.
  void require_only(std::initializer_list<std::string_view> allowed) const;
};

/// Portable deterministic uniform doubles in [0, 1) from a 64-bit seed
/// (splitmix64), independent of the standard library's distributions.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next_u64();
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace dtnlab
