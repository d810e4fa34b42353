#pragma once

#include <array>
#include <stdexcept>

#include "nvsim/spin_core.hpp"

namespace nvsim {

class InvalidState : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Three-level density matrix over (|+1>, |0>, |-1>).
///
/// Construction checks hermiticity (1e-10), unit trace (1e-10) and
/// positivity (smallest eigenvalue >= -1e-9). Use `unchecked` only for
/// intermediate results whose validity is established by construction.
class DensityMatrix3 {
public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kPositivityTol = 1e-9;

  DensityMatrix3();
  explicit DensityMatrix3(const Matrix3c& rho);

  static DensityMatrix3 unchecked(const Matrix3c& rho);
  static DensityMatrix3 basis_state(Level level);
  /// |psi><psi| for a (normalised internally) state vector.
  static DensityMatrix3 pure(const Eigen::Vector3cd& psi);

  const Matrix3c& matrix() const { return rho_; }

  double population(Level level) const {
    return rho_(index_of(level), index_of(level)).real();
  }
  std::array<double, 3> populations() const;
  Complex coherence(Level row, Level col) const {
    return rho_(index_of(row), index_of(col));
  }

  double trace_error() const;
  double purity() const;
  double min_eigenvalue() const;
  double hermiticity_error() const;

  /// Throws InvalidState if any invariant is violated.
  void check() const;

private:
  struct NoCheck {};
  DensityMatrix3(const Matrix3c& rho, NoCheck) : rho_(rho) {}

  Matrix3c rho_;
};

} // namespace nvsim
