#include "nvsim/state.hpp"

#include <cmath>
#include <string>

namespace nvsim {

DensityMatrix3::DensityMatrix3() : rho_(Matrix3c::Zero()) {
  rho_(index_of(Level::Zero), index_of(Level::Zero)) = 1.0;
}

DensityMatrix3::DensityMatrix3(const Matrix3c& rho) : rho_(rho) { check(); }

DensityMatrix3 DensityMatrix3::unchecked(const Matrix3c& rho) {
  return DensityMatrix3(rho, NoCheck{});
}

DensityMatrix3 DensityMatrix3::basis_state(Level level) {
  Matrix3c rho = Matrix3c::Zero();
  rho(index_of(level), index_of(level)) = 1.0;
  return DensityMatrix3(rho, NoCheck{});
}

DensityMatrix3 DensityMatrix3::pure(const Eigen::Vector3cd& psi) {
  const double norm = psi.norm();
  if (!(norm > 0.0))
    throw InvalidState("cannot build a pure state from a zero vector");
  const Eigen::Vector3cd v = psi / norm;
  return DensityMatrix3(v * v.adjoint(), NoCheck{});
}

std::array<double, 3> DensityMatrix3::populations() const {
  return {rho_(0, 0).real(), rho_(1, 1).real(), rho_(2, 2).real()};
}

double DensityMatrix3::trace_error() const {
  return std::abs(rho_.trace() - Complex{1.0, 0.0});
}

double DensityMatrix3::purity() const { return (rho_ * rho_).trace().real(); }

double DensityMatrix3::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix3::min_eigenvalue() const {
  // Symmetrise so the solver sees an exactly Hermitian input.
  const Matrix3c h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix3c> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix3::check() const {
  if (!rho_.allFinite())
    throw InvalidState("density matrix has non-finite entries");
  if (const double h = hermiticity_error(); h > kHermitianTol)
    throw InvalidState("density matrix is not Hermitian (error " + std::to_string(h) + ")");
  if (const double t = trace_error(); t > kTraceTol)
    throw InvalidState("density matrix trace differs from 1 by " + std::to_string(t));
  if (const double m = min_eigenvalue(); m < -kPositivityTol)
    throw InvalidState("density matrix has negative eigenvalue " + std::to_string(m));
}

} // namespace nvsim
