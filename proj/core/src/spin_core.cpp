#include "nvsim/spin_core.hpp"

#include <cmath>
#include <string>

namespace nvsim {

void ZfsParams::validate() const {
  if (!std::isfinite(d_hz) || !std::isfinite(e_hz))
    throw InvalidParameter("zero-field parameters must be finite");
  if (e_hz < 0.0)
    throw InvalidParameter("E must be non-negative, got " + std::to_string(e_hz));
  if (d_hz < 0.0)
    throw InvalidParameter("D must be non-negative, got " + std::to_string(d_hz));
  if (d_hz == 0.0 && e_hz == 0.0)
    return;
  if (e_hz >= d_hz)
    throw InvalidParameter("E must be smaller than D (E=" + std::to_string(e_hz) +
                           ", D=" + std::to_string(d_hz) + ")");
}

SpinOperators spin1_operators() {
  const double r = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};
  SpinOperators s;
  s.sx << 0, r, 0,
          r, 0, r,
          0, r, 0;
  s.sy << 0, -i * r, 0,
          i * r, 0, -i * r,
          0, i * r, 0;
  s.sz = Matrix3c::Zero();
  s.sz(0, 0) = 1.0;
  s.sz(2, 2) = -1.0;
  return s;
}

Matrix3c zero_field_hamiltonian(const ZfsParams& p) {
  p.validate();
  const SpinOperators s = spin1_operators();
  const Matrix3c id = Matrix3c::Identity();
  return p.d_hz * (s.sz * s.sz - (2.0 / 3.0) * id) +
         p.e_hz * (s.sx * s.sx - s.sy * s.sy);
}

LevelStructure level_structure(const ZfsParams& p) {
  p.validate();
  LevelStructure ls;
  ls.e_zero = -2.0 * p.d_hz / 3.0;
  ls.e_minus = p.d_hz / 3.0 - p.e_hz;
  ls.e_plus = p.d_hz / 3.0 + p.e_hz;
  ls.f_low = p.d_hz - p.e_hz;
  ls.f_high = p.d_hz + p.e_hz;
  return ls;
}

std::pair<double, double> transition_frequencies(const ZfsParams& p) {
  p.validate();
  return {p.d_hz - p.e_hz, p.d_hz + p.e_hz};
}

Matrix3c strain_eigenbasis() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix3c u;
  u << r, 0, r,
       0, 1, 0,
       r, 0, -r;
  return u;
}

} // namespace nvsim
