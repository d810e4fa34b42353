#pragma once

#include <complex>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace nvsim {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Matrix2c = Eigen::Matrix2cd;

// Every 3x3 operator in this library uses the ordered basis
// (|+1>, |0>, |-1>). After diagonalising the zero-field Hamiltonian the
// same slots hold (upper strain state, |0>, lower strain state).
enum class Level : int { Plus = 0, Zero = 1, Minus = 2 };

constexpr int index_of(Level level) { return static_cast<int>(level); }

class InvalidParameter : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Zero-field splitting constants, both in Hz.
struct ZfsParams {
  double d_hz = 0.0;
  double e_hz = 0.0;

  /// Throws InvalidParameter unless 0 <= E < D (E = D = 0 is allowed as the
  /// interaction-free limit).
  void validate() const;
};

struct SpinOperators {
  Matrix3c sx;
  Matrix3c sy;
  Matrix3c sz;
};

/// Energies (Hz) of the three zero-field eigenstates and the two allowed
/// transition frequencies out of |0>.
struct LevelStructure {
  double e_zero = 0.0;
  double e_minus = 0.0; // lower strain eigenstate, the qubit partner of |0>
  double e_plus = 0.0;  // upper strain eigenstate, the auxiliary level
  double f_low = 0.0;   // |0> <-> lower
  double f_high = 0.0;  // |0> <-> upper

  double transition(Level target) const {
    return target == Level::Minus ? f_low : f_high;
  }
};

/// Canonical S=1 matrices with <m+1|S+|m> = sqrt(2 - m(m+1)).
SpinOperators spin1_operators();

/// H_D = D [Sz^2 - S(S+1)/3] + E (Sx^2 - Sy^2), in Hz.
Matrix3c zero_field_hamiltonian(const ZfsParams& p);

/// Analytic eigenstructure of zero_field_hamiltonian.
LevelStructure level_structure(const ZfsParams& p);

/// Returns (D - E, D + E).
std::pair<double, double> transition_frequencies(const ZfsParams& p);

/// Unitary whose columns are the zero-field eigenvectors in slot order
/// (upper, |0>, lower): (|+1> + |-1>)/sqrt2, |0>, (|+1> - |-1>)/sqrt2.
/// Conjugating by it takes Sz-basis operators into the strain eigenbasis.
Matrix3c strain_eigenbasis();

} // namespace nvsim
