#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "lmsqkd/rng.hpp"

namespace lmsqkd {

using Complex = std::complex<double>;

namespace tol {
inline constexpr double norm = 1e-12;       // |Σ|amp|² − 1|
inline constexpr double unitary = 1e-12;    // entrywise U·U† − I
inline constexpr double hermitian = 1e-12;  // entrywise A − A†
inline constexpr double trace = 1e-10;      // |tr ρ − 1|
inline constexpr double eigen_dust = 1e-10; // tolerated negative eigenvalue
}  // namespace tol

/// Pure state of an ordered list of small subsystems (dimension 2 or 4,
/// ≤ 16 amplitudes total). Subsystem 0 is the leftmost ket factor, i.e.
/// the most significant digit of the basis index. Immutable value type;
/// all operations return fresh states.
class PureState {
 public:
  /// Validates amplitude count, finiteness and unit norm (tol::norm).
  PureState(std::vector<std::size_t> dims, std::vector<Complex> amps);

  /// Basis state |index⟩ over the given subsystem layout.
  static PureState basis(std::vector<std::size_t> dims, std::size_t index);

  const std::vector<std::size_t>& dims() const { return dims_; }
  const std::vector<Complex>& amps() const { return amps_; }
  std::size_t size() const { return amps_.size(); }

  double norm_sq() const;

 private:
  std::vector<std::size_t> dims_;
  std::vector<Complex> amps_;
};

/// Square unitary; entries row-major. Construction enforces U·U† = I
/// within tol::unitary.
class UnitaryGate {
 public:
  UnitaryGate(std::size_t dim, std::vector<Complex> entries);

  std::size_t dim() const { return dim_; }
  const Complex& at(std::size_t row, std::size_t col) const {
    return entries_[row * dim_ + col];
  }

 private:
  std::size_t dim_;
  std::vector<Complex> entries_;
};

/// Hermitian, unit-trace, positive-semidefinite matrix (all three checked
/// at construction: tol::hermitian / tol::trace / tol::eigen_dust).
class DensityMatrix {
 public:
  DensityMatrix(std::size_t dim, std::vector<Complex> entries);

  std::size_t dim() const { return dim_; }
  const Complex& at(std::size_t row, std::size_t col) const {
    return entries_[row * dim_ + col];
  }
  const std::vector<Complex>& entries() const { return entries_; }

 private:
  std::size_t dim_;
  std::vector<Complex> entries_;
};

/// The Bell state (|00⟩ + |11⟩)/√2 over two qubits.
PureState bell_phi_plus();

UnitaryGate hadamard();
UnitaryGate identity(std::size_t dim);

/// Applies `gate` to one subsystem (I ⊗ … ⊗ U ⊗ … ⊗ I). Gate dimension
/// must match the subsystem dimension.
PureState apply_to_subsystem(const PureState& state, const UnitaryGate& gate,
                             std::size_t subsystem);

/// Probability that a computational-basis measurement of `subsystem`
/// yields `outcome` (sum of |amp|² over that slice).
double outcome_probability(const PureState& state, std::size_t subsystem,
                           std::size_t outcome);

/// Projects `subsystem` onto `outcome` and renormalizes. Throws if the
/// outcome probability is below 1e-12 (degenerate collapse).
PureState collapse(const PureState& state, std::size_t subsystem,
                   std::size_t outcome);

/// Samples a computational-basis measurement of `subsystem` from `rng`,
/// returning the outcome and the collapsed state.
std::pair<int, PureState> measure_z(const PureState& state,
                                    std::size_t subsystem, RngStream& rng);

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, sorted
/// descending. `entries` is row-major dim×dim and is consumed as scratch.
std::vector<double> hermitian_eigenvalues(std::size_t dim,
                                          std::vector<Complex> entries);

/// Von Neumann entropy in bits: −Σ λᵢ log₂ λᵢ over the spectrum, with
/// 0·log 0 = 0. Eigenvalues are clipped to [0, 1] before the logs.
double von_neumann_entropy(const DensityMatrix& rho);

/// Binary entropy h(q) in bits. q must lie in [0, 1].
double binary_entropy(double q);

/// Shannon entropy in bits of a probability vector (must sum to 1 within
/// 1e-10, entries in [0, 1]).
double shannon_entropy(const std::vector<double>& p);

}  // namespace lmsqkd
