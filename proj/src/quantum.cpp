#include "lmsqkd/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lmsqkd {

namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
  std::size_t p = 1;
  for (std::size_t d : dims) p *= d;
  return p;
}

// Stride of `subsystem` and size of one full block containing it.
// Index layout: idx = (... (i0*d1 + i1)*d2 + i2 ...), subsystem 0 most
// significant.
std::pair<std::size_t, std::size_t> subsystem_strides(
    const std::vector<std::size_t>& dims, std::size_t subsystem) {
  if (subsystem >= dims.size()) {
    throw std::invalid_argument("subsystem index out of range");
  }
  std::size_t stride = 1;
  for (std::size_t k = subsystem + 1; k < dims.size(); ++k) stride *= dims[k];
  return {stride, stride * dims[subsystem]};
}

}  // namespace

PureState::PureState(std::vector<std::size_t> dims, std::vector<Complex> amps)
    : dims_(std::move(dims)), amps_(std::move(amps)) {
  if (dims_.empty()) throw std::invalid_argument("state needs >= 1 subsystem");
  for (std::size_t d : dims_) {
    if (d != 2 && d != 4) {
      throw std::invalid_argument("subsystem dimensions must be 2 or 4");
    }
  }
  if (amps_.size() != product(dims_)) {
    throw std::invalid_argument("amplitude count does not match dimensions");
  }
  for (const Complex& a : amps_) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw std::invalid_argument("non-finite amplitude");
    }
  }
  if (std::abs(norm_sq() - 1.0) > tol::norm) {
    throw std::invalid_argument("state is not normalized");
  }
}

PureState PureState::basis(std::vector<std::size_t> dims, std::size_t index) {
  std::vector<Complex> amps(product(dims), Complex(0.0, 0.0));
  amps.at(index) = Complex(1.0, 0.0);
  return PureState(std::move(dims), std::move(amps));
}

double PureState::norm_sq() const {
  double s = 0.0;
  for (const Complex& a : amps_) s += std::norm(a);
  return s;
}

UnitaryGate::UnitaryGate(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (dim_ == 0 || entries_.size() != dim_ * dim_) {
    throw std::invalid_argument("gate entry count does not match dimension");
  }
  // U·U† = I entrywise.
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      Complex s(0.0, 0.0);
      for (std::size_t k = 0; k < dim_; ++k) {
        s += entries_[i * dim_ + k] * std::conj(entries_[j * dim_ + k]);
      }
      Complex expect = (i == j) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
      if (std::abs(s - expect) > tol::unitary) {
        throw std::invalid_argument("matrix is not unitary");
      }
    }
  }
}

DensityMatrix::DensityMatrix(std::size_t dim, std::vector<Complex> entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (dim_ == 0 || entries_.size() != dim_ * dim_) {
    throw std::invalid_argument("density entry count does not match dimension");
  }
  double trace = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      const Complex& a = entries_[i * dim_ + j];
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw std::invalid_argument("non-finite density entry");
      }
      if (std::abs(a - std::conj(entries_[j * dim_ + i])) > tol::hermitian) {
        throw std::invalid_argument("density matrix is not Hermitian");
      }
    }
    trace += entries_[i * dim_ + i].real();
  }
  if (std::abs(trace - 1.0) > tol::trace) {
    throw std::invalid_argument("density matrix trace is not 1");
  }
  for (double ev : hermitian_eigenvalues(dim_, entries_)) {
    if (ev < -tol::eigen_dust) {
      throw std::invalid_argument("density matrix has a negative eigenvalue");
    }
  }
}

PureState bell_phi_plus() {
  const double r = 1.0 / std::sqrt(2.0);
  return PureState({2, 2}, {Complex(r, 0.0), Complex(0.0, 0.0),
                            Complex(0.0, 0.0), Complex(r, 0.0)});
}

UnitaryGate hadamard() {
  const double r = 1.0 / std::sqrt(2.0);
  return UnitaryGate(2, {Complex(r, 0.0), Complex(r, 0.0), Complex(r, 0.0),
                         Complex(-r, 0.0)});
}

UnitaryGate identity(std::size_t dim) {
  std::vector<Complex> entries(dim * dim, Complex(0.0, 0.0));
  for (std::size_t i = 0; i < dim; ++i) entries[i * dim + i] = Complex(1.0, 0.0);
  return UnitaryGate(dim, std::move(entries));
}

PureState apply_to_subsystem(const PureState& state, const UnitaryGate& gate,
                             std::size_t subsystem) {
  auto [stride, block] = subsystem_strides(state.dims(), subsystem);
  const std::size_t d = state.dims()[subsystem];
  if (gate.dim() != d) {
    throw std::invalid_argument("gate dimension does not match subsystem");
  }
  std::vector<Complex> out(state.size(), Complex(0.0, 0.0));
  const std::vector<Complex>& in = state.amps();
  for (std::size_t base = 0; base < in.size(); base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      for (std::size_t row = 0; row < d; ++row) {
        Complex acc(0.0, 0.0);
        for (std::size_t col = 0; col < d; ++col) {
          acc += gate.at(row, col) * in[base + col * stride + off];
        }
        out[base + row * stride + off] = acc;
      }
    }
  }
  return PureState(state.dims(), std::move(out));
}

double outcome_probability(const PureState& state, std::size_t subsystem,
                           std::size_t outcome) {
  auto [stride, block] = subsystem_strides(state.dims(), subsystem);
  const std::size_t d = state.dims()[subsystem];
  if (outcome >= d) throw std::invalid_argument("outcome out of range");
  double p = 0.0;
  const std::vector<Complex>& in = state.amps();
  for (std::size_t base = 0; base < in.size(); base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      p += std::norm(in[base + outcome * stride + off]);
    }
  }
  return p;
}

PureState collapse(const PureState& state, std::size_t subsystem,
                   std::size_t outcome) {
  const double p = outcome_probability(state, subsystem, outcome);
  if (p < 1e-12) {
    throw std::invalid_argument("collapse onto an (almost) zero-probability outcome");
  }
  auto [stride, block] = subsystem_strides(state.dims(), subsystem);
  const double scale = 1.0 / std::sqrt(p);
  std::vector<Complex> out(state.size(), Complex(0.0, 0.0));
  const std::vector<Complex>& in = state.amps();
  for (std::size_t base = 0; base < in.size(); base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      const std::size_t idx = base + outcome * stride + off;
      out[idx] = in[idx] * scale;
    }
  }
  return PureState(state.dims(), std::move(out));
}

std::pair<int, PureState> measure_z(const PureState& state,
                                    std::size_t subsystem, RngStream& rng) {
  const std::size_t d = state.dims().at(subsystem);
  double total = 0.0;
  std::vector<double> probs(d);
  for (std::size_t k = 0; k < d; ++k) {
    probs[k] = outcome_probability(state, subsystem, k);
    total += probs[k];
  }
  if (total < 1e-12) {
    throw std::invalid_argument("measurement of a degenerate (zero-norm) state");
  }
  const double u = rng.next_double() * total;
  double acc = 0.0;
  std::size_t outcome = d - 1;  // fall through to the last slot on fp dust
  for (std::size_t k = 0; k < d; ++k) {
    acc += probs[k];
    if (u < acc) {
      outcome = k;
      break;
    }
  }
  return {static_cast<int>(outcome), collapse(state, subsystem, outcome)};
}

std::vector<double> hermitian_eigenvalues(std::size_t dim,
                                          std::vector<Complex> a) {
  if (a.size() != dim * dim) {
    throw std::invalid_argument("matrix entry count does not match dimension");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      if (std::abs(a[i * dim + j] - std::conj(a[j * dim + i])) > tol::hermitian) {
        throw std::invalid_argument("matrix is not Hermitian");
      }
    }
  }
  auto at = [&](std::size_t i, std::size_t j) -> Complex& {
    return a[i * dim + j];
  };

  // Cyclic Jacobi. Each rotation zeroes one off-diagonal pair (p, q):
  // the complex phase of a_pq is absorbed into the rotation, then the
  // classic real 2x2 Givens formulas apply. Quadratic convergence; a few
  // sweeps suffice at dim <= 4.
  constexpr int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < dim; ++p) {
      for (std::size_t q = p + 1; q < dim; ++q) off += std::norm(at(p, q));
    }
    if (std::sqrt(off) < 1e-12) break;  // off-diagonal mass converged

    for (std::size_t p = 0; p < dim; ++p) {
      for (std::size_t q = p + 1; q < dim; ++q) {
        const Complex apq = at(p, q);
        const double beta = std::abs(apq);
        if (beta < 1e-300) continue;
        const Complex phase = apq / beta;  // e^{iφ}
        const double alpha = at(p, p).real();
        const double gamma = at(q, q).real();
        const double theta = (gamma - alpha) / (2.0 * beta);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) /
            (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        at(p, p) = Complex(alpha - t * beta, 0.0);
        at(q, q) = Complex(gamma + t * beta, 0.0);
        at(p, q) = Complex(0.0, 0.0);
        at(q, p) = Complex(0.0, 0.0);
        for (std::size_t r = 0; r < dim; ++r) {
          if (r == p || r == q) continue;
          const Complex arp = at(r, p);
          const Complex arq = at(r, q);
          at(r, p) = c * arp - s * std::conj(phase) * arq;
          at(r, q) = s * arp + c * std::conj(phase) * arq;
          at(p, r) = std::conj(at(r, p));
          at(q, r) = std::conj(at(r, q));
        }
      }
    }
  }

  std::vector<double> eigenvalues(dim);
  for (std::size_t i = 0; i < dim; ++i) eigenvalues[i] = at(i, i).real();
  std::sort(eigenvalues.begin(), eigenvalues.end(), std::greater<double>());
  return eigenvalues;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  double entropy = 0.0;
  for (double ev : hermitian_eigenvalues(rho.dim(), rho.entries())) {
    const double lambda = std::clamp(ev, 0.0, 1.0);
    if (lambda > 0.0) entropy -= lambda * std::log2(lambda);
  }
  return entropy;
}

double binary_entropy(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw std::invalid_argument("binary_entropy: probability out of [0, 1]");
  }
  double h = 0.0;
  if (q > 0.0) h -= q * std::log2(q);
  if (q < 1.0) h -= (1.0 - q) * std::log2(1.0 - q);
  return h;
}

double shannon_entropy(const std::vector<double>& p) {
  double sum = 0.0;
  double h = 0.0;
  for (double x : p) {
    if (!(x >= -1e-12 && x <= 1.0 + 1e-12)) {
      throw std::invalid_argument("shannon_entropy: probability out of [0, 1]");
    }
    const double v = std::clamp(x, 0.0, 1.0);
    sum += v;
    if (v > 0.0) h -= v * std::log2(v);
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw std::invalid_argument("shannon_entropy: probabilities do not sum to 1");
  }
  return h;
}

}  // namespace lmsqkd
