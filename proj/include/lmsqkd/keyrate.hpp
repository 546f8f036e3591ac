#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "lmsqkd/quantum.hpp"

namespace lmsqkd {

/// Bell-diagonal coefficients of the QBER-Q attack family:
/// λ₁ = 1 + λ₄ − 2Q, λ₂ = λ₃ = Q − λ₄, with λ₄ ∈ [0, Q].
struct LambdaVector {
  double lambda1 = 1.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  double lambda4 = 0.0;
  double q = 0.0;
};

/// One point of the key-rate curve; `rate` is in bits per sifted bit and
/// may be negative, lambda4_star ∈ [0, q] is the minimizing coefficient.
struct KeyRatePoint {
  double q = 0.0;
  double rate = 0.0;
  double lambda4_star = 0.0;
};

/// Builds the λ parameterization for QBER q. Requires 0 ≤ λ₄ ≤ q ≤ 0.5;
/// components below zero by floating dust are clipped to 0.
LambdaVector lambda_from(double q, double lambda4);

/// TP probe density operator conditioned on Alice's bit a: the 4×4
/// two-block matrix with off-diagonals ±√(λ₁λ₂) and ±√(λ₃λ₄), plus signs
/// for a = 0 and minus for a = 1. Unit trace.
DensityMatrix sigma_tp(int a, const LambdaVector& lam);

/// Key-rate expression at a fixed λ vector:
/// (S(E|U) − S(E)) − (H(B|U) − H(B)) with S(E|U) = ½S(σ⁰) + ½S(σ¹),
/// S(E) = S(½σ⁰ + ½σ¹), H(B|U) = h(q), H(B) = 1.
double rate_from_lambda(const LambdaVector& lam);
double rate_given_lambda(double q, double lambda4);

/// Infimum of the rate over λ₄ ∈ [0, q]: coarse grid scan followed by
/// golden-section refinement of the bracketing interval.
KeyRatePoint minimize_rate(double q, std::size_t coarse_steps = 201,
                           double refine_tol = 1e-7);

/// Zero crossing of q ↦ minimize_rate(q).rate, bisected over [0, 0.25]
/// to within tol. Throws if the bracket shows no sign change.
double find_threshold(double tol);

/// Key-rate curve on the grid q_min, q_min+step, …, ≤ q_max. Points are
/// independent; `threads` > 1 computes them in parallel with order-stable
/// assembly.
std::vector<KeyRatePoint> export_curve(double q_min, double q_max, double step,
                                       unsigned threads = 1);

/// CSV with header "qber,rate,lambda4_star", 9 decimal digits, LF endings.
void write_curve_csv(std::ostream& out, const std::vector<KeyRatePoint>& curve);

}  // namespace lmsqkd
