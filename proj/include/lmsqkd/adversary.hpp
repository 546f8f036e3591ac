#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>

#include "lmsqkd/quantum.hpp"
#include "lmsqkd/rng.hpp"

namespace lmsqkd {

enum class AttackKind { Honest, FakePhotonZ, FakePhotonX, Collective, Noise };

/// Sifted-round measurement mode: both participants applied I, or both H.
enum class MeasurementMode { II, HH };

/// Parameters of the entangling attack U(|Φ⁺⟩⊗|E⟩) = Σᵢ aᵢ|bᵢ⟩|eᵢ⟩ with
/// qubit basis order (00, 01, 10, 11) and a 4-level probe.
/// Σ|aᵢ|² = 1 and every |eᵢ⟩ unit norm; mutual orthogonality of the |eᵢ⟩
/// is not required.
struct CollectiveParams {
  std::array<Complex, 4> a;
  std::array<std::array<Complex, 4>, 4> e;
};

/// Checks the CollectiveParams invariants (1e-12) and rescales amplitudes
/// and probe vectors to exactly unit norm.
CollectiveParams validated(const CollectiveParams& params);

struct AttackStrategy;

/// Throws if parameters required by the strategy kind are missing, spurious
/// or invalid.
void validate(const AttackStrategy& strategy);

struct AttackStrategy {
  AttackKind kind = AttackKind::Honest;
  std::optional<CollectiveParams> collective_params;
  std::optional<double> noise_flip_prob;

  static AttackStrategy honest() { return {}; }
  static AttackStrategy fake_photon_z() { return {AttackKind::FakePhotonZ, {}, {}}; }
  static AttackStrategy fake_photon_x() { return {AttackKind::FakePhotonX, {}, {}}; }
  static AttackStrategy collective(const CollectiveParams& params) {
    return {AttackKind::Collective, validated(params), {}};
  }
  static AttackStrategy noise(double flip_prob) {
    AttackStrategy s{AttackKind::Noise, {}, flip_prob};
    validate(s);
    return s;
  }

  /// True for strategies that record per-round TP key guesses.
  bool provides_guesses() const {
    return kind == AttackKind::FakePhotonZ || kind == AttackKind::FakePhotonX ||
           kind == AttackKind::Collective;
  }
};

/// What the TP knows about the round beyond the probe subsystem.
struct TpSideInfo {
  // FakePhotonZ: the Z bit both photons carry; FakePhotonX: 0 for |++⟩,
  // 1 for |−−⟩.
  std::optional<int> fake_pair_bit;
};

/// Emits the joint (qubit_A ⊗ qubit_B ⊗ probe) state for one round,
/// dims 2⊗2⊗4. Honest and Noise emit |Φ⁺⟩⊗|E₀⟩ (Noise flips are classical,
/// applied by the round executor); FakePhotonZ/X draw the pair from `rng`.
PureState emit_joint_state(const AttackStrategy& strategy, RngStream& rng,
                           TpSideInfo* side_info = nullptr);

/// Analytic sifted-round error probability of the collective attack:
/// II → |a₁|² + |a₂|²; HH → quarter of the two odd-branch norms, both
/// normalized by the total outcome probability.
double collective_qber(const CollectiveParams& params, MeasurementMode mode);

/// Probe ensemble conditioned on Alice's sifted key bit: probabilities
/// p₀, p₁ and the normalized probe density matrices. `mode` empty averages
/// the II and HH modes with weight 1/2 each.
struct ConditionedProbe {
  std::array<double, 2> p;
  std::array<std::optional<DensityMatrix>, 2> rho;  // empty when p == 0
};
ConditionedProbe conditioned_probe_states(const CollectiveParams& params,
                                          std::optional<MeasurementMode> mode);

/// Holevo quantity χ = S(Σ pₖρₖ) − Σ pₖ S(ρₖ) of the conditioned probe
/// ensemble, in bits.
double holevo_information(const CollectiveParams& params,
                          std::optional<MeasurementMode> mode = std::nullopt);

struct LeakageReport {
  double qber_ii = 0.0;
  double qber_hh = 0.0;
  double holevo_bits = 0.0;              // averaged over II and HH modes
  double empirical_guess_accuracy = 0.0; // TP projective measurement
};

/// Quantifies what the collective attack leaks: analytic per-mode QBER,
/// the Holevo bound, and an empirical guess accuracy from simulating the
/// TP's projective measurement in a Gram–Schmidt orthonormalization of
/// the probe states {|eᵢ⟩}.
LeakageReport leakage_report(const CollectiveParams& params,
                             std::size_t n_samples, RngStream& rng);

/// Detection probability 1 − (1/4)^m of the fake-photon attack when m
/// measurement results are compared in public discussion.
double fake_photon_detection_prob(std::size_t m);

/// Monte-Carlo check of fake_photon_detection_prob. One trial simulates m
/// revealing-basis check rounds (both-H for Z-basis pairs, both-I for
/// X-basis pairs); the attack is detected if any round's outcome pair
/// deviates from the pair the TP prepared. Returns the detected fraction.
double simulate_fake_photon_detection(AttackKind kind, std::size_t m,
                                      std::size_t trials, std::uint64_t seed);

/// TP measurement basis derived from the probe states {|eᵢ⟩}: Gram–Schmidt
/// in index order, completed with computational directions when the |eᵢ⟩
/// are dependent. `rotation` maps basis vector j onto |j⟩; `source[j]` is
/// the index of the probe state that spawned direction j (−1 for fill-ins).
struct ProbeBasis {
  UnitaryGate rotation;
  std::array<int, 4> source;
};
ProbeBasis probe_measurement_basis(const CollectiveParams& params);

}  // namespace lmsqkd
