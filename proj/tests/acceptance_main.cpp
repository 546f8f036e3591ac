// Acceptance suite: runs each advertised guarantee end to end and prints
// one pass/fail line per criterion. Expects the CLI binary path as argv[1]
// (used by the efficiency and determinism criteria).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "lmsqkd/keyrate.hpp"
#include "lmsqkd/protocol.hpp"
#include "lmsqkd/serialization.hpp"
#include "test_helpers.hpp"

using namespace lmsqkd;
using namespace lmsqkd::testing;

namespace {

std::string g_cli_path;

struct CriterionResult {
  bool ok = true;
  std::string detail;
};

bool check(CriterionResult& r, bool condition, const std::string& on_fail) {
  if (!condition) {
    r.ok = false;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += on_fail;
  }
  return condition;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args, const std::string& stdout_path) {
  const std::string cmd =
      "\"" + g_cli_path + "\" " + args + " > " + stdout_path + " 2>/dev/null";
  return std::system(cmd.c_str());
}

// 1. Honest noiseless sessions over 10^5 rounds: zero sifted mismatches,
//    mixed-operator agreement 0.5 ± 0.005.
CriterionResult criterion_table4() {
  CriterionResult r;
  SessionConfig config;
  config.n_rounds = 100000;
  config.master_seed = 1001;
  const SessionTranscript t = run_session(config, AttackStrategy::honest());

  std::size_t sifted_mismatches = 0;
  for (std::size_t idx : t.sifted_indices) {
    if (t.rounds[idx].alice_bit != t.rounds[idx].bob_bit) ++sifted_mismatches;
  }
  std::size_t mixed = 0;
  std::size_t mixed_agree = 0;
  for (const RoundRecord& round : t.rounds) {
    if (round.alice_op == round.bob_op) continue;
    ++mixed;
    if (round.alice_bit == round.bob_bit) ++mixed_agree;
  }
  const double agree_freq =
      static_cast<double>(mixed_agree) / static_cast<double>(mixed);

  check(r, sifted_mismatches == 0,
        "sifted mismatches = " + std::to_string(sifted_mismatches));
  check(r, std::abs(agree_freq - 0.5) <= 0.005,
        "mixed-operator agreement " + std::to_string(agree_freq));
  r.detail = "sifted_mismatches=" + std::to_string(sifted_mismatches) +
             " mixed_agreement=" + std::to_string(agree_freq) +
             (r.detail.empty() ? "" : "; " + r.detail);
  return r;
}

// 2. Mean final key length over 100 seeds within 3σ of n/4 = 1000, and the
//    efficiency command prints 1/8.
CriterionResult criterion_key_length() {
  CriterionResult r;
  const std::size_t seeds = 100;
  const double n = 4000.0;
  double total = 0.0;
  for (std::size_t s = 0; s < seeds; ++s) {
    SessionConfig config;
    config.n_rounds = 4000;
    config.master_seed = 50000 + s;
    const SessionTranscript t = run_session(config, AttackStrategy::honest());
    check(r, t.accepted, "session " + std::to_string(s) + " aborted");
    total += static_cast<double>(t.final_key.size());
  }
  const double mean = total / static_cast<double>(seeds);
  const double sigma_mean =
      std::sqrt(n * 3.0 / 16.0) / std::sqrt(static_cast<double>(seeds));
  check(r, std::abs(mean - n / 4.0) <= 3.0 * sigma_mean,
        "mean key length " + std::to_string(mean));

  const int rc = run_cli("efficiency", "acceptance_eff.txt");
  const std::string out = read_file("acceptance_eff.txt");
  check(r, rc == 0, "efficiency command failed");
  check(r, out.find("1/8") != std::string::npos,
        "efficiency output missing 1/8: " + out);
  r.detail = "mean_key_bits=" + std::to_string(mean) +
             " (3sigma=" + std::to_string(3.0 * sigma_mean) + ")" +
             (r.detail.empty() ? "" : "; " + r.detail);
  return r;
}

// 3. find_threshold(5e-4) lands in [0.1095, 0.1105].
CriterionResult criterion_threshold() {
  CriterionResult r;
  const double threshold = find_threshold(5e-4);
  check(r, threshold >= 0.1095 && threshold <= 0.1105,
        "threshold " + std::to_string(threshold));
  r.detail = "threshold=" + std::to_string(threshold) +
             (r.detail.empty() ? "" : "; " + r.detail);
  return r;
}

// 4. minimize_rate matches 1 − 2h(q) within 1e-6 on q ∈ {0, 0.005, …, 0.20},
//    with the closed form itself validated by an exhaustive λ₄ grid at 1e-5.
CriterionResult criterion_curve_oracle() {
  CriterionResult r;
  double worst_min = 0.0;
  double worst_grid = 0.0;
  for (int qi = 0; qi <= 40; ++qi) {
    const double q = 0.005 * static_cast<double>(qi);
    const double closed = 1.0 - 2.0 * binary_entropy(q);

    const double found = minimize_rate(q).rate;
    worst_min = std::max(worst_min, std::abs(found - closed));

    double grid_min = rate_given_lambda(q, 0.0);
    const double step = 1e-5;
    for (double x = step; x <= q + 1e-15; x += step) {
      grid_min = std::min(grid_min, rate_given_lambda(q, std::min(x, q)));
    }
    worst_grid = std::max(worst_grid, std::abs(grid_min - closed));
  }
  check(r, worst_min < 1e-6, "minimize_rate deviates " + std::to_string(worst_min));
  check(r, worst_grid < 1e-6, "grid oracle deviates " + std::to_string(worst_grid));
  char buf[128];
  std::snprintf(buf, sizeof(buf), "max|min-closed|=%.2e max|grid-closed|=%.2e",
                worst_min, worst_grid);
  r.detail = std::string(buf) + (r.detail.empty() ? "" : "; " + r.detail);
  return r;
}

// 5. Robustness dichotomy plus analytic-vs-brute-force agreement.
CriterionResult criterion_dichotomy() {
  CriterionResult r;
  RngStream rng = RngStream::derive(777, 0, 0);

  double max_zero_holevo = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const CollectiveParams p = random_zero_qber_params(rng);
    max_zero_holevo = std::max(max_zero_holevo, holevo_information(p));
  }
  check(r, max_zero_holevo < 1e-9,
        "zero-QBER manifold leaks " + std::to_string(max_zero_holevo));

  std::size_t informative = 0;
  std::size_t contrapositive_failures = 0;
  for (int i = 0; i < 1000; ++i) {
    const CollectiveParams p = perturbed_params(rng, 0.05);
    if (holevo_information(p) > 1e-6) {
      ++informative;
      const double max_qber =
          std::max(collective_qber(p, MeasurementMode::II),
                   collective_qber(p, MeasurementMode::HH));
      if (!(max_qber > 1e-6)) ++contrapositive_failures;
    }
  }
  check(r, informative > 0, "no informative perturbations sampled");
  check(r, contrapositive_failures == 0,
        std::to_string(contrapositive_failures) + " undetected informative attacks");

  double max_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const CollectiveParams p = random_params(rng);
    for (MeasurementMode mode : {MeasurementMode::II, MeasurementMode::HH}) {
      max_gap = std::max(max_gap, std::abs(collective_qber(p, mode) -
                                           enumerated_collective_qber(p, mode)));
    }
  }
  check(r, max_gap < 1e-12, "analytic/brute-force gap " + std::to_string(max_gap));

  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max_manifold_holevo=%.1e informative=%zu max_enum_gap=%.1e",
                max_zero_holevo, informative, max_gap);
  r.detail = std::string(buf) + (r.detail.empty() ? "" : "; " + r.detail);
  return r;
}

// 6. Fake-photon detection frequency matches 1 − (1/4)^m within ±0.01 for
//    m ∈ {1, 2, 5, 10}, both bases, 10^4 trials each.
CriterionResult criterion_fake_photon() {
  CriterionResult r;
  double worst = 0.0;
  for (AttackKind kind : {AttackKind::FakePhotonZ, AttackKind::FakePhotonX}) {
    for (std::size_t m : {std::size_t{1}, std::size_t{2}, std::size_t{5},
                          std::size_t{10}}) {
      const double predicted = fake_photon_detection_prob(m);
      const double empirical =
          simulate_fake_photon_detection(kind, m, 10000, 2026);
      const double gap = std::abs(empirical - predicted);
      worst = std::max(worst, gap);
      check(r, gap <= 0.01,
            (kind == AttackKind::FakePhotonZ ? std::string("z") : std::string("x")) +
                " m=" + std::to_string(m) + " off by " + std::to_string(gap));
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "max|emp-pred|=%.4f", worst);
  r.detail = std::string(buf) + (r.detail.empty() ? "" : "; " + r.detail);
  return r;
}

// 7. Byte-identical CLI outputs across repeated runs and --threads 1 vs 8.
CriterionResult criterion_determinism() {
  CriterionResult r;
  const std::string sim_flags =
      "simulate --rounds 4000 --seed 7 --strategy honest --verbose";
  std::vector<std::string> transcripts;
  std::vector<std::string> sim_stdout;
  int rep = 0;
  for (const std::string threads : {" --threads 1", " --threads 8"}) {
    for (int run = 0; run < 2; ++run, ++rep) {
      const std::string file = "acceptance_sim_" + std::to_string(rep) + ".json";
      const std::string outfile = "acceptance_sim_" + std::to_string(rep) + ".txt";
      const int rc = run_cli(sim_flags + threads + " --out " + file, outfile);
      check(r, rc == 0, "simulate exited nonzero");
      transcripts.push_back(read_file(file));
      sim_stdout.push_back(read_file(outfile));
    }
  }
  for (std::size_t i = 1; i < transcripts.size(); ++i) {
    check(r, !transcripts[i].empty() && transcripts[i] == transcripts[0],
          "transcript " + std::to_string(i) + " differs");
    check(r, sim_stdout[i] == sim_stdout[0],
          "simulate stdout " + std::to_string(i) + " differs");
  }

  std::vector<std::string> csvs;
  rep = 0;
  for (const std::string threads : {" --threads 1", " --threads 8"}) {
    for (int run = 0; run < 2; ++run, ++rep) {
      const std::string file = "acceptance_curve_" + std::to_string(rep) + ".csv";
      const int rc = run_cli("keyrate-curve --min 0 --max 0.15 --step 0.005" +
                                 threads + " --out " + file,
                             "acceptance_curve_stdout.txt");
      check(r, rc == 0, "keyrate-curve exited nonzero");
      csvs.push_back(read_file(file));
    }
  }
  for (std::size_t i = 1; i < csvs.size(); ++i) {
    check(r, !csvs[i].empty() && csvs[i] == csvs[0],
          "csv " + std::to_string(i) + " differs");
  }
  r.detail = "4 transcripts + 4 CSVs byte-compared" +
             (r.detail.empty() ? std::string() : "; " + r.detail);
  return r;
}

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<CriterionResult()> run;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path-to-lmsqkd-cli>\n";
    return 2;
  }
  g_cli_path = argv[1];

  const std::vector<Criterion> criteria = {
      {"table-4 exactness", 10.0, criterion_table4},
      {"key length and efficiency", 30.0, criterion_key_length},
      {"key-rate threshold", 5.0, criterion_threshold},
      {"key-rate curve oracle", 60.0, criterion_curve_oracle},
      {"collective-attack robustness dichotomy", 60.0, criterion_dichotomy},
      {"fake-photon detection", 60.0, criterion_fake_photon},
      {"determinism", 60.0, criterion_determinism},
  };

  bool all_ok = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    CriterionResult result;
    try {
      result = criteria[i].run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (seconds >= criteria[i].budget_seconds) {
      result.ok = false;
      result.detail += " [over budget]";
    }
    all_ok = all_ok && result.ok;
    std::printf("[%s] %zu. %s: %s (%.1fs < %.0fs)\n",
                result.ok ? "PASS" : "FAIL", i + 1, criteria[i].name.c_str(),
                result.detail.c_str(), seconds, criteria[i].budget_seconds);
    std::fflush(stdout);
  }
  return all_ok ? 0 : 1;
}
