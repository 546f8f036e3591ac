// Command-line front end: run protocol sessions, sweep attacks, export the
// key-rate curve and report efficiency figures.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 protocol abort.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lmsqkd/keyrate.hpp"
#include "lmsqkd/protocol.hpp"
#include "lmsqkd/serialization.hpp"

namespace {

using namespace lmsqkd;

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

struct SimulateOptions {
  SessionConfig config;
  std::string strategy_name = "honest";
  double flip = 0.0;
  std::string params_path;
  std::string out_path;
  unsigned threads = 1;
  bool verbose = false;
};

AttackStrategy make_strategy(const std::string& name, double flip,
                             const std::string& params_path) {
  if (name == "honest") return AttackStrategy::honest();
  if (name == "noise") return AttackStrategy::noise(flip);
  if (name == "fake-z") return AttackStrategy::fake_photon_z();
  if (name == "fake-x") return AttackStrategy::fake_photon_x();
  if (name == "collective") {
    if (params_path.empty()) {
      throw std::runtime_error("--strategy collective needs --params FILE");
    }
    return AttackStrategy::collective(
        collective_params_from_json(read_file(params_path)));
  }
  throw std::runtime_error("unknown strategy: " + name);
}

int cmd_simulate(const SimulateOptions& opt) {
  const AttackStrategy strategy =
      make_strategy(opt.strategy_name, opt.flip, opt.params_path);
  const SessionTranscript t = run_session(opt.config, strategy, opt.threads);

  if (!opt.out_path.empty()) {
    write_file(opt.out_path, transcript_to_json(t, opt.verbose));
  }

  std::cout << "rounds=" << t.config.n_rounds << "\n"
            << "sifted=" << t.sifted_indices.size() << "\n"
            << "check=" << t.check_indices.size() << "\n"
            << "qber=" << fixed6(t.estimated_qber) << "\n"
            << "accepted=" << (t.accepted ? "true" : "false") << "\n"
            << "raw_key_bits=" << t.raw_key.size() << "\n"
            << "final_key_bits=" << t.final_key.size() << "\n"
            << "efficiency=" << t.qubit_efficiency.num << "/"
            << t.qubit_efficiency.den << " ("
            << fixed6(t.qubit_efficiency.value()) << ")\n";
  if (!t.accepted) {
    if (t.check_indices.empty()) {
      std::cout << "aborted: insufficient check sample (min_check_bits="
                << t.config.min_check_bits << ")\n";
    } else {
      std::cout << "aborted: QBER " << fixed6(t.estimated_qber)
                << " > threshold " << fixed6(t.config.qber_threshold) << "\n";
    }
    return 2;
  }
  return 0;
}

struct CurveOptions {
  double q_min = 0.0;
  double q_max = 0.25;
  double step = 0.005;
  std::string out_path;
  unsigned threads = 1;
};

int cmd_keyrate_curve(const CurveOptions& opt) {
  const std::vector<KeyRatePoint> curve =
      export_curve(opt.q_min, opt.q_max, opt.step, opt.threads);
  std::ostringstream csv;
  write_curve_csv(csv, curve);
  write_file(opt.out_path, csv.str());
  std::cout << "rows=" << curve.size() << "\n";
  return 0;
}

int cmd_threshold(double tol) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", find_threshold(tol));
  std::cout << "threshold=" << buf << "\n";
  return 0;
}

struct AttackOptions {
  std::string fake_basis;  // "z" or "x", empty when --collective
  bool collective = false;
  std::string params_path;
  std::vector<std::size_t> m_values{1, 2, 5, 10};
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
};

int cmd_attack(const AttackOptions& opt) {
  if (opt.collective == !opt.fake_basis.empty()) {
    std::cerr << "attack: pick exactly one of --fake-photon or --collective\n";
    return 1;
  }
  if (opt.collective) {
    if (opt.params_path.empty()) {
      std::cerr << "attack: --collective needs --params FILE\n";
      return 1;
    }
    const CollectiveParams params =
        collective_params_from_json(read_file(opt.params_path));
    RngStream rng = RngStream::derive(opt.seed, 0xC0, 0);
    const LeakageReport report = leakage_report(params, opt.trials, rng);
    std::cout << "strategy=collective\n"
              << "samples=" << opt.trials << "\n"
              << "qber_ii=" << fixed6(report.qber_ii) << "\n"
              << "qber_hh=" << fixed6(report.qber_hh) << "\n"
              << "holevo_bits=" << fixed6(report.holevo_bits) << "\n"
              << "guess_accuracy=" << fixed6(report.empirical_guess_accuracy)
              << "\n";
    return 0;
  }

  const AttackKind kind =
      opt.fake_basis == "z" ? AttackKind::FakePhotonZ : AttackKind::FakePhotonX;
  std::cout << "strategy=fake-" << opt.fake_basis << "\n"
            << "trials=" << opt.trials << "\n";
  for (std::size_t m : opt.m_values) {
    const double predicted = fake_photon_detection_prob(m);
    const double empirical =
        simulate_fake_photon_detection(kind, m, opt.trials, opt.seed);
    std::cout << "m=" << m << " predicted=" << fixed6(predicted)
              << " empirical=" << fixed6(empirical) << "\n";
  }
  return 0;
}

struct EfficiencyOptions {
  double p_a = 0.5;
  double p_b = 0.5;
  double check_fraction = 0.5;
  std::string transcript_path;
};

int cmd_efficiency(const EfficiencyOptions& opt) {
  if (!opt.transcript_path.empty()) {
    const SessionTranscript t =
        transcript_from_json(read_file(opt.transcript_path));
    const std::uint64_t total_qubits = 2 * std::uint64_t{t.config.n_rounds};
    const std::uint64_t key_bits =
        t.qubit_efficiency.num * (total_qubits / t.qubit_efficiency.den);
    std::cout << "QE=" << key_bits << "/" << total_qubits << " ("
              << fixed6(t.qubit_efficiency.value()) << ")\n";
    return 0;
  }
  if (opt.p_a == 0.5 && opt.p_b == 0.5 && opt.check_fraction == 0.5) {
    std::cout << "QE=1/8 (0.125)\n";
    return 0;
  }
  const double match = opt.p_a * opt.p_b + (1.0 - opt.p_a) * (1.0 - opt.p_b);
  const double qe = (1.0 - opt.check_fraction) * match / 2.0;
  std::cout << "QE=" << fixed6(qe) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lmsqkd: mediated semi-quantum key distribution simulator "
               "and security analysis"};
  app.require_subcommand(1);

  SimulateOptions sim;
  CLI::App* simulate = app.add_subcommand("simulate", "run a full protocol session");
  simulate->add_option("--rounds", sim.config.n_rounds, "number of rounds")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}))
      ->capture_default_str();
  simulate->add_option("--seed", sim.config.master_seed, "master seed")
      ->envname("LMSQKD_SEED")
      ->capture_default_str();
  simulate->add_option("--pa", sim.config.p_a, "P(Alice applies H)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate->add_option("--pb", sim.config.p_b, "P(Bob applies H)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate
      ->add_option("--check-fraction", sim.config.check_fraction,
                   "fraction of sifted rounds used as checking bits")
      ->capture_default_str();
  simulate
      ->add_option("--threshold", sim.config.qber_threshold,
                   "QBER abort threshold")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  simulate
      ->add_option("--strategy", sim.strategy_name,
                   "honest|noise|fake-z|fake-x|collective")
      ->check(CLI::IsMember({"honest", "noise", "fake-z", "fake-x", "collective"}))
      ->capture_default_str();
  simulate->add_option("--flip", sim.flip, "noise flip probability")
      ->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--params", sim.params_path, "collective params JSON");
  simulate->add_option("--out", sim.out_path, "transcript JSON output path");
  simulate->add_option("--threads", sim.threads, "round-level parallelism")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();
  simulate->add_flag("--verbose", sim.verbose, "include the round list in the transcript");

  CurveOptions curve;
  CLI::App* keyrate = app.add_subcommand("keyrate-curve", "export the key-rate curve as CSV");
  keyrate->add_option("--min", curve.q_min, "first QBER")->capture_default_str();
  keyrate->add_option("--max", curve.q_max, "last QBER")->capture_default_str();
  keyrate->add_option("--step", curve.step, "grid step")->capture_default_str();
  keyrate->add_option("--out", curve.out_path, "CSV output path")->required();
  keyrate->add_option("--threads", curve.threads, "point-level parallelism")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();

  double threshold_tol = 5e-4;
  CLI::App* threshold = app.add_subcommand("threshold", "locate the positive-rate QBER threshold");
  threshold->add_option("--tol", threshold_tol, "bisection tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  AttackOptions attack;
  CLI::App* attack_cmd = app.add_subcommand("attack", "analyze an attack strategy");
  attack_cmd->add_option("--fake-photon", attack.fake_basis, "fake photon basis: z or x")
      ->check(CLI::IsMember({"z", "x"}));
  attack_cmd->add_flag("--collective", attack.collective, "collective attack leakage report");
  attack_cmd->add_option("--params", attack.params_path, "collective params JSON");
  attack_cmd->add_option("--m", attack.m_values, "check-bit counts (comma separated)")
      ->delimiter(',');
  attack_cmd->add_option("--trials", attack.trials, "Monte-Carlo trials / samples")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000000}))
      ->capture_default_str();
  attack_cmd->add_option("--seed", attack.seed, "master seed")
      ->envname("LMSQKD_SEED")
      ->capture_default_str();

  EfficiencyOptions eff;
  CLI::App* efficiency = app.add_subcommand("efficiency", "qubit efficiency figures");
  efficiency->add_option("--pa", eff.p_a, "P(Alice applies H)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  efficiency->add_option("--pb", eff.p_b, "P(Bob applies H)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  efficiency
      ->add_option("--check-fraction", eff.check_fraction, "checking-bit fraction")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  efficiency->add_option("--from-transcript", eff.transcript_path,
                         "realized efficiency of a session transcript");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(simulate)) return cmd_simulate(sim);
    if (app.got_subcommand(keyrate)) return cmd_keyrate_curve(curve);
    if (app.got_subcommand(threshold)) return cmd_threshold(threshold_tol);
    if (app.got_subcommand(attack_cmd)) return cmd_attack(attack);
    if (app.got_subcommand(efficiency)) return cmd_efficiency(eff);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
