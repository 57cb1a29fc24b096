// Command-line front end: parameter sweeps over the modulator comparison
// grid, the verification suites, and ad-hoc entropy evaluation.
//
// Exit codes: 0 success, 1 verification failure, 2 usage/config error,
// 3 capacity error.

#include <CLI11.hpp>

#include <iostream>

#include "qmod/qmod.hpp"

namespace {

constexpr int kExitVerifyFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitCapacity = 3;

std::vector<double> read_state_tokens(const std::string& text) {
  std::string normalized = text;
  for (char& c : normalized)
    if (c == ',' || c == '\n' || c == '\t') c = ' ';
  std::istringstream stream(normalized);
  std::vector<double> values;
  std::string token;
  while (stream >> token) {
    size_t used = 0;
    double value = 0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size())
      throw qmod::config_error("cannot parse state entry '" + token + "'");
    values.push_back(value);
  }
  if (values.empty()) throw qmod::config_error("state specification is empty");
  return values;
}

std::vector<double> load_state(const std::string& inline_spec, const std::string& file_spec) {
  if (!inline_spec.empty() && !file_spec.empty())
    throw qmod::config_error("give the state inline or as a file, not both");
  if (!inline_spec.empty()) return read_state_tokens(inline_spec);
  if (!file_spec.empty()) {
    std::ifstream f(file_spec);
    if (!f) throw qmod::config_error("cannot read state file '" + file_spec + "'");
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return read_state_tokens(text);
  }
  throw qmod::config_error("no state given (use --state or --state-file)");
}

qmod::DensityOperator<double> diagonal_state(const std::vector<double>& probs) {
  double sum = 0;
  for (double p : probs) {
    if (p < 0) throw qmod::config_error("state has a negative diagonal entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw qmod::config_error("state diagonal must sum to 1 within 1e-9");
  qmod::VectorR<double> diag(static_cast<qmod::Index>(probs.size()));
  for (size_t i = 0; i < probs.size(); ++i) diag[static_cast<qmod::Index>(i)] = probs[i] / sum;
  return qmod::diagonal_operator(qmod::FockBasis(1, static_cast<int>(probs.size()) - 1), diag);
}

qmod::LogBase parse_log_base(const std::string& text) {
  if (text == "e") return qmod::LogBase::natural;
  if (text == "2") return qmod::LogBase::two;
  throw qmod::config_error("log base must be 'e' or '2'");
}

qmod::MutualEntropyPolicy<double> parse_policy(const std::string& text, std::uint64_t seed) {
  if (text == "canonical") return qmod::MutualEntropyPolicy<double>::canonical();
  if (text.rfind("randomized:", 0) == 0) {
    int rotations = 0;
    try {
      rotations = std::stoi(text.substr(11));
    } catch (const std::exception&) {
      throw qmod::config_error("cannot parse rotation count in '" + text + "'");
    }
    if (rotations < 1) throw qmod::config_error("randomized policy needs >= 1 rotations");
    return qmod::MutualEntropyPolicy<double>::randomized(rotations, seed);
  }
  throw qmod::config_error("policy must be 'canonical' or 'randomized:<R>'");
}

std::string entropy_text(const qmod::EntropyValue<double>& value, qmod::LogBase base) {
  if (!value.finite) return "inf";
  return qmod::format_number(value.value / qmod::log_base_factor(base));
}

struct SweepCli {
  std::string eta, d, m;
  std::string dist = "uniform";
  std::string log_base = "e";
  int block_max = 3;
  std::string format = "csv";
  std::string out;
  std::uint64_t seed = 0;
};

int run_sweep_command(const SweepCli& args) {
  qmod::SweepConfig cfg;
  cfg.eta_grid = qmod::parse_number_list(args.eta);
  for (double d : qmod::parse_number_list(args.d)) {
    if (d != std::floor(d)) throw qmod::config_error("--d entries must be integers");
    cfg.d_list.push_back(static_cast<int>(d));
  }
  for (double m : qmod::parse_number_list(args.m)) {
    if (m != std::floor(m)) throw qmod::config_error("--M entries must be integers");
    cfg.m_list.push_back(static_cast<int>(m));
  }
  cfg.dist = qmod::DistributionSpec::parse(args.dist);
  cfg.log_base = parse_log_base(args.log_base);
  cfg.block_max = args.block_max;
  if (args.format == "csv") cfg.format = qmod::OutputFormat::csv;
  else if (args.format == "json") cfg.format = qmod::OutputFormat::json;
  else throw qmod::config_error("format must be 'csv' or 'json'");
  cfg.output_path = args.out;
  cfg.seed = args.seed;

  const std::string text = qmod::render_output(cfg, qmod::run_sweep(cfg));
  if (cfg.output_path.empty()) {
    std::cout << text;
  } else {
    qmod::write_text(cfg.output_path, text);
    std::cerr << "wrote " << cfg.output_path << "\n";
  }
  return 0;
}

struct EntropyCli {
  std::string state, state_file;
  std::string sigma, sigma_file;
  double eta = -1;
  std::string policy = "canonical";
  std::uint64_t seed = 0;
  std::string log_base = "e";
};

int run_entropy_command(const EntropyCli& args) {
  const qmod::LogBase base = parse_log_base(args.log_base);
  const auto rho = diagonal_state(load_state(args.state, args.state_file));
  std::cout << "von_neumann = " << entropy_text(qmod::von_neumann(rho), base) << "\n";

  if (!args.sigma.empty() || !args.sigma_file.empty()) {
    const auto sigma = diagonal_state(load_state(args.sigma, args.sigma_file));
    if (!(sigma.basis == rho.basis))
      throw qmod::config_error("state and sigma must have the same length");
    std::cout << "relative_entropy = " << entropy_text(qmod::relative_entropy(rho, sigma), base)
              << "\n";
  }

  if (args.eta >= 0) {
    if (args.eta > 1) throw qmod::config_error("--eta must lie in [0, 1]");
    const auto lc = qmod::lift(qmod::attenuation_channel(args.eta, rho.basis.n_max()), 1);
    const auto policy = parse_policy(args.policy, args.seed);
    std::cout << "mutual_entropy = " << entropy_text(qmod::mutual_entropy(rho, lc, policy), base)
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attenuation-channel entropy toolkit"};
  app.require_subcommand(1);

  SweepCli sweep_args;
  auto* sweep = app.add_subcommand(
      "sweep", "tabulate modulator transmission efficiency over a parameter grid");
  sweep->add_option("--eta", sweep_args.eta, "comma list of transition ratios in [0,1]")
      ->required();
  sweep->add_option("--d", sweep_args.d, "comma list of pulse amplitudes")->required();
  sweep->add_option("--M", sweep_args.m, "comma list of alphabet sizes")->required();
  sweep->add_option("--dist", sweep_args.dist,
                    "letter distribution: uniform | geometric:<p> | explicit:<l,l,...>");
  sweep->add_option("--log-base", sweep_args.log_base, "entropy unit: e (nats) or 2 (bits)");
  sweep->add_option("--block-max", sweep_args.block_max,
                    "largest block length for the definitional values (1..4)");
  sweep->add_option("--format", sweep_args.format, "output format: csv or json");
  sweep->add_option("--out", sweep_args.out, "output path (stdout when omitted)");
  sweep->add_option("--seed", sweep_args.seed, "seed recorded with the run");

  std::string level = "fast";
  auto* verify = app.add_subcommand("verify", "run the verification suites");
  verify->add_option("--level", level, "fast or full")
      ->check(CLI::IsMember({"fast", "full"}));

  EntropyCli entropy_args;
  auto* entropy = app.add_subcommand("entropy", "evaluate entropies of a diagonal state");
  entropy->add_option("--state", entropy_args.state, "inline diagonal list, e.g. 0.5,0.5");
  entropy->add_option("--state-file", entropy_args.state_file, "file with diagonal entries");
  entropy->add_option("--sigma", entropy_args.sigma, "reference state for relative entropy");
  entropy->add_option("--sigma-file", entropy_args.sigma_file, "reference state file");
  entropy->add_option("--eta", entropy_args.eta,
                      "transition ratio; prints mutual entropy through the channel");
  entropy->add_option("--policy", entropy_args.policy,
                      "decomposition search: canonical | randomized:<R>");
  entropy->add_option("--seed", entropy_args.seed, "seed for the randomized policy");
  entropy->add_option("--log-base", entropy_args.log_base, "entropy unit: e or 2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sweep->parsed()) return run_sweep_command(sweep_args);
    if (verify->parsed()) return qmod::run_verify(level == "full", std::cout);
    if (entropy->parsed()) return run_entropy_command(entropy_args);
  } catch (const qmod::capacity_error& e) {
    std::cerr << "capacity error: " << e.what() << "\n";
    return kExitCapacity;
  } catch (const qmod::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerifyFailure;
  }
  return kExitUsage;
}
