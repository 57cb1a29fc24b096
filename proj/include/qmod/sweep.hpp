#ifndef QMOD_SWEEP_HPP
#define QMOD_SWEEP_HPP

#include <cstdint>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "qmod/modulation.hpp"

namespace qmod {

// Invalid CLI configuration; maps to exit code 2.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class LogBase { natural, two };
enum class OutputFormat { csv, json };

struct DistributionSpec {
  enum class Kind { uniform, geometric, explicit_list };
  Kind kind = Kind::uniform;
  double p = 0.5;              // geometric success parameter
  std::vector<double> values;  // explicit letter probabilities

  // Accepts "uniform", "geometric:<p>" or "explicit:<l1,l2,...>".
  static DistributionSpec parse(const std::string& text);
  std::string describe() const;
};

struct SweepConfig {
  std::vector<double> eta_grid;
  std::vector<int> d_list;
  std::vector<int> m_list;
  DistributionSpec dist;
  LogBase log_base = LogBase::natural;
  int block_max = 3;
  OutputFormat format = OutputFormat::csv;
  std::string output_path;  // empty writes to stdout
  std::uint64_t seed = 0;
};

// One grid point and scheme. Entropic fields are stored in nats; log-base
// conversion happens only at serialization.
struct SweepRow {
  double eta = 0;
  int d = 0;
  int m = 0;
  std::string scheme;
  double s_tilde = 0;
  double i_closed = 0;
  double i_brute = 0;
  double ratio_closed = 0;
  double ratio_brute = 0;
  bool theorem5_pass = false;
  bool theorem6_pass = false;
  double discrepancy = 0;  // |i_closed - i_brute|
};

inline std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::istringstream stream(text);
  while (std::getline(stream, token, ',')) {
    if (token.empty()) throw config_error("empty entry in number list '" + text + "'");
    size_t used = 0;
    double value = 0;
    try {
      value = std::stod(token, &used);
    } catch (const std::exception&) {
      throw config_error("cannot parse number '" + token + "'");
    }
    if (used != token.size()) throw config_error("trailing characters in number '" + token + "'");
    out.push_back(value);
  }
  return out;
}

inline DistributionSpec DistributionSpec::parse(const std::string& text) {
  DistributionSpec spec;
  if (text == "uniform") {
    spec.kind = Kind::uniform;
    return spec;
  }
  if (text.rfind("geometric:", 0) == 0) {
    spec.kind = Kind::geometric;
    const auto values = parse_number_list(text.substr(10));
    if (values.size() != 1) throw config_error("geometric distribution takes one parameter");
    spec.p = values.front();
    if (!(spec.p > 0.0 && spec.p <= 1.0))
      throw config_error("geometric parameter must lie in (0, 1]");
    return spec;
  }
  if (text.rfind("explicit:", 0) == 0) {
    spec.kind = Kind::explicit_list;
    spec.values = parse_number_list(text.substr(9));
    if (spec.values.empty()) throw config_error("explicit distribution needs probabilities");
    double sum = 0;
    for (double v : spec.values) {
      if (v < 0) throw config_error("explicit distribution has a negative probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw config_error("explicit distribution must sum to 1 within 1e-9");
    return spec;
  }
  throw config_error("unknown distribution '" + text +
                     "' (expected uniform, geometric:<p> or explicit:<l,...>)");
}

inline std::string DistributionSpec::describe() const {
  switch (kind) {
    case Kind::uniform: return "uniform";
    case Kind::geometric: return "geometric:" + std::to_string(p);
    case Kind::explicit_list: {
      std::string s = "explicit:";
      for (size_t i = 0; i < values.size(); ++i)
        s += (i ? "," : "") + std::to_string(values[i]);
      return s;
    }
  }
  return "?";
}

// Letter distribution for M letters. The geometric case is the truncated
// geometric lambda_n = p (1-p)^(n-1) / (1 - (1-p)^M).
inline Alphabet<double> make_alphabet(const DistributionSpec& dist, int letters) {
  Alphabet<double> a;
  a.lambda.resize(letters);
  switch (dist.kind) {
    case DistributionSpec::Kind::uniform:
      for (int n = 0; n < letters; ++n) a.lambda[n] = 1.0 / letters;
      break;
    case DistributionSpec::Kind::geometric: {
      double norm = 0;
      for (int n = 0; n < letters; ++n) {
        a.lambda[n] = dist.p * std::pow(1.0 - dist.p, n);
        norm += a.lambda[n];
      }
      for (double& v : a.lambda) v /= norm;
      break;
    }
    case DistributionSpec::Kind::explicit_list:
      if (static_cast<int>(dist.values.size()) != letters)
        throw config_error("explicit distribution has " + std::to_string(dist.values.size()) +
                           " entries but M=" + std::to_string(letters));
      a.lambda = dist.values;
      break;
  }
  return a;
}

inline void validate_config(const SweepConfig& cfg) {
  if (cfg.eta_grid.empty()) throw config_error("eta grid is empty");
  for (double eta : cfg.eta_grid)
    if (!(eta >= 0.0 && eta <= 1.0)) throw config_error("eta values must lie in [0, 1]");
  if (cfg.d_list.empty()) throw config_error("d list is empty");
  for (int d : cfg.d_list)
    if (d < 1) throw config_error("pulse amplitudes must be >= 1");
  if (cfg.m_list.empty()) throw config_error("M list is empty");
  for (int m : cfg.m_list) {
    if (m < 2) throw config_error("letter counts must be >= 2");
    make_alphabet(cfg.dist, m);  // explicit lists must match every M
  }
  if (cfg.block_max < 1 || cfg.block_max > 4)
    throw config_error("block-max must lie in [1, 4]");
}

// Deterministic grid order: eta, then d, then M, with a PPM row followed
// by a PWM row at each point.
inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
  validate_config(cfg);
  std::vector<SweepRow> rows;
  rows.reserve(cfg.eta_grid.size() * cfg.d_list.size() * cfg.m_list.size() * 2);
  for (double eta : cfg.eta_grid)
    for (int d : cfg.d_list)
      for (int m : cfg.m_list) {
        const Alphabet<double> alphabet = make_alphabet(cfg.dist, m);
        const ComparisonReport<double> report =
            compare_modulators(alphabet, eta, d, cfg.block_max);
        SweepRow ppm{eta,
                     d,
                     m,
                     "PPM",
                     report.s_tilde,
                     report.i_ppm_closed,
                     report.i_ppm_brute,
                     report.r_ppm_closed,
                     report.r_ppm_brute,
                     report.theorem5_pass(),
                     report.theorem6_pass(),
                     report.discrepancy_ppm};
        SweepRow pwm{eta,
                     d,
                     m,
                     "PWM",
                     report.s_tilde,
                     report.i_pwm_closed,
                     report.i_pwm_brute,
                     report.r_pwm_closed,
                     report.r_pwm_brute,
                     report.theorem5_pass(),
                     report.theorem6_pass(),
                     report.discrepancy_pwm};
        rows.push_back(std::move(ppm));
        rows.push_back(std::move(pwm));
      }
  for (const auto& r : rows)
    for (double v : {r.s_tilde, r.i_closed, r.i_brute, r.ratio_closed, r.ratio_brute,
                     r.discrepancy})
      if (!std::isfinite(v))
        throw consistency_error("run_sweep: non-finite value in a sweep row");
  return rows;
}

// Full round-trip precision: 17 significant decimal digits.
inline std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

inline double log_base_factor(LogBase base) {
  return base == LogBase::two ? std::log(2.0) : 1.0;
}

inline constexpr const char* kCsvHeader =
    "eta,d,M,scheme,S_tilde,I_closed,I_brute,ratio_closed,ratio_brute,"
    "theorem5_pass,theorem6_pass,discrepancy";

inline std::string to_csv(const std::vector<SweepRow>& rows, LogBase base) {
  const double k = log_base_factor(base);
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += format_number(r.eta);
    out += ',' + std::to_string(r.d);
    out += ',' + std::to_string(r.m);
    out += ',' + r.scheme;
    out += ',' + format_number(r.s_tilde / k);
    out += ',' + format_number(r.i_closed / k);
    out += ',' + format_number(r.i_brute / k);
    out += ',' + format_number(r.ratio_closed);
    out += ',' + format_number(r.ratio_brute);
    out += ',';
    out += r.theorem5_pass ? "true" : "false";
    out += ',';
    out += r.theorem6_pass ? "true" : "false";
    out += ',' + format_number(r.discrepancy / k);
    out += '\n';
  }
  return out;
}

inline std::string to_json(const std::vector<SweepRow>& rows, LogBase base) {
  const double k = log_base_factor(base);
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json obj;
    obj["eta"] = r.eta;
    obj["d"] = r.d;
    obj["M"] = r.m;
    obj["scheme"] = r.scheme;
    obj["S_tilde"] = r.s_tilde / k;
    obj["I_closed"] = r.i_closed / k;
    obj["I_brute"] = r.i_brute / k;
    obj["ratio_closed"] = r.ratio_closed;
    obj["ratio_brute"] = r.ratio_brute;
    obj["theorem5_pass"] = r.theorem5_pass;
    obj["theorem6_pass"] = r.theorem6_pass;
    obj["discrepancy"] = r.discrepancy / k;
    arr.push_back(std::move(obj));
  }
  return arr.dump(2) + "\n";
}

inline std::string render_output(const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
  return cfg.format == OutputFormat::csv ? to_csv(rows, cfg.log_base)
                                         : to_json(rows, cfg.log_base);
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
  file << text;
}

}  // namespace qmod

#endif  // QMOD_SWEEP_HPP
