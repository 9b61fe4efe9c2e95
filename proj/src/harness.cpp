#include "separ/harness.hpp"

#include "separ/error.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace separ {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc{} && ptr == field.data() + field.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string shortest(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

std::string parse_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) noexcept {
  return split_seed(h, v, 0);
}

}  // namespace

MatrixSample read_dataset(std::istream& in, int p1, int p2) {
  if (p1 < 1 || p2 < 1) throw Error(ErrorKind::InvalidArgument, "dimensions must be positive");
  const auto p = static_cast<std::size_t>(p1) * static_cast<std::size_t>(p2);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  bool seen_first = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view content = trim(line);
    if (content.empty()) continue;
    const auto fields = split_fields(content);
    const bool first = !seen_first;
    seen_first = true;

    std::vector<double> row(fields.size());
    std::size_t bad = fields.size();
    for (std::size_t k = 0; k < fields.size(); ++k) {
      if (!parse_double(fields[k], row[k])) {
        bad = k;
        break;
      }
    }
    if (bad < fields.size()) {
      if (first) continue;  // header
      throw Error(ErrorKind::ParseError,
                  parse_error(line_no, "field " + std::to_string(bad + 1) + " ('" +
                                           std::string(trim(fields[bad])) +
                                           "') is not a number"));
    }
    if (fields.size() != p) {
      throw Error(ErrorKind::DimensionMismatch,
                  parse_error(line_no, "expected " + std::to_string(p) + " fields, found " +
                                           std::to_string(fields.size())));
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  if (values.empty()) throw Error(ErrorKind::ParseError, "no data rows");
  const auto n = static_cast<Index>(values.size() / p);
  Matrix vecs = Eigen::Map<const Matrix>(values.data(), static_cast<Index>(p), n);
  return MatrixSample(p1, p2, std::move(vecs));
}

MatrixSample read_dataset(const std::string& path, int p1, int p2) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  return read_dataset(in, p1, p2);
}

void write_dataset(std::ostream& out, const MatrixSample& sample, bool header) {
  const Matrix& vecs = sample.vecs();
  if (header) {
    for (Index k = 0; k < vecs.rows(); ++k) {
      if (k > 0) out << ',';
      out << 'x' << (k % sample.p1()) + 1 << '_' << (k / sample.p1()) + 1;
    }
    out << '\n';
  }
  for (Index i = 0; i < vecs.cols(); ++i) {
    for (Index k = 0; k < vecs.rows(); ++k) {
      if (k > 0) out << ',';
      out << shortest(vecs(k, i));
    }
    out << '\n';
  }
}

void write_dataset(const std::string& path, const MatrixSample& sample, bool header) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  write_dataset(out, sample, header);
}

void SimulationConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidArgument, what); };
  if (dims.empty() || sample_sizes.empty() || nus.empty() || taus.empty() || methods.empty()) {
    fail("simulation grid has an empty axis");
  }
  if (replicates < 1) fail("replicates must be at least 1");
  if (!(level > 0.0 && level < 1.0)) fail("level must lie in (0, 1)");
  Index largest = 0;
  for (const auto& [p1, p2] : dims) {
    if (p1 < 1 || p2 < 1) fail("dimensions must be positive");
    largest = std::max<Index>(largest, Index{p1} * p2);
  }
  for (Index n : sample_sizes) {
    if (n <= largest + 1) {
      fail("every sample size must exceed max(p1 p2) + 1 = " + std::to_string(largest + 1));
    }
  }
  for (double nu : nus) {
    if (!(nu > 0)) fail("nu must be positive");
  }
  for (double tau : taus) {
    if (!(tau >= 0) || std::isinf(tau)) fail("tau must be finite and non-negative");
  }
}

SimulationConfig parse_simulation_config(const std::string& yaml_text) {
  SimulationConfig config;
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  if (root.IsNull()) return config;
  if (!root.IsMap()) throw Error(ErrorKind::ParseError, "config: expected a mapping");

  auto as_double = [](const YAML::Node& node) {
    const std::string text = node.as<std::string>();
    std::string lower = text;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "inf" || lower == ".inf" || lower == "+inf" || lower == "+.inf" ||
        lower == "infinity") {
      return kGaussianNu;
    }
    double value = 0.0;
    if (!parse_double(text, value)) {
      throw Error(ErrorKind::ParseError, "config: '" + text + "' is not a number");
    }
    return value;
  };

  try {
    for (const auto& entry : root) {
      const auto key = entry.first.as<std::string>();
      const YAML::Node& value = entry.second;
      if (key == "dims") {
        config.dims.clear();
        for (const auto& pair : value) {
          if (!pair.IsSequence() || pair.size() != 2) {
            throw Error(ErrorKind::ParseError, "config: dims entries must be [p1, p2]");
          }
          config.dims.emplace_back(pair[0].as<int>(), pair[1].as<int>());
        }
      } else if (key == "sample_sizes") {
        config.sample_sizes = value.as<std::vector<Index>>();
      } else if (key == "nus") {
        config.nus.clear();
        for (const auto& nu : value) config.nus.push_back(as_double(nu));
      } else if (key == "taus") {
        config.taus.clear();
        for (const auto& tau : value) config.taus.push_back(as_double(tau));
      } else if (key == "replicates") {
        config.replicates = value.as<int>();
      } else if (key == "level") {
        config.level = as_double(value);
      } else if (key == "methods") {
        config.methods.clear();
        for (const auto& name : value) {
          const auto method = parse_method(name.as<std::string>());
          if (!method) {
            throw Error(ErrorKind::ParseError,
                        "config: unknown method '" + name.as<std::string>() + "'");
          }
          config.methods.push_back(*method);
        }
      } else if (key == "master_seed") {
        config.master_seed = value.as<std::uint64_t>();
      } else {
        throw Error(ErrorKind::ParseError, "config: unknown key '" + key + "'");
      }
    }
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  config.validate();
  return config;
}

SimulationConfig load_simulation_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_simulation_config(text.str());
}

SimulationConfig quick_profile(SimulationConfig config) {
  config.replicates = std::min(config.replicates, 200);
  std::erase_if(config.sample_sizes, [](Index n) { return n > 800; });
  if (config.sample_sizes.empty()) {
    throw Error(ErrorKind::InvalidArgument, "quick profile leaves no sample size <= 800");
  }
  return config;
}

std::uint64_t experiment_seed(int p1, int p2, double nu, Index n) noexcept {
  std::uint64_t h = mix(0x5e9a7ab1e5eedULL, static_cast<std::uint64_t>(p1));
  h = mix(h, static_cast<std::uint64_t>(p2));
  h = mix(h, std::bit_cast<std::uint64_t>(nu));
  return mix(h, static_cast<std::uint64_t>(n));
}

RejectionTable run_simulation(const SimulationConfig& config) {
  config.validate();
  enum Outcome : std::int8_t { kAccept = 0, kReject = 1, kFailed = 2 };
  const auto n_tau = static_cast<Index>(config.taus.size());
  const auto n_method = static_cast<Index>(config.methods.size());
  const Index per_replicate = n_tau * n_method;
  TestConfig test_config;
  test_config.levels = {config.level};

  RejectionTable table;
  for (const auto& [p1, p2] : config.dims) {
    for (double nu : config.nus) {
      for (Index n : config.sample_sizes) {
        const std::uint64_t seed = experiment_seed(p1, p2, nu, n);
        const Core core = std::isinf(nu) ? Core{GaussianCore{}} : Core{MatrixTCore{nu}};
        std::vector<std::int8_t> outcomes(
            static_cast<std::size_t>(config.replicates * per_replicate), kFailed);
        std::exception_ptr fatal;

#pragma omp parallel for schedule(dynamic)
        for (int r = 0; r < config.replicates; ++r) {
          try {
            const MatrixSample base = sample_core(
                n, p1, p2, core, split_seed(config.master_seed, seed, static_cast<std::uint64_t>(r)));
            for (Index t = 0; t < n_tau; ++t) {
              std::int8_t* slot = outcomes.data() + r * per_replicate + t * n_method;
              try {
                const MatrixSample x = local_alternative(base, config.taus[t]);
                SeparabilityAnalysis analysis(x, test_config);
                for (Index m = 0; m < n_method; ++m) {
                  try {
                    const TestReport report = analysis.run(config.methods[m]);
                    slot[m] = report.p_value < config.level ? kReject : kAccept;
                  } catch (const Error&) {
                    slot[m] = kFailed;
                  }
                }
              } catch (const Error&) {
                // every method of this tau stays kFailed
              }
            }
          } catch (...) {
#pragma omp critical(separ_simulation_fatal)
            if (!fatal) fatal = std::current_exception();
          }
        }
        if (fatal) std::rethrow_exception(fatal);

        for (Index t = 0; t < n_tau; ++t) {
          for (Index m = 0; m < n_method; ++m) {
            long rejections = 0;
            long failures = 0;
            for (int r = 0; r < config.replicates; ++r) {
              const std::int8_t o = outcomes[r * per_replicate + t * n_method + m];
              rejections += o == kReject;
              failures += o == kFailed;
            }
            const long used = config.replicates - failures;
            table.rows.push_back({p1, p2, nu, n, config.taus[t], config.methods[m], rejections,
                                  used,
                                  used > 0 ? static_cast<double>(rejections) / used : 0.0,
                                  failures, seed});
          }
        }
      }
    }
  }
  return table;
}

void write_rejection_csv(std::ostream& out, const RejectionTable& table) {
  out << "p1,p2,nu,n,tau,method,rejections,replicates,rate,failures,seed\n";
  for (const auto& row : table.rows) {
    out << row.p1 << ',' << row.p2 << ',' << shortest(row.nu) << ',' << row.n << ','
        << shortest(row.tau) << ',' << to_string(row.method) << ',' << row.rejections << ','
        << row.replicates << ',' << shortest(row.rate) << ',' << row.failures << ','
        << row.seed << '\n';
  }
}

std::string format_report_text(const std::vector<TestReport>& reports,
                               const MatrixSample& sample) {
  std::ostringstream os;
  os << "sample: n = " << sample.n() << ", p1 = " << sample.p1() << ", p2 = " << sample.p2()
     << '\n';
  for (const auto& report : reports) {
    const auto& d = report.diagnostics;
    os << '\n' << "[" << to_string(report.method) << "]\n";
    os << "  statistic    " << report.statistic << '\n';
    os << "  null law     " << describe(report.null_law) << '\n';
    os << "  p-value      " << report.p_value << '\n';
    os << "  reject at   ";
    for (const auto& [level, reject] : report.reject_at) {
      os << ' ' << level << (reject ? ":yes" : ":no");
    }
    os << '\n';
    if (d.flip_flop_iterations > 0) {
      os << "  flip-flop    " << d.flip_flop_iterations << " iterations, residual "
         << d.flip_flop_residual << '\n';
    }
    if (d.t1) os << "  t1           " << *d.t1 << '\n';
    if (d.t2) os << "  t2           " << *d.t2 << (d.t2_truncated ? " (truncated)" : "") << '\n';
    for (const auto& warning : d.warnings) os << "  warning: " << warning << '\n';
  }
  return os.str();
}

std::string format_report_json(const std::vector<TestReport>& reports,
                               const MatrixSample& sample) {
  using nlohmann::json;
  json out;
  out["sample"] = {{"n", sample.n()}, {"p1", sample.p1()}, {"p2", sample.p2()}};
  out["tests"] = json::array();
  for (const auto& report : reports) {
    const auto& d = report.diagnostics;
    json law;
    if (const auto* mixture = std::get_if<MixtureSpec>(&report.null_law)) {
      law["type"] = "chi2_mixture";
      law["terms"] = json::array();
      for (const auto& term : mixture->terms()) {
        law["terms"].push_back({{"weight", term.weight}, {"df", term.df}});
      }
    } else {
      law["type"] = "chi2";
      law["df"] = std::get<ChiSquareLaw>(report.null_law).df;
    }
    json reject = json::object();
    for (const auto& [level, r] : report.reject_at) reject[shortest(level)] = r;
    json diagnostics = {{"flip_flop_iterations", d.flip_flop_iterations},
                        {"flip_flop_residual", d.flip_flop_residual},
                        {"t2_truncated", d.t2_truncated},
                        {"warnings", d.warnings}};
    if (d.t1) diagnostics["t1"] = *d.t1;
    if (d.t2) diagnostics["t2"] = *d.t2;
    out["tests"].push_back({{"method", std::string(to_string(report.method))},
                            {"statistic", report.statistic},
                            {"null_law", law},
                            {"null_law_text", describe(report.null_law)},
                            {"p_value", report.p_value},
                            {"reject_at", reject},
                            {"diagnostics", diagnostics}});
  }
  return out.dump(2) + "\n";
}

}  // namespace separ
