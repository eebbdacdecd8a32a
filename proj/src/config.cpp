#include "rfcca/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>

#include "rfcca/error.hpp"

namespace rfcca {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  for (char c : value) {
    if (c == ',') {
      out.push_back(trim(item));
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  out.push_back(trim(item));
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const std::string s = trim(value);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
  return v;
}

double to_positive(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (!(v > 0.0)) throw ConfigError(key + ": must be positive");
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const std::string s = trim(value);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(key + ": expected a nonnegative integer, got '" + value + "'");
  }
  return v;
}

Eigen::Index to_count(const std::string& key, const std::string& value) {
  const auto v = to_unsigned(key, value);
  if (v < 1 || v > (1ULL << 40)) throw ConfigError(key + ": must be a positive count");
  return static_cast<Eigen::Index>(v);
}

bool to_bool(const std::string& key, const std::string& value) {
  const std::string v = lower(trim(value));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

bool is_auto(const std::string& value, std::initializer_list<const char*> words) {
  const std::string v = lower(trim(value));
  return std::any_of(words.begin(), words.end(), [&](const char* w) { return v == w; });
}

CsvSource& csv(ExperimentConfig& c) {
  if (!std::holds_alternative<CsvSource>(c.source)) c.source = CsvSource{};
  return std::get<CsvSource>(c.source);
}

SyntheticSource& synthetic(ExperimentConfig& c) {
  if (!std::holds_alternative<SyntheticSource>(c.source)) c.source = SyntheticSource{};
  return std::get<SyntheticSource>(c.source);
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string& value)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"source.kind",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const std::string kind = lower(trim(v));
         if (kind == "csv") csv(c);
         else if (kind == "synthetic") synthetic(c);
         else throw ConfigError(k + ": expected csv or synthetic");
       }},
      {"source.csv.path", [](ExperimentConfig& c, const std::string&, const std::string& v) { csv(c).path = trim(v); }},
      {"source.csv.x_columns", [](ExperimentConfig& c, const std::string&, const std::string& v) { csv(c).x_columns = split_list(v); }},
      {"source.csv.y_columns", [](ExperimentConfig& c, const std::string&, const std::string& v) { csv(c).y_columns = split_list(v); }},
      {"source.csv.header", [](ExperimentConfig& c, const std::string& k, const std::string& v) { csv(c).has_header = to_bool(k, v); }},
      {"source.csv.delimiter",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         std::string d = v;
         if (d == "\\t" || lower(trim(d)) == "tab") d = "\t";
         if (d.size() != 1) throw ConfigError(k + ": delimiter must be one character");
         csv(c).delimiter = d[0];
       }},
      {"source.synthetic.n", [](ExperimentConfig& c, const std::string& k, const std::string& v) { synthetic(c).n = to_count(k, v); }},
      {"source.synthetic.latent_dim", [](ExperimentConfig& c, const std::string& k, const std::string& v) { synthetic(c).latent_dim = to_count(k, v); }},
      {"source.synthetic.d_x", [](ExperimentConfig& c, const std::string& k, const std::string& v) { synthetic(c).d_x = to_count(k, v); }},
      {"source.synthetic.d_y", [](ExperimentConfig& c, const std::string& k, const std::string& v) { synthetic(c).d_y = to_count(k, v); }},
      {"source.synthetic.noise",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const double x = to_double(k, v);
         if (x < 0.0) throw ConfigError(k + ": must be nonnegative");
         synthetic(c).noise = x;
       }},
      {"source.synthetic.seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) { synthetic(c).seed = to_unsigned(k, v); }},
      {"algorithms",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.algorithms.clear();
         for (const auto& name : split_list(v)) c.algorithms.push_back(parse_algorithm(name));
         if (c.algorithms.empty()) throw ConfigError(k + ": no algorithms given");
       }},
      {"m_grid",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.m_grid.clear();
         for (const auto& m : split_list(v)) c.m_grid.push_back(to_count(k, m));
         if (c.m_grid.empty()) throw ConfigError(k + ": no feature counts given");
       }},
      {"pool_factor", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.pool_factor = to_count(k, v); }},
      {"pool_size",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (is_auto(v, {"auto", "none"})) c.pool_size.reset();
         else c.pool_size = to_count(k, v);
       }},
      {"mu", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.mu = to_positive(k, v); }},
      {"lambda_ls",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (is_auto(v, {"grid", "auto"})) c.lambda_ls.reset();
         else c.lambda_ls = to_positive(k, v);
       }},
      {"lambda_grid",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.lambda_grid.clear();
         for (const auto& x : split_list(v)) c.lambda_grid.push_back(to_positive(k, x));
         if (c.lambda_grid.empty()) throw ConfigError(k + ": empty grid");
       }},
      {"sigma",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (is_auto(v, {"heuristic", "auto"})) c.sigma_x.reset();
         else c.sigma_x = to_positive(k, v);
       }},
      {"sigma_k", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.sigma_k = to_count(k, v); }},
      {"sigma_y",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (is_auto(v, {"same", "same_as_x", "auto"})) c.sigma_y.reset();
         else c.sigma_y = to_positive(k, v);
       }},
      {"repetitions", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.repetitions = to_count(k, v); }},
      {"seed", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.master_seed = to_unsigned(k, v); }},
      {"split",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (is_auto(v, {"none", "off"})) {
           c.split.reset();
           return;
         }
         const double f = to_double(k, v);
         if (!(f > 0.0 && f < 1.0)) throw ConfigError(k + ": training fraction must lie in (0, 1)");
         c.split = f;
       }},
      {"copula_y", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.copula_y = to_bool(k, v); }},
      {"max_n", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.max_n = to_count(k, v); }},
      {"spectral.M",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (is_auto(v, {"auto"})) c.spectral.m.reset();
         else c.spectral.m = to_count(k, v);
       }},
      {"spectral.lambda",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         if (is_auto(v, {"auto"})) c.spectral.lambda.reset();
         else c.spectral.lambda = to_positive(k, v);
       }},
      {"spectral.target_s", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.spectral.target_s = to_positive(k, v); }},
      {"spectral.deltas",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         c.spectral.deltas.clear();
         for (const auto& x : split_list(v)) c.spectral.deltas.push_back(to_positive(k, x));
       }},
      {"spectral.trials", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.spectral.trials = to_count(k, v); }},
      {"spectral.mode",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const std::string m = lower(trim(v));
         if (m == "ls") c.spectral.mode = SpectralMode::LeverageScore;
         else if (m == "plain") c.spectral.mode = SpectralMode::Plain;
         else if (m == "exact") c.spectral.mode = SpectralMode::Exact;
         else throw ConfigError(k + ": expected ls, plain or exact");
       }},
      {"spectral.rho", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.spectral.rho = to_positive(k, v); }},
      {"spectral.delta0", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.spectral.delta0 = to_double(k, v); }},
      {"spectral.bound_delta", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.spectral.bound_delta = to_positive(k, v); }},
      {"spectral.pool_factor", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.spectral.pool_factor = to_count(k, v); }},
      {"select.rule",
       [](ExperimentConfig& c, const std::string& k, const std::string& v) {
         const std::string r = lower(trim(v));
         if (r == "ls") c.select.rule = SelectRule::LeverageScore;
         else if (r == "eerf") c.select.rule = SelectRule::Eerf;
         else if (r == "orcca1") c.select.rule = SelectRule::Orcca1;
         else if (r == "orcca2") c.select.rule = SelectRule::Orcca2;
         else throw ConfigError(k + ": expected ls, eerf, orcca1 or orcca2");
       }},
      {"select.M", [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.select.m = to_count(k, v); }},
  };
  return table;
}

constexpr std::array<std::pair<Algorithm, std::string_view>, 7> kNames{{
    {Algorithm::RFF, "RFF"},
    {Algorithm::ORF, "ORF"},
    {Algorithm::LS, "LS"},
    {Algorithm::EERF, "EERF"},
    {Algorithm::ORCCA1, "ORCCA1"},
    {Algorithm::ORCCA2, "ORCCA2"},
    {Algorithm::KCCA, "KCCA"},
}};

}  // namespace

std::string_view algorithm_name(Algorithm a) {
  for (const auto& [alg, name] : kNames) {
    if (alg == a) return name;
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
  for (const auto& [alg, n] : kNames) {
    if (n == upper) return alg;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

Eigen::Index ExperimentConfig::pool_for(Eigen::Index m) const {
  return pool_size ? *pool_size : pool_factor * m;
}

void ExperimentConfig::validate() const {
  if (algorithms.empty()) throw ConfigError("no algorithms configured");
  if (m_grid.empty()) throw ConfigError("empty M grid");
  for (Eigen::Index m : m_grid) {
    if (m < 1) throw ConfigError("feature counts must be positive");
    if (pool_for(m) < m) {
      throw ConfigError("pool size " + std::to_string(pool_for(m)) + " is smaller than M = " +
                        std::to_string(m));
    }
  }
  if (!(mu > 0.0)) throw ConfigError("mu must be positive");
  if (repetitions < 1) throw ConfigError("repetitions must be positive");
  if (split && !(*split > 0.0 && *split < 1.0)) throw ConfigError("split fraction must lie in (0, 1)");
  if (const auto* c = std::get_if<CsvSource>(&source)) {
    if (c->path.empty()) throw ConfigError("source.csv.path is required for a CSV source");
    if (c->x_columns.empty() || c->y_columns.empty()) {
      throw ConfigError("source.csv.x_columns and source.csv.y_columns are required");
    }
  }
  if (!(spectral.delta0 >= 0.0 && spectral.delta0 < 1.0)) throw ConfigError("spectral.delta0 must lie in [0, 1)");
  if (!(spectral.rho > 0.0 && spectral.rho < 1.0)) throw ConfigError("spectral.rho must lie in (0, 1)");
  if (!(spectral.bound_delta > 0.0 && spectral.bound_delta <= 0.5)) {
    throw ConfigError("spectral.bound_delta must lie in (0, 1/2]");
  }
}

KeyValues parse_key_values(std::istream& in) {
  KeyValues kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
    kv[key] = trim(std::string_view(body).substr(eq + 1));
  }
  return kv;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  return parse_key_values(in);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, setter] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void apply_key_values(ExperimentConfig& config, const KeyValues& values) {
  for (const auto& [key, value] : values) {
    const auto& table = setters();
    if (std::none_of(table.begin(), table.end(), [&](const auto& e) { return e.first == key; })) {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  // Table order, so source.kind is applied before the fields of that source.
  for (const auto& [name, setter] : setters()) {
    if (auto it = values.find(name); it != values.end()) setter(config, name, it->second);
  }
}

}  // namespace rfcca
