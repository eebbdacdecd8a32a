#include "rfcca/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "rfcca/error.hpp"
#include "rfcca/random.hpp"

namespace rfcca {

namespace {

using Record = std::vector<std::string>;

// RFC 4180: quoted fields may contain delimiters, doubled quotes and line breaks.
std::vector<Record> parse_records(const std::string& text, char delim) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  auto end_field = [&] {
    current.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(current.size() == 1 && current[0].empty())) records.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == delim) {
      end_field();
    } else if (c == '\n') {
      end_record();
    } else if (c == '\r') {
      if (i + 1 < text.size() && text[i + 1] == '\n') continue;
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) throw DataError("load_csv: unterminated quoted field");
  if (field_started || !field.empty() || !current.empty()) end_record();
  return records;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  std::size_t start = (s[0] == '+') ? 1 : 0;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::size_t> parse_index(const std::string& s) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); })) {
    return std::nullopt;
  }
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::size_t> resolve(const std::vector<std::string>& wanted, const Record* header,
                                 std::size_t width, const char* view) {
  if (wanted.empty()) throw DataError(std::string("load_csv: no columns given for view ") + view);
  std::vector<std::size_t> cols;
  for (const auto& raw : wanted) {
    const std::string token = trim(raw);
    std::optional<std::size_t> col;
    if (header) {
      for (std::size_t j = 0; j < header->size(); ++j) {
        if (trim((*header)[j]) == token) {
          col = j;
          break;
        }
      }
    }
    if (!col) col = parse_index(token);
    if (!col || *col >= width) {
      throw DataError(std::string("load_csv: unknown column '") + token + "' for view " + view);
    }
    cols.push_back(*col);
  }
  return cols;
}

std::string format17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote_if_needed(const std::string& s, char delim) {
  if (s.find_first_of(std::string("\"\r\n") + delim) == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

std::vector<std::string> numbered(const char* prefix, Eigen::Index count) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i));
  return names;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::vector<std::string>& x_columns,
                 const std::vector<std::string>& y_columns, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("load_csv: cannot read " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<Record> records = parse_records(text, options.delimiter);

  std::optional<Record> header;
  if (options.has_header) {
    if (records.empty()) throw DataError("load_csv: " + path.string() + " has no header row");
    header = std::move(records.front());
    records.erase(records.begin());
  }
  std::size_t width = header ? header->size() : 0;
  for (const auto& r : records) width = std::max(width, r.size());

  const Record* hdr = header ? &*header : nullptr;
  const auto xc = resolve(x_columns, hdr, width, "x");
  const auto yc = resolve(y_columns, hdr, width, "y");
  for (std::size_t c : xc) {
    if (std::find(yc.begin(), yc.end(), c) != yc.end()) {
      throw DataError("load_csv: column " + std::to_string(c) + " is listed in both views");
    }
  }

  std::vector<double> xs, ys;
  std::size_t kept = 0;
  std::size_t dropped = 0;
  for (const auto& r : records) {
    std::vector<double> rx, ry;
    bool ok = true;
    for (std::size_t c : xc) {
      const auto v = c < r.size() ? parse_number(r[c]) : std::nullopt;
      if (!v) { ok = false; break; }
      rx.push_back(*v);
    }
    for (std::size_t c : yc) {
      if (!ok) break;
      const auto v = c < r.size() ? parse_number(r[c]) : std::nullopt;
      if (!v) { ok = false; break; }
      ry.push_back(*v);
    }
    if (!ok) {
      ++dropped;
      continue;
    }
    xs.insert(xs.end(), rx.begin(), rx.end());
    ys.insert(ys.end(), ry.begin(), ry.end());
    ++kept;
  }
  if (kept == 0) throw DataError("load_csv: no usable rows in " + path.string());

  Dataset data;
  const auto n = static_cast<Eigen::Index>(kept);
  const auto dx = static_cast<Eigen::Index>(xc.size());
  const auto dy = static_cast<Eigen::Index>(yc.size());
  data.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      xs.data(), n, dx);
  data.y = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      ys.data(), n, dy);
  for (std::size_t c : xc) data.x_names.push_back(hdr ? trim((*hdr)[c]) : std::to_string(c));
  for (std::size_t c : yc) data.y_names.push_back(hdr ? trim((*hdr)[c]) : std::to_string(c));
  data.provenance = CsvProvenance{path, x_columns, y_columns};
  data.dropped_rows = dropped;
  return data;
}

void write_csv(const Dataset& data, const std::filesystem::path& path, char delimiter) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("write_csv: cannot write " + path.string());
  auto names_x = data.x_names.size() == static_cast<std::size_t>(data.x.cols())
                     ? data.x_names : numbered("x", data.x.cols());
  auto names_y = data.y_names.size() == static_cast<std::size_t>(data.y.cols())
                     ? data.y_names : numbered("y", data.y.cols());
  bool first = true;
  for (const auto* names : {&names_x, &names_y}) {
    for (const auto& nm : *names) {
      if (!first) out << delimiter;
      out << quote_if_needed(nm, delimiter);
      first = false;
    }
  }
  out << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.x.cols(); ++j) out << (j ? std::string(1, delimiter) : "") << format17(data.x(i, j));
    for (Eigen::Index j = 0; j < data.y.cols(); ++j) out << delimiter << format17(data.y(i, j));
    out << '\n';
  }
}

Eigen::MatrixXd copula_transform(const Eigen::MatrixXd& x) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd out(n, x.cols());
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return x(a, c) < x(b, c); });
    std::size_t i = 0;
    while (i < order.size()) {
      std::size_t j = i;
      while (j + 1 < order.size() && x(order[j + 1], c) == x(order[i], c)) ++j;
      // 1-based ranks i+1 .. j+1 share their mean
      const double rank = 0.5 * static_cast<double>(i + j + 2);
      for (std::size_t t = i; t <= j; ++t) out(order[t], c) = rank / static_cast<double>(n);
      i = j + 1;
    }
  }
  return out;
}

double bandwidth_heuristic(const Eigen::MatrixXd& x, Eigen::Index k) {
  const Eigen::Index n = x.rows();
  if (n < 2) throw ParameterError("bandwidth_heuristic: at least two points are required");
  if (k < 1) throw ParameterError("bandwidth_heuristic: neighbour index must be positive");
  const Eigen::Index kk = std::min(k, n - 1);
  std::vector<double> dist(static_cast<std::size_t>(n - 1));
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::size_t pos = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) dist[pos++] = (x.row(i) - x.row(j)).squaredNorm();
    }
    std::nth_element(dist.begin(), dist.begin() + (kk - 1), dist.end());
    total += std::sqrt(dist[static_cast<std::size_t>(kk - 1)]);
  }
  const double mean = total / static_cast<double>(n);
  if (!(mean > 0.0)) throw DataError("bandwidth_heuristic: all points coincide");
  return 1.0 / mean;
}

SplitIndices split(Eigen::Index n, double fraction, std::uint64_t seed) {
  if (n < 2) throw ParameterError("split: at least two rows are required");
  if (!(fraction > 0.0 && fraction < 1.0)) throw ParameterError("split: fraction must lie in (0, 1)");
  const auto n_train = static_cast<Eigen::Index>(std::round(fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n) {
    throw ParameterError("split: fraction leaves the train or test set empty");
  }
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng(derive_seed(seed, "split"));
  std::shuffle(perm.begin(), perm.end(), rng);
  SplitIndices s;
  s.fraction = fraction;
  s.seed = seed;
  s.train.assign(perm.begin(), perm.begin() + n_train);
  s.test.assign(perm.begin() + n_train, perm.end());
  return s;
}

Dataset select_rows(const Dataset& data, std::span<const Eigen::Index> rows) {
  Dataset out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), data.x.cols());
  out.y.resize(static_cast<Eigen::Index>(rows.size()), data.y.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= data.rows()) throw ParameterError("select_rows: row out of range");
    out.x.row(static_cast<Eigen::Index>(i)) = data.x.row(rows[i]);
    out.y.row(static_cast<Eigen::Index>(i)) = data.y.row(rows[i]);
  }
  out.x_names = data.x_names;
  out.y_names = data.y_names;
  out.provenance = data.provenance;
  return out;
}

Dataset synthetic_views(Eigen::Index n, Eigen::Index latent_dim, Eigen::Index d_x, Eigen::Index d_y,
                        double noise, std::uint64_t seed) {
  if (latent_dim < 1 || d_x < 1 || d_y < 1) throw ParameterError("synthetic_views: dimensions must be positive");
  const double s = 1.0 / std::sqrt(static_cast<double>(latent_dim));
  const Eigen::MatrixXd ax = s * gaussian_matrix(latent_dim, d_x, derive_seed(seed, "mix-x"));
  const Eigen::MatrixXd ay = s * gaussian_matrix(latent_dim, d_y, derive_seed(seed, "mix-y"));
  Dataset data = synthetic_views(n, ax, ay, noise, seed);
  std::ostringstream desc;
  desc << "n=" << n << " latent_dim=" << latent_dim << " d_x=" << d_x << " d_y=" << d_y
       << " noise=" << noise;
  data.provenance = SyntheticProvenance{desc.str(), seed};
  return data;
}

Dataset synthetic_views(Eigen::Index n, const Eigen::MatrixXd& mix_x, const Eigen::MatrixXd& mix_y,
                        double noise, std::uint64_t seed) {
  if (n < 2) throw ParameterError("synthetic_views: at least two rows are required");
  if (mix_x.rows() != mix_y.rows() || mix_x.rows() < 1) {
    throw ParameterError("synthetic_views: mixing matrices must share a positive latent dimension");
  }
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw ParameterError("synthetic_views: noise must be nonnegative");
  const Eigen::MatrixXd t = gaussian_matrix(n, mix_x.rows(), derive_seed(seed, "latent"));
  Dataset data;
  data.x = (t * mix_x).array().tanh().matrix() +
           noise * gaussian_matrix(n, mix_x.cols(), derive_seed(seed, "noise-x"));
  data.y = (t * mix_y).array().cube().matrix() / 3.0 +
           noise * gaussian_matrix(n, mix_y.cols(), derive_seed(seed, "noise-y"));
  data.x_names = numbered("x", mix_x.cols());
  data.y_names = numbered("y", mix_y.cols());
  data.provenance = SyntheticProvenance{"explicit mixing", seed};
  return data;
}

}  // namespace rfcca
