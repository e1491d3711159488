#include "sisgoal/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace sisgoal {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') {
    out = out.substr(1, out.size() - 2);
  }
  return out;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    fields.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return fields;
}

bool is_missing_token(const std::string& s) {
  static const std::unordered_set<std::string> tokens = {
      "", "NA", "na", "N/A", "NaN", "nan", "NAN", "null", "NULL", "."};
  return tokens.contains(s);
}

double parse_cell(const std::string& cell, Index row, const std::string& column) {
  if (is_missing_token(cell)) {
    throw DataError("missing value at row " + std::to_string(row) +
                    ", column " + column);
  }
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (*begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw DataError("non-numeric value '" + cell + "' at row " +
                    std::to_string(row) + ", column " + column);
  }
  if (!std::isfinite(value)) {
    throw DataError("non-finite value at row " + std::to_string(row) +
                    ", column " + column);
  }
  return value;
}

bool all_binary(const VectorXd& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return x == 0.0 || x == 1.0; });
}

}  // namespace

std::string to_string(OutcomeKind kind) {
  return kind == OutcomeKind::binary ? "binary" : "continuous";
}

std::string to_string(RemovalReason reason) {
  switch (reason) {
    case RemovalReason::none: return "none";
    case RemovalReason::constant: return "constant";
    case RemovalReason::redundant_correlation: return "redundant_correlation";
  }
  return "none";
}

Index Dataset::n_treated() const {
  return static_cast<Index>((A.array() == 1.0).count());
}

void Dataset::validate() const {
  if (A.size() != n() || Y.size() != n()) {
    throw DataError("treatment/outcome length does not match covariate rows");
  }
  if (static_cast<Index>(feature_names.size()) != p()) {
    throw DataError("feature name count does not match covariate columns");
  }
  if (!all_binary(A)) throw DataError("treatment values must be 0 or 1");
  if (n_treated() == 0 || n_control() == 0) {
    throw DataError("treatment has a single level");
  }
  if (!X.allFinite() || !Y.allFinite()) {
    throw DataError("covariates and outcome must be finite");
  }
  if (outcome_kind == OutcomeKind::binary && !all_binary(Y)) {
    throw DataError("binary outcome must contain only 0/1");
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : feature_names) {
    if (!seen.insert(name).second) {
      throw DataError("duplicate feature name " + name);
    }
  }
}

Dataset Dataset::select_rows(std::span<const Index> rows) const {
  Dataset out;
  out.X.resize(static_cast<Index>(rows.size()), p());
  out.A.resize(static_cast<Index>(rows.size()));
  out.Y.resize(static_cast<Index>(rows.size()));
  for (Index r = 0; r < static_cast<Index>(rows.size()); ++r) {
    out.X.row(r) = X.row(rows[r]);
    out.A(r) = A(rows[r]);
    out.Y(r) = Y(rows[r]);
  }
  out.feature_names = feature_names;
  out.outcome_kind = outcome_kind;
  return out;
}

Dataset Dataset::select_features(std::span<const Index> columns) const {
  Dataset out;
  out.X.resize(n(), static_cast<Index>(columns.size()));
  for (Index c = 0; c < static_cast<Index>(columns.size()); ++c) {
    out.X.col(c) = X.col(columns[c]);
    out.feature_names.push_back(feature_names[columns[c]]);
  }
  out.A = A;
  out.Y = Y;
  out.outcome_kind = outcome_kind;
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const ColumnRoles& roles) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw DataError("missing header row in " + path.string());
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_line(line);

  std::unordered_map<std::string, Index> column_of;
  for (Index c = 0; c < static_cast<Index>(header.size()); ++c) {
    if (!column_of.emplace(header[c], c).second) {
      throw DataError("duplicate column " + header[c]);
    }
  }
  auto require = [&](const std::string& name) {
    const auto it = column_of.find(name);
    if (it == column_of.end()) throw DataError("column " + name + " not found");
    return it->second;
  };
  const Index treatment_col = require(roles.treatment);
  const Index outcome_col = require(roles.outcome);

  std::vector<Index> feature_cols;
  std::vector<std::string> names;
  if (roles.features.empty()) {
    for (Index c = 0; c < static_cast<Index>(header.size()); ++c) {
      if (c == treatment_col || c == outcome_col) continue;
      feature_cols.push_back(c);
      names.push_back(header[c]);
    }
  } else {
    for (const auto& name : roles.features) {
      feature_cols.push_back(require(name));
      names.push_back(name);
    }
  }

  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != header.size()) {
      throw DataError("row " + std::to_string(rows.size() + 1) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    rows.push_back(std::move(fields));
  }

  const Index n = static_cast<Index>(rows.size());
  Dataset d;
  d.X.resize(n, static_cast<Index>(feature_cols.size()));
  d.A.resize(n);
  d.Y.resize(n);
  d.feature_names = std::move(names);
  for (Index r = 0; r < n; ++r) {
    const auto& fields = rows[r];
    d.A(r) = parse_cell(fields[treatment_col], r + 1, roles.treatment);
    if (d.A(r) != 0.0 && d.A(r) != 1.0) {
      throw DataError("treatment value outside {0,1} at row " + std::to_string(r + 1));
    }
    d.Y(r) = parse_cell(fields[outcome_col], r + 1, roles.outcome);
    for (Index c = 0; c < static_cast<Index>(feature_cols.size()); ++c) {
      d.X(r, c) = parse_cell(fields[feature_cols[c]], r + 1, header[feature_cols[c]]);
    }
  }
  d.outcome_kind = roles.outcome_kind.value_or(
      all_binary(d.Y) ? OutcomeKind::binary : OutcomeKind::continuous);
  d.validate();
  return d;
}

void write_csv(const Dataset& d, const std::filesystem::path& path,
               const std::string& treatment_name, const std::string& outcome_name) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << treatment_name << ',' << outcome_name;
  for (const auto& name : d.feature_names) out << ',' << name;
  out << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  for (Index r = 0; r < d.n(); ++r) {
    put(d.A(r));
    out << ',';
    put(d.Y(r));
    for (Index c = 0; c < d.p(); ++c) {
      out << ',';
      put(d.X(r, c));
    }
    out << '\n';
  }
}

Dataset standardize(const Dataset& d) {
  if (d.n() < 2) throw DataError("standardization needs at least two rows");
  Dataset out = d;
  for (Index j = 0; j < d.p(); ++j) {
    auto col = out.X.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(d.n() - 1));
    if (!(sd > 0.0) || sd <= 1e-12 * (1.0 + std::abs(mean))) {
      throw DataError("constant column " + d.feature_names[j]);
    }
    col /= sd;
  }
  return out;
}

FeatureFilterResult drop_constant_features(const Dataset& d) {
  std::vector<Index> keep;
  std::vector<FeatureMeta> meta;
  for (Index j = 0; j < d.p(); ++j) {
    const auto col = d.X.col(j);
    const bool constant = (col.array() == col(0)).all();
    meta.push_back({j, d.feature_names[j], !constant,
                    constant ? RemovalReason::constant : RemovalReason::none});
    if (!constant) keep.push_back(j);
  }
  return {d.select_features(keep), std::move(meta)};
}

FeatureFilterResult correlation_filter(const Dataset& d, double cutoff) {
  if (!(cutoff > 0.0 && cutoff <= 1.0)) {
    throw std::invalid_argument("correlation cutoff must lie in (0, 1]");
  }
  const Index p = d.p();
  const MatrixXd corr =
      ((d.X.transpose() * d.X) / static_cast<double>(d.n() - 1)).cwiseAbs();

  std::vector<bool> alive(static_cast<std::size_t>(p), true);
  std::vector<FeatureMeta> meta;
  for (Index j = 0; j < p; ++j) meta.push_back({j, d.feature_names[j], true, RemovalReason::none});

  auto mean_abs_corr = [&](Index j) {
    double sum = 0.0;
    Index count = 0;
    for (Index k = 0; k < p; ++k) {
      if (k == j || !alive[k]) continue;
      sum += corr(j, k);
      ++count;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
  };

  while (true) {
    double worst = cutoff;
    Index wi = -1, wj = -1;
    for (Index i = 0; i < p; ++i) {
      if (!alive[i]) continue;
      for (Index j = i + 1; j < p; ++j) {
        if (alive[j] && corr(i, j) > worst) {
          worst = corr(i, j);
          wi = i;
          wj = j;
        }
      }
    }
    if (wi < 0) break;
    const double mi = mean_abs_corr(wi);
    const double mj = mean_abs_corr(wj);
    // Near-equal means (e.g. duplicated columns) count as a tie.
    const Index drop = (mi > mj + 1e-12) ? wi : wj;
    alive[drop] = false;
    meta[drop].kept = false;
    meta[drop].removal_reason = RemovalReason::redundant_correlation;
  }

  std::vector<Index> keep;
  for (Index j = 0; j < p; ++j) {
    if (alive[j]) keep.push_back(j);
  }
  return {d.select_features(keep), std::move(meta)};
}

}  // namespace sisgoal
