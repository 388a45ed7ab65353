#include "dualcop/empirical.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string_view>

namespace dualcop {
namespace {

constexpr double kGridEps = 1e-9;

// Largest i with i/n ≤ u, and smallest i with i/n ≥ u, tolerant of rounding in u.
std::size_t floor_index(double u, std::size_t n) {
  if (u <= 0) return 0;
  if (u >= 1) return n;
  return static_cast<std::size_t>(std::floor(u * n + kGridEps));
}
std::size_t ceil_index(double u, std::size_t n) {
  if (u <= 0) return 0;
  if (u >= 1) return n;
  return static_cast<std::size_t>(std::ceil(u * n - kGridEps));
}

void check_unit(double u1, double u2) {
  if (!(u1 >= 0 && u1 <= 1 && u2 >= 0 && u2 <= 1))
    throw std::domain_error("empirical copula: point outside the unit square");
}

double count_below(const PseudoSample& ps, std::size_t i, std::size_t j) {
  std::size_t c = 0;
  for (const auto& r : ps.ranks) c += (r[0] <= i && r[1] <= j);
  return static_cast<double>(c) / ps.n;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

PseudoSample make_pseudo(const std::vector<Point2>& data, bool keep_raw) {
  const std::size_t n = data.size();
  if (n < 2) throw std::invalid_argument("make_pseudo: need at least 2 observations");
  for (const auto& p : data)
    if (!std::isfinite(p[0]) || !std::isfinite(p[1]))
      throw std::invalid_argument("make_pseudo: non-finite observation");

  PseudoSample ps;
  ps.n = n;
  ps.ranks.resize(n);
  std::vector<std::size_t> idx(n);
  for (int j = 0; j < 2; ++j) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return data[a][j] < data[b][j]; });
    for (std::size_t r = 0; r < n; ++r) {
      ps.ranks[idx[r]][j] = r + 1;
      if (r > 0 && data[idx[r]][j] == data[idx[r - 1]][j]) ps.ties = true;
    }
  }
  ps.pseudo_u.resize(n);
  ps.pseudo_u_scaled.resize(n);
  const double dn = static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = ps.ranks[k];
    ps.pseudo_u[k] = {r[0] / dn, r[1] / dn};
    ps.pseudo_u_scaled[k] = {r[0] / (dn + 1), r[1] / (dn + 1)};
  }
  if (keep_raw) ps.raw = data;
  return ps;
}

double empirical_copula(const PseudoSample& ps, double u1, double u2) {
  check_unit(u1, u2);
  return count_below(ps, floor_index(u1, ps.n), floor_index(u2, ps.n));
}

double deheuvels_copula(const PseudoSample& ps, double u1, double u2) {
  check_unit(u1, u2);
  return count_below(ps, ceil_index(u1, ps.n), ceil_index(u2, ps.n));
}

EmpiricalCopulaTable::EmpiricalCopulaTable(const PseudoSample& ps)
    : n_(ps.n), counts_((ps.n + 1) * (ps.n + 1), 0) {
  const std::size_t w = n_ + 1;
  for (const auto& r : ps.ranks) counts_[r[0] * w + r[1]] += 1;
  for (std::size_t i = 1; i <= n_; ++i)
    for (std::size_t j = 0; j <= n_; ++j) counts_[i * w + j] += counts_[(i - 1) * w + j];
  for (std::size_t i = 0; i <= n_; ++i)
    for (std::size_t j = 1; j <= n_; ++j) counts_[i * w + j] += counts_[i * w + j - 1];
}

double EmpiricalCopulaTable::cn(double u1, double u2) const {
  check_unit(u1, u2);
  return at(floor_index(u1, n_), floor_index(u2, n_));
}

double EmpiricalCopulaTable::deheuvels(double u1, double u2) const {
  check_unit(u1, u2);
  return at(ceil_index(u1, n_), ceil_index(u2, n_));
}

double integrate_dCn(const PseudoSample& ps, const std::function<double(double, double)>& f) {
  double s = 0.0;
  for (const auto& p : ps.pseudo_u) {
    double v;
    try {
      v = f(p[0], p[1]);
    } catch (const std::exception& e) {
      throw EvaluationError(std::string("integrand failed at (") + std::to_string(p[0]) + ", " +
                                std::to_string(p[1]) + "): " + e.what(),
                            p);
    }
    if (!std::isfinite(v))
      throw EvaluationError("integrand not finite at (" + std::to_string(p[0]) + ", " +
                                std::to_string(p[1]) + ")",
                            p);
    s += v;
  }
  return s / ps.n;
}

std::vector<Point2> read_csv(std::istream& in) {
  std::vector<Point2> out;
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = row.find(',', start);
      cols.push_back(row.substr(start, comma == std::string_view::npos ? row.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    double a = 0, b = 0;
    const bool numeric = cols.size() == 2 && parse_double(cols[0], a) && parse_double(cols[1], b);
    if (!seen_content) {
      seen_content = true;
      if (cols.size() != 2)
        throw CsvError(lineno, "expected 2 columns, found " + std::to_string(cols.size()));
      if (!numeric) continue;  // header
    }
    if (cols.size() != 2)
      throw CsvError(lineno, "expected 2 columns, found " + std::to_string(cols.size()));
    if (!numeric) throw CsvError(lineno, "could not parse two numbers from '" + std::string(row) + "'");
    if (!std::isfinite(a) || !std::isfinite(b)) throw CsvError(lineno, "non-finite value");
    out.push_back({a, b});
  }
  if (out.empty()) throw CsvError(0, "no data rows in input");
  return out;
}

std::vector<Point2> read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CsvError(0, "cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace dualcop
