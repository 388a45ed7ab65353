#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualcop/copulas.hpp"

namespace dualcop {

/// Rank-transformed bivariate sample.
struct PseudoSample {
  std::size_t n = 0;
  /// Ranks R_jk in 1..n, ties broken by input order.
  std::vector<std::array<std::size_t, 2>> ranks;
  /// (R_1k/n, R_2k/n).
  std::vector<Point2> pseudo_u;
  /// (R_1k/(n+1), R_2k/(n+1)), strictly inside the square.
  std::vector<Point2> pseudo_u_scaled;
  /// Input data, kept only on request.
  std::vector<Point2> raw;
  /// Set when a margin contains repeated values.
  bool ties = false;
};

PseudoSample make_pseudo(const std::vector<Point2>& data, bool keep_raw = false);

/// C_n(u1,u2) = (1/n) Σ 1{R_1k/n ≤ u1} 1{R_2k/n ≤ u2}; O(n).
double empirical_copula(const PseudoSample& ps, double u1, double u2);

/// Deheuvels' copula F_n(F_1n⁻¹(u1), F_2n⁻¹(u2)); O(n).
double deheuvels_copula(const PseudoSample& ps, double u1, double u2);

/// Cumulative count table for O(1) evaluation of both empirical copulas.
class EmpiricalCopulaTable {
 public:
  explicit EmpiricalCopulaTable(const PseudoSample& ps);
  double cn(double u1, double u2) const;
  double deheuvels(double u1, double u2) const;
  /// (1/n)·#{R_1k ≤ i, R_2k ≤ j}.
  double at(std::size_t i, std::size_t j) const { return counts_[i * (n_ + 1) + j] / double(n_); }

 private:
  std::size_t n_;
  std::vector<std::size_t> counts_;
};

/// Raised by integrate_dCn when the integrand fails at a pseudo-observation.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, Point2 point)
      : std::runtime_error(what), point_(point) {}
  Point2 point() const { return point_; }

 private:
  Point2 point_;
};

/// ∫ f dC_n = (1/n) Σ f(R_1k/n, R_2k/n).
double integrate_dCn(const PseudoSample& ps, const std::function<double(double, double)>& f);

/// Malformed CSV input; `line` is 1-based (0 for whole-file problems).
class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Two-column comma-separated data; a non-numeric first row is taken as a header.
std::vector<Point2> read_csv(std::istream& in);
std::vector<Point2> read_csv_file(const std::string& path);

}  // namespace dualcop
