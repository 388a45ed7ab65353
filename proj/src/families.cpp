#include "families.hpp"

#include <cmath>
#include <limits>

namespace dualcop::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double norm_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }
double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// log(e^x + e^y) without overflow.
double logaddexp(double x, double y) {
  const double m = std::max(x, y);
  if (m == -kInf) return -kInf;
  return m + std::log1p(std::exp(-std::abs(x - y)));
}

// ---------------------------------------------------------------- FGM

double fgm_density(double th, double u, double v) {
  return 1.0 + th * (1.0 - 2.0 * u) * (1.0 - 2.0 * v);
}
double fgm_cdf(double th, double u, double v) {
  return u * v * (1.0 + th * (1.0 - u) * (1.0 - v));
}
double fgm_h(double th, double u, double v) {
  return v * (1.0 + th * (1.0 - 2.0 * u) * (1.0 - v));
}

// ---------------------------------------------------------------- Clayton
//
// With a = -log u, b = -log v and B = u^-θ + v^-θ - 1 the log-density is
//   L = log(1+θ) + (θ+1)(a+b) - D(θ) - 2 log B,   D(θ) = log B / θ.
// D is analytic at θ = 0 but the direct quotient cancels there, so a power
// series in θ is used for small |θ|.

struct ClaytonTerms {
  bool valid = false;
  double log_b = 0, d = 0, d1 = 0, d2 = 0, dlog_b = 0, d2log_b = 0;
};

constexpr double kClaytonSeriesTheta = 1e-3;
constexpr int kClaytonSeriesOrder = 14;

ClaytonTerms clayton_terms(double th, double a, double b) {
  ClaytonTerms t;
  const double amax = std::max(a, b);
  if (std::abs(th) < kClaytonSeriesTheta && std::abs(th) * amax < 0.05) {
    // log B = Σ γ_k θ^k from B = 1 + Σ (a^k + b^k)/k! θ^k.
    double x[kClaytonSeriesOrder + 1];
    double g[kClaytonSeriesOrder + 1];
    double pa = 1, pb = 1, fact = 1;
    for (int k = 1; k <= kClaytonSeriesOrder; ++k) {
      pa *= a;
      pb *= b;
      fact *= k;
      x[k] = (pa + pb) / fact;
    }
    for (int k = 1; k <= kClaytonSeriesOrder; ++k) {
      double acc = k * x[k];
      for (int j = 1; j < k; ++j) acc -= j * g[j] * x[k - j];
      g[k] = acc / k;
    }
    double d = 0, d1 = 0, d2 = 0;
    for (int k = kClaytonSeriesOrder; k >= 1; --k) d = d * th + g[k];
    for (int k = kClaytonSeriesOrder; k >= 2; --k) d1 = d1 * th + (k - 1) * g[k];
    for (int k = kClaytonSeriesOrder; k >= 3; --k) d2 = d2 * th + (k - 1) * (k - 2) * g[k];
    t.valid = true;
    t.d = d;
    t.d1 = d1;
    t.d2 = d2;
    t.log_b = th * d;
    t.dlog_b = d + th * d1;
    t.d2log_b = 2 * d1 + th * d2;
    return t;
  }
  const double bm1 = std::expm1(th * a) + std::expm1(th * b);
  if (!(bm1 > -1.0)) return t;  // outside the support (θ < 0)
  const double big_b = 1.0 + bm1;
  const double ea = std::exp(th * a), eb = std::exp(th * b);
  t.valid = true;
  t.log_b = std::log1p(bm1);
  t.d = t.log_b / th;
  t.dlog_b = (a * ea + b * eb) / big_b;
  t.d2log_b = (a * a * ea + b * b * eb) / big_b - t.dlog_b * t.dlog_b;
  t.d1 = (t.dlog_b - t.d) / th;
  t.d2 = (t.d2log_b - 2 * t.d1) / th;
  return t;
}

DensityDerivs clayton_derivs(double th, double u, double v, int order) {
  DensityDerivs out;
  const double a = -std::log(u), b = -std::log(v);
  const ClaytonTerms t = clayton_terms(th, a, b);
  if (!t.valid) return out;  // density vanishes off the support
  const double l = std::log1p(th) + (th + 1) * (a + b) - t.d - 2 * t.log_b;
  const double c = std::abs(th) < 1e-10 ? 1.0 : std::exp(l);
  out.value = c;
  if (order >= 1) {
    const double l1 = 1.0 / (1.0 + th) + (a + b) - t.d1 - 2 * t.dlog_b;
    out.grad[0] = c * l1;
    if (order >= 2) {
      const double l2 = -1.0 / ((1.0 + th) * (1.0 + th)) - t.d2 - 2 * t.d2log_b;
      out.hess[0] = c * (l1 * l1 + l2);
    }
  }
  return out;
}

double clayton_cdf(double th, double u, double v) {
  if (u <= 0 || v <= 0) return 0.0;
  if (std::abs(th) < 1e-12) return u * v;
  const ClaytonTerms t = clayton_terms(th, -std::log(u), -std::log(v));
  if (!t.valid) return 0.0;
  return std::exp(-t.d);
}

double clayton_h(double th, double u, double v) {
  if (v <= 0) return 0.0;
  if (std::abs(th) < 1e-12) return v;
  const double a = -std::log(u);
  const ClaytonTerms t = clayton_terms(th, a, -std::log(v));
  if (!t.valid) return 0.0;
  return std::exp((th + 1) * (a - t.d));
}

// ∂L/∂u and ∂²L/∂θ∂u for margin u (swap the arguments for margin v).
void clayton_logdens_du(double th, double u, double v, double* lu, double* luth) {
  const double a = -std::log(u), b = -std::log(v);
  const ClaytonTerms t = clayton_terms(th, a, b);
  const double ratio = std::exp(th * a - t.log_b);  // u^-θ / B
  *lu = (-(th + 1) + (1 + 2 * th) * ratio) / u;
  if (luth) *luth = (-1 + ratio * (2 + (1 + 2 * th) * (a - t.dlog_b))) / u;
}

double clayton_hinv(double th, double u, double p) {
  if (std::abs(th) < 1e-10) return p;
  const double a = -std::log(u);
  const double inner = std::exp(th * a) * std::expm1(-th / (1 + th) * std::log(p));
  return std::exp(-std::log1p(inner) / th);
}

// ---------------------------------------------------------------- Gumbel

double gumbel_density(double th, double u, double v) {
  const double x = -std::log(u), y = -std::log(v);
  const double lx = std::log(x), ly = std::log(y);
  const double ls = logaddexp(th * lx, th * ly);
  const double r = std::exp(ls / th);
  return std::exp(-r + x + y + (th - 1) * (lx + ly) + (1 / th - 2) * ls) * (r + th - 1);
}
double gumbel_cdf(double th, double u, double v) {
  if (u <= 0 || v <= 0) return 0.0;
  if (u >= 1) return v;
  if (v >= 1) return u;
  const double x = -std::log(u), y = -std::log(v);
  const double ls = logaddexp(th * std::log(x), th * std::log(y));
  return std::exp(-std::exp(ls / th));
}
double gumbel_h(double th, double u, double v) {
  if (v <= 0) return 0.0;
  if (v >= 1) return 1.0;
  const double x = -std::log(u), y = -std::log(v);
  const double lx = std::log(x);
  const double ls = logaddexp(th * lx, th * std::log(y));
  const double r = std::exp(ls / th);
  return std::exp(-r + x + (th - 1) * lx + (1 / th - 1) * ls);
}

// ---------------------------------------------------------------- Joe

double joe_density(double th, double u, double v) {
  const double ab = 1 - u, bb = 1 - v;
  const double pa = std::pow(ab, th), pb = std::pow(bb, th);
  const double s = pa + pb - pa * pb;
  return std::pow(ab, th - 1) * std::pow(bb, th - 1) * std::pow(s, 1 / th - 2) * (s + th - 1);
}
double joe_cdf(double th, double u, double v) {
  if (u <= 0 || v <= 0) return 0.0;
  const double pa = std::pow(1 - u, th), pb = std::pow(1 - v, th);
  return 1 - std::pow(pa + pb - pa * pb, 1 / th);
}
double joe_h(double th, double u, double v) {
  if (v <= 0) return 0.0;
  if (v >= 1) return 1.0;
  const double ab = 1 - u;
  const double pa = std::pow(ab, th), pb = std::pow(1 - v, th);
  const double s = pa + pb - pa * pb;
  return std::pow(s, 1 / th - 1) * std::pow(ab, th - 1) * (1 - pb);
}

// ---------------------------------------------------------------- Galambos
//
// Extreme-value form C = exp(-ℓ(x,y)), ℓ = x + y - g, g = (x^-θ + y^-θ)^(-1/θ).

struct GalambosTerms {
  double g, gx, gy, gxy;
};
GalambosTerms galambos_terms(double th, double x, double y) {
  const double lx = std::log(x), ly = std::log(y);
  const double lt = logaddexp(-th * lx, -th * ly);
  GalambosTerms t;
  t.g = std::exp(-lt / th);
  t.gx = std::exp(-(th + 1) * lx - (1 / th + 1) * lt);
  t.gy = std::exp(-(th + 1) * ly - (1 / th + 1) * lt);
  t.gxy = (1 + th) * std::exp(-(th + 1) * (lx + ly) - (1 / th + 2) * lt);
  return t;
}
double galambos_density(double th, double u, double v) {
  if (std::abs(th) < 1e-12) return 1.0;
  const GalambosTerms t = galambos_terms(th, -std::log(u), -std::log(v));
  return std::exp(t.g) * ((1 - t.gx) * (1 - t.gy) + t.gxy);
}
double galambos_cdf(double th, double u, double v) {
  if (u <= 0 || v <= 0) return 0.0;
  if (u >= 1) return v;
  if (v >= 1) return u;
  if (std::abs(th) < 1e-12) return u * v;
  const GalambosTerms t = galambos_terms(th, -std::log(u), -std::log(v));
  return u * v * std::exp(t.g);
}
double galambos_h(double th, double u, double v) {
  if (v <= 0) return 0.0;
  if (v >= 1) return 1.0;
  if (std::abs(th) < 1e-12) return v;
  const GalambosTerms t = galambos_terms(th, -std::log(u), -std::log(v));
  return v * std::exp(t.g) * (1 - t.gx);
}

// ---------------------------------------------------------------- Hüsler-Reiss
//
// ℓ(x,y) = x Φ(z1) + y Φ(z2), z1 = 1/θ + θ/2 log(x/y), z2 = 1/θ + θ/2 log(y/x).
// The φ terms of ∂ℓ/∂x cancel, leaving ℓ_x = Φ(z1), ℓ_xy = -θ/(2y) φ(z1).

double hr_density(double th, double u, double v) {
  if (std::abs(th) < 1e-12) return 1.0;
  const double x = -std::log(u), y = -std::log(v);
  const double lr = std::log(x / y);
  const double z1 = 1 / th + 0.5 * th * lr, z2 = 1 / th - 0.5 * th * lr;
  const double ell = x * norm_cdf(z1) + y * norm_cdf(z2);
  return std::exp(-ell + x + y) * (norm_cdf(z1) * norm_cdf(z2) + th / (2 * y) * norm_pdf(z1));
}
double hr_cdf(double th, double u, double v) {
  if (u <= 0 || v <= 0) return 0.0;
  if (u >= 1) return v;
  if (v >= 1) return u;
  if (std::abs(th) < 1e-12) return u * v;
  const double x = -std::log(u), y = -std::log(v);
  const double lr = std::log(x / y);
  const double z1 = 1 / th + 0.5 * th * lr, z2 = 1 / th - 0.5 * th * lr;
  return std::exp(-(x * norm_cdf(z1) + y * norm_cdf(z2)));
}
double hr_h(double th, double u, double v) {
  if (v <= 0) return 0.0;
  if (v >= 1) return 1.0;
  if (std::abs(th) < 1e-12) return v;
  const double x = -std::log(u), y = -std::log(v);
  const double lr = std::log(x / y);
  const double z1 = 1 / th + 0.5 * th * lr, z2 = 1 / th - 0.5 * th * lr;
  return std::exp(-(x * norm_cdf(z1) + y * norm_cdf(z2)) + x) * norm_cdf(z1);
}

// ---------------------------------------------------------------- Gumbel-Barnett

double gb_density(double th, double u, double v) {
  const double d = 1 - th, lu = std::log(u), lv = std::log(v);
  return std::exp(-d * lu * lv) * ((1 - d * lu) * (1 - d * lv) - d);
}
double gb_cdf(double th, double u, double v) {
  if (u <= 0 || v <= 0) return 0.0;
  return u * v * std::exp(-(1 - th) * std::log(u) * std::log(v));
}
double gb_h(double th, double u, double v) {
  if (v <= 0) return 0.0;
  const double d = 1 - th, lu = std::log(u), lv = std::log(v);
  return v * std::exp(-d * lu * lv) * (1 - d * lv);
}

// ---------------------------------------------------------------- Archimedean pair
//
// Both two-parameter families are Archimedean, C = ψ(φ(u) + φ(v)), with
// c = ψ''(s) φ'(u) φ'(v). Generators are rescaled so that the independence
// limit is a regular point of the formulas.

struct Gen {
  double phi;   // φ(u)
  double dphi;  // φ'(u)
};
struct Inv {
  bool valid;
  double psi, d1, d2;  // ψ(s), ψ'(s), ψ''(s)
};

// BB1-type: φ(u) = (expm1(θ a)/θ)^δ,  ψ(s) = (1 + θ s^{1/δ})^{-1/θ}.
Gen bb1_gen(double th, double de, double u) {
  const double a = -std::log(u);
  const double e = std::abs(th) < 1e-12 ? a : std::expm1(th * a) / th;
  const double de_ = -std::exp((th + 1) * a);  // d e / du
  return {std::pow(e, de), de * std::pow(e, de - 1) * de_};
}
Inv bb1_inv(double th, double de, double s) {
  const double r = std::pow(s, 1 / de);
  const double r1 = (1 / de) * std::pow(s, 1 / de - 1);
  const double r2 = (1 / de) * (1 / de - 1) * std::pow(s, 1 / de - 2);
  const double q = 1 + th * r;
  if (!(q > 0)) return {false, 0, 0, 0};
  const double lq = std::abs(th) < 1e-12 ? r : std::log1p(th * r) / th;
  const double p = std::exp(-lq);
  return {true, p, -p / q * r1, (1 + th) * p / (q * q) * r1 * r1 - p / q * r2};
}

// BB3-type: φ(u) = expm1(δ x^θ)/δ with x = -log u,  ψ(s) = exp(-(log1p(δ s)/δ)^{1/θ}).
Gen bb3_gen(double th, double de, double u) {
  const double x = -std::log(u);
  const double xt = std::pow(x, th);
  const double phi = std::abs(de) < 1e-12 ? xt : std::expm1(de * xt) / de;
  return {phi, -std::exp(de * xt) * th * std::pow(x, th - 1) / u};
}
Inv bb3_inv(double th, double de, double s) {
  const double w = 1 + de * s;
  if (!(w > 0)) return {false, 0, 0, 0};
  const double q = std::abs(de) < 1e-12 ? s : std::log1p(de * s) / de;
  const double q1 = 1 / w, q2 = -de / (w * w);
  const double k = std::pow(q, 1 / th);
  const double kq = (1 / th) * std::pow(q, 1 / th - 1);
  const double kqq = (1 / th) * (1 / th - 1) * std::pow(q, 1 / th - 2);
  const double e = std::exp(-k);
  return {true, e, -e * kq * q1, e * ((kq * q1) * (kq * q1) - kqq * q1 * q1 - kq * q2)};
}

template <typename GenF, typename InvF>
double arch_density(GenF gen, InvF inv, double u, double v) {
  const Gen gu = gen(u), gv = gen(v);
  const Inv iv = inv(gu.phi + gv.phi);
  if (!iv.valid) return 0.0;
  return iv.d2 * gu.dphi * gv.dphi;
}
template <typename GenF, typename InvF>
double arch_cdf(GenF gen, InvF inv, double u, double v) {
  if (u <= 0 || v <= 0) return 0.0;
  if (u >= 1) return v;
  if (v >= 1) return u;
  const Inv iv = inv(gen(u).phi + gen(v).phi);
  return iv.valid ? iv.psi : 0.0;
}
template <typename GenF, typename InvF>
double arch_h(GenF gen, InvF inv, double u, double v) {
  if (v <= 0) return 0.0;
  if (v >= 1) return 1.0;
  const Gen gu = gen(u);
  const Inv iv = inv(gu.phi + gen(v).phi);
  return iv.valid ? iv.d1 * gu.dphi : 0.0;
}

}  // namespace

double density_raw(Family f, const double* th, double u, double v) {
  switch (f) {
    case Family::fgm: return fgm_density(th[0], u, v);
    case Family::clayton: return clayton_derivs(th[0], u, v, 0).value;
    case Family::gumbel:
      if (th[0] == 1.0) return 1.0;
      return gumbel_density(th[0], u, v);
    case Family::joe:
      if (th[0] == 1.0) return 1.0;
      return joe_density(th[0], u, v);
    case Family::galambos: return galambos_density(th[0], u, v);
    case Family::husler_reiss: return hr_density(th[0], u, v);
    case Family::gumbel_barnett: return gb_density(th[0], u, v);
    case Family::bb1: {
      const double t = th[0], d = th[1];
      return arch_density([&](double x) { return bb1_gen(t, d, x); },
                          [&](double s) { return bb1_inv(t, d, s); }, u, v);
    }
    case Family::bb3: {
      const double t = th[0], d = th[1];
      return arch_density([&](double x) { return bb3_gen(t, d, x); },
                          [&](double s) { return bb3_inv(t, d, s); }, u, v);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double cdf_raw(Family f, const double* th, double u, double v) {
  switch (f) {
    case Family::fgm: return fgm_cdf(th[0], u, v);
    case Family::clayton: return clayton_cdf(th[0], u, v);
    case Family::gumbel: return gumbel_cdf(th[0], u, v);
    case Family::joe: return joe_cdf(th[0], u, v);
    case Family::galambos: return galambos_cdf(th[0], u, v);
    case Family::husler_reiss: return hr_cdf(th[0], u, v);
    case Family::gumbel_barnett: return gb_cdf(th[0], u, v);
    case Family::bb1: {
      const double t = th[0], d = th[1];
      return arch_cdf([&](double x) { return bb1_gen(t, d, x); },
                      [&](double s) { return bb1_inv(t, d, s); }, u, v);
    }
    case Family::bb3: {
      const double t = th[0], d = th[1];
      return arch_cdf([&](double x) { return bb3_gen(t, d, x); },
                      [&](double s) { return bb3_inv(t, d, s); }, u, v);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double hfunc_raw(Family f, const double* th, double u, double v) {
  switch (f) {
    case Family::fgm: return fgm_h(th[0], u, v);
    case Family::clayton: return clayton_h(th[0], u, v);
    case Family::gumbel: return gumbel_h(th[0], u, v);
    case Family::joe: return joe_h(th[0], u, v);
    case Family::galambos: return galambos_h(th[0], u, v);
    case Family::husler_reiss: return hr_h(th[0], u, v);
    case Family::gumbel_barnett: return gb_h(th[0], u, v);
    case Family::bb1: {
      const double t = th[0], d = th[1];
      return arch_h([&](double x) { return bb1_gen(t, d, x); },
                    [&](double s) { return bb1_inv(t, d, s); }, u, v);
    }
    case Family::bb3: {
      const double t = th[0], d = th[1];
      return arch_h([&](double x) { return bb3_gen(t, d, x); },
                    [&](double s) { return bb3_inv(t, d, s); }, u, v);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double fd_floor(Family f, int k) {
  switch (f) {
    case Family::galambos:
    case Family::husler_reiss: return 0.0;
    case Family::bb1: return k == 0 ? 0.0 : -kInf;
    case Family::bb3: return k == 1 ? 0.0 : -kInf;
    default: return -kInf;
  }
}

bool has_analytic_derivs(Family f) { return f == Family::fgm || f == Family::clayton; }

DensityDerivs analytic_derivs(Family f, double th, double u, double v, int order) {
  if (f == Family::clayton) return clayton_derivs(th, u, v, order);
  DensityDerivs out;
  const double s = (1.0 - 2.0 * u) * (1.0 - 2.0 * v);
  out.value = 1.0 + th * s;
  out.grad[0] = s;
  out.hess[0] = 0.0;
  return out;
}

double analytic_du(Family f, double th, double u, double v, int margin) {
  if (f == Family::fgm) return -2.0 * th * (1.0 - 2.0 * (margin == 0 ? v : u));
  const double x = margin == 0 ? u : v, y = margin == 0 ? v : u;
  const DensityDerivs d = clayton_derivs(th, u, v, 0);
  if (d.value == 0.0) return 0.0;
  double lu = 0;
  clayton_logdens_du(th, x, y, &lu, nullptr);
  return d.value * lu;
}

double analytic_dtheta_du(Family f, double th, double u, double v, int margin) {
  if (f == Family::fgm) return -2.0 * (1.0 - 2.0 * (margin == 0 ? v : u));
  const double x = margin == 0 ? u : v, y = margin == 0 ? v : u;
  const DensityDerivs d = clayton_derivs(th, u, v, 1);
  if (d.value == 0.0) return 0.0;
  double lu = 0, luth = 0;
  clayton_logdens_du(th, x, y, &lu, &luth);
  // c_θu = c (L_θ L_u + L_uθ) with c L_θ = c_θ.
  return d.grad[0] * lu + d.value * luth;
}

bool has_closed_inverse(Family f) { return f == Family::fgm || f == Family::clayton; }

double hinv_closed(Family f, double th, double u, double p) {
  if (f == Family::clayton) return clayton_hinv(th, u, p);
  const double a = th * (1.0 - 2.0 * u);
  if (std::abs(a) < 1e-12) return p;
  // Smaller root of a v² - (1+a) v + p = 0.
  return 2.0 * p / ((1.0 + a) + std::sqrt((1.0 + a) * (1.0 + a) - 4.0 * a * p));
}

}  // namespace dualcop::detail
