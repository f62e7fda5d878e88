#include "ras/infocalc.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ras/quadrature.hpp"

namespace ras {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kLn2 = std::log(2.0);

double lse2(double a, double b) {
  if (a < b) std::swap(a, b);
  if (b == -kInf) return a;
  return a + std::log1p(std::exp(b - a));
}

// log2 of a sum given the addends' log2 values.
double log2_sum(const std::vector<double>& ls) {
  double m = -kInf;
  for (double l : ls) m = std::max(m, l);
  if (m == -kInf) return m;
  double acc = 0.0;
  for (double l : ls) acc += std::exp2(l - m);
  return m + std::log2(acc);
}

struct Peak {
  double x = 0, f = -kInf;
};

// Golden-section maximum of a unimodal-enough objective; both halves of [0,1]
// are searched separately since E0 - gamma R can peak at either end.
template <class F>
Peak maximize_unit(F&& f, double tol) {
  constexpr double invphi = 0.6180339887498948482;
  Peak best;
  auto consider = [&](double x, double fx) {
    if (fx > best.f) best = {x, fx};
  };
  consider(0.0, f(0.0));
  consider(0.5, f(0.5));
  consider(1.0, f(1.0));
  for (double a0 : {0.0, 0.5}) {
    double a = a0, b = a0 + 0.5;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = f(d);
      }
    }
    consider(c, fc);
    consider(d, fd);
  }
  return best;
}

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

// E0 for BIAWGN, computed node-wise in the log domain so small sigma cannot
// overflow the P(y|0)^{s-1} factor. The Gaussian normalizers cancel because
// the total exponent s(1+gamma) - 1 vanishes.
double e0_biawgn(double sigma, double p, double gamma) {
  const double s = 1.0 / (1.0 + gamma);
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  const double lnp = p > 0.0 ? std::log(p) : -kInf;
  const double lnq = p < 1.0 ? std::log1p(-p) : -kInf;
  auto ln_f = [&](double y) {
    double lp0 = -(y - 1.0) * (y - 1.0) * inv2s2;
    double lp1 = -(y + 1.0) * (y + 1.0) * inv2s2;
    double ln_b = lse2(lnq + s * lp0, lnp + s * lp1);
    return (s - 1.0) * lp0 + gamma * ln_b;
  };
  auto ln_mean = [&](int order) {
    const GaussHermiteRule& r = gauss_hermite(order);
    const double scale = std::sqrt(2.0) * sigma;
    double m = -kInf;
    std::vector<double> terms(r.x.size());
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      terms[i] = std::log(r.w[i]) + ln_f(1.0 + scale * r.x[i]);
      m = std::max(m, terms[i]);
    }
    double acc = 0.0;
    for (double t : terms) acc += std::exp(t - m);
    return m + std::log(acc) - 0.5 * std::log(M_PI);
  };
  double prev = ln_mean(96);
  for (int order : {144, 216, 324}) {
    double cur = ln_mean(order);
    if (std::abs(cur - prev) <= 1e-12 * std::max(1.0, std::abs(cur))) return -cur / kLn2;
    prev = cur;
  }
  return -prev / kLn2;
}

}  // namespace

double entropy(double theta) {
  check_prob(theta, "entropy: theta");
  if (theta <= 0.0 || theta >= 1.0) return 0.0;
  return -theta * std::log2(theta) - (1.0 - theta) * std::log2(1.0 - theta);
}

PartialMutualInfo partial_mutual_info(const ChannelModel& ch, double p) {
  check_prob(p, "partial_mutual_info: p");
  PartialMutualInfo r;
  r.p = p;
  r.boundary = p == 0.0 || p == 1.0;
  if (ch.discrete()) {
    double i0 = 0.0, i1 = 0.0;
    for (auto [p0, p1] : ch.output_pmf()) {
      double py = (1.0 - p) * p0 + p * p1;
      if (p0 > 0.0) i0 += py > 0.0 ? p0 * std::log2(p0 / py) : kInf;
      if (p1 > 0.0) i1 += py > 0.0 ? p1 * std::log2(p1 / py) : kInf;
    }
    r.i0 = i0;
    r.i1 = i1;
  } else {
    const double sigma = ch.sigma();
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const double lnp = p > 0.0 ? std::log(p) : -kInf;
    const double lnq = p < 1.0 ? std::log1p(-p) : -kInf;
    auto ratio = [&](double y, bool one) {
      double lp0 = -(y - 1.0) * (y - 1.0) * inv2s2;
      double lp1 = -(y + 1.0) * (y + 1.0) * inv2s2;
      double lpy = lse2(lnq + lp0, lnp + lp1);
      return ((one ? lp1 : lp0) - lpy) / kLn2;
    };
    r.i0 = gauss_expect_adaptive(1.0, sigma, [&](double y) { return ratio(y, false); });
    r.i1 = gauss_expect_adaptive(-1.0, sigma, [&](double y) { return ratio(y, true); });
  }
  // Terms with zero coefficient are dropped: the other divergence can be
  // infinite at the boundary, and 0 * inf must read as 0 here.
  double acc = 0.0;
  if (p < 1.0) acc += (1.0 - p) * r.i0;
  if (p > 0.0) acc += p * r.i1;
  r.i = acc;
  return r;
}

double rho(const WeightProfile& w) {
  if (w.k < 1) throw std::invalid_argument("rho: k must be >= 1");
  double prod = 1.0;
  for (int wi : w.weights) {
    if (wi < 0 || wi > w.k) throw std::invalid_argument("rho: weight outside [0, k]");
    prod *= 1.0 - 2.0 * wi / (w.k + 1.0);
  }
  return 0.5 * (1.0 - prod);
}

RhoBounds rho_bounds(int k, int t_support) {
  if (k < 1) throw std::invalid_argument("rho_bounds: k must be >= 1");
  if (t_support < 1) throw std::invalid_argument("rho_bounds: support must be >= 1");
  double q = std::pow((k - 1.0) / (k + 1.0), t_support);
  return {0.5 - 0.5 * q, 0.5 + 0.5 * q, 1.0 / (k + 1.0)};
}

double gallager_e0(const ChannelModel& ch, double p, double gamma) {
  check_prob(p, "gallager_e0: p");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("gallager_e0: gamma must lie in [0, 1]");
  if (!ch.discrete()) return e0_biawgn(ch.sigma(), p, gamma);
  const double s = 1.0 / (1.0 + gamma);
  double sum = 0.0;
  for (auto [p0, p1] : ch.output_pmf()) {
    double b = (1.0 - p) * std::pow(p0, s) + p * std::pow(p1, s);
    sum += std::pow(p0, s) * std::pow(b, gamma);
  }
  return -std::log2(sum);
}

ExponentResult partial_error_exponent(const ChannelModel& ch, double p, double rate) {
  check_prob(p, "partial_error_exponent: p");
  if (!(rate >= 0.0)) throw std::invalid_argument("partial_error_exponent: rate must be >= 0");
  Peak best = maximize_unit(
      [&](double g) { return gallager_e0(ch, p, g) - g * rate; }, 1e-8);
  if (!(best.f > 0.0)) return {0.0, 0.0, p, rate};
  return {best.f, best.x, p, rate};
}

namespace {

BoundReport make_report(int k, int n_minus_k, int m, double h_source, double delta) {
  if (k < 1 || n_minus_k < 1) throw std::invalid_argument("bound: k and n-k must be >= 1");
  if (m < 0) throw std::invalid_argument("bound: m must be >= 0");
  check_prob(h_source, "bound: source entropy");
  if (!(delta >= 0.0)) throw std::invalid_argument("bound: delta must be >= 0");
  BoundReport r;
  r.k = k;
  r.n_minus_k = n_minus_k;
  r.m = m;
  r.t_split = int(std::floor(std::sqrt(m + 1.0) + 1e-9));
  r.delta = delta;
  r.h_source = h_source;
  r.rho1 = 1.0 / (k + 1.0);
  return r;
}

void finish_report(BoundReport& r) {
  std::vector<double> ls;
  for (auto& [name, l] : r.terms_log2) {
    ls.push_back(l);
    r.terms.emplace_back(name, std::exp2(l));
  }
  r.total_log2 = log2_sum(ls);
  r.total = std::exp2(r.total_log2);
  r.vacuous = r.total_log2 > 0.0;
}

}  // namespace

BoundReport theorem1_fer_bound(int k, int n_minus_k, int m, const ChannelModel& ch,
                               double h_source, double delta) {
  BoundReport r = make_report(k, n_minus_k, m, h_source, delta);
  const int t = r.t_split;
  const double mp1 = m + 1.0;
  const double nk_total = mp1 * n_minus_k;
  const double q = std::pow((k - 1.0) / (k + 1.0), t);

  // Profiles with support > T look nearly uniform; charge them the full rate.
  const double rate_t = std::log1p(q) / kLn2 + k * (h_source + delta) / n_minus_k;
  r.rates["r_t"] = rate_t;
  double e_hi = partial_error_exponent(ch, 0.5, rate_t).e;
  r.terms_log2.emplace_back("support_gt_t", -nk_total * e_hi);

  // Few active blocks: bias at least rho1, but only ~ (m+1)^T such profiles.
  const double rate_1 = double(k) * t / nk_total;
  r.rates["r_1"] = rate_1;
  double e_lo = partial_error_exponent(ch, r.rho1, rate_1).e;
  double inner = n_minus_k * e_lo - std::log2(mp1) / mp1 - entropy(t / mp1) -
                 t * std::log2(k + 1.0) / mp1;
  r.terms_log2.emplace_back("support_le_t", -mp1 * inner);

  finish_report(r);
  return r;
}

BoundReport conv_first_error_bound(int k, int n_minus_k, int m, const ChannelModel& ch,
                                   double h_source, double delta) {
  BoundReport r = make_report(k, n_minus_k, m, h_source, delta);
  const int t = r.t_split;
  if (2 * t > m + 1)
    throw std::invalid_argument("conv_first_error_bound: memory too small for support split");
  const double mp1 = m + 1.0;
  const double nk_total = mp1 * n_minus_k;
  const double q = std::pow((k - 1.0) / (k + 1.0), t);

  const double rate_2 = 2.0 * t * k / nk_total;
  const double rate_3 = k * (h_source + delta) / n_minus_k + std::log1p(q) / kLn2;
  r.rates["r_2"] = rate_2;
  r.rates["r_3"] = rate_3;

  // tau indexes the last generator row whose window is already decoded; rows
  // past it contribute near-uniform bias, rows up to it at least rho1.
  std::vector<double> taus;
  for (int tau = t - 1; tau <= m - t; ++tau) {
    double alpha = (tau + 1) / mp1;
    Peak best = maximize_unit(
        [&](double g) {
          return alpha * gallager_e0(ch, r.rho1, g) +
                 (1.0 - alpha) * (gallager_e0(ch, 0.5, g) - g * rate_3);
        },
        1e-8);
    double e_mix = std::max(0.0, best.f);
    double inner = n_minus_k * e_mix - entropy(t / mp1) - double(k) * t / mp1;
    taus.push_back(-mp1 * inner);
  }
  r.terms_log2.emplace_back("first_error_tau_sum", log2_sum(taus));

  double e_lo = partial_error_exponent(ch, r.rho1, rate_2).e;
  double inner = n_minus_k * e_lo - std::log2(mp1) / mp1 - entropy(2.0 * t / mp1) -
                 2.0 * t * std::log2(k + 1.0) / mp1;
  r.terms_log2.emplace_back("support_le_2t", -mp1 * inner);

  finish_report(r);
  return r;
}

ShannonLimit shannon_limit(double rate, double theta) {
  if (!(rate > 0.0)) throw std::invalid_argument("shannon_limit: rate must be positive");
  if (!(theta > 0.0 && theta <= 0.5))
    throw std::invalid_argument("shannon_limit: theta must lie in (0, 1/2]");
  const double target = rate * entropy(theta);
  ShannonLimit out;
  if (target >= 1.0) {
    out.feasible = false;
    out.snr_db = out.ebn0_db = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  auto cap = [](double snr_db) {
    return ChannelModel::biawgn_from_snr_db(snr_db).capacity();
  };
  double lo = -60.0, hi = 60.0;
  for (int i = 0; i < 12 && cap(lo) >= target; ++i) lo -= 20.0;
  while (hi - lo > 1e-4) {
    double mid = 0.5 * (lo + hi);
    (cap(mid) >= target ? hi : lo) = mid;
  }
  out.snr_db = hi;
  out.ebn0_db = hi - 10.0 * std::log10(2.0 * target);
  return out;
}

SourceLimit source_limit(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("source_limit: rate must be positive");
  if (rate >= 1.0) return {0.5, rate > 1.0};
  double lo = 0.0, hi = 0.5;
  while (hi - lo > 1e-8) {
    double mid = 0.5 * (lo + hi);
    (entropy(mid) <= rate ? lo : hi) = mid;
  }
  return {lo, false};
}

}  // namespace ras
