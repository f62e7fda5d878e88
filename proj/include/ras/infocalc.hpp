#pragma once

#include <map>
#include <string>
#include <vector>

#include "ras/bitvec.hpp"
#include "ras/channel.hpp"

namespace ras {

// Binary entropy in bits; entropy(0) = entropy(1) = 0.
double entropy(double theta);

// Mutual-information split under input bias p = P{X=1}: i0 and i1 are the
// per-symbol divergences D(P(y|x) || P_Y), so i = (1-p) i0 + p i1. boundary
// marks p in {0,1}, where one conditional leaves the output support.
struct PartialMutualInfo {
  double p = 0;
  double i0 = 0;
  double i1 = 0;
  double i = 0;
  bool boundary = false;
};

PartialMutualInfo partial_mutual_info(const ChannelModel& ch, double p);

// Superposition bias of a weight profile: the probability that a parity
// column with i.i.d. uniform weight-<=1 block columns sums to 1 given the
// per-block message weights w. Satisfies 1-2 rho = prod (1 - 2 w_i/(k+1)).
double rho(const WeightProfile& w);

struct RhoBounds {
  double lower = 0;   // 1/2 - ((k-1)/(k+1))^T / 2
  double upper = 0;   // 1/2 + ((k-1)/(k+1))^T / 2
  double rho1 = 0;    // bias of a single weight-1 block, 1/(k+1)
};

// Envelope of rho over profiles with at least T nonzero blocks.
RhoBounds rho_bounds(int k, int t_support);

// Gallager function E0(p, gamma) in bits with s = 1/(1+gamma):
//   -log2 sum_y P(y|0)^s [ (1-p) P(y|0)^s + p P(y|1)^s ]^gamma.
double gallager_e0(const ChannelModel& ch, double p, double gamma);

struct ExponentResult {
  double e = 0;           // max(0, max_gamma E0 - gamma R)
  double gamma_star = 0;  // maximizer in [0,1] (0 when clamped)
  double p = 0;           // arguments echoed for reporting
  double rate = 0;
};

// Partial error exponent E(p, R); positive iff R < i0(p) for non-degenerate
// channels.
ExponentResult partial_error_exponent(const ChannelModel& ch, double p, double rate);

// Union-bound report. Terms carry both linear and log2 values: the linear
// total underflows to 0 once exponents pass ~1e4, so comparisons across block
// lengths should use total_log2.
struct BoundReport {
  int k = 0, n_minus_k = 0, m = 0;
  int t_split = 0;  // support threshold T = floor(sqrt(m+1))
  double delta = 0;
  double h_source = 0;
  double rho1 = 0;
  std::map<std::string, double> rates;
  std::vector<std::pair<std::string, double>> terms;       // linear values
  std::vector<std::pair<std::string, double>> terms_log2;  // log2 values
  double total = 0;
  double total_log2 = 0;
  bool typicality_symbolic = true;  // epsilon/3 source-atypicality term, not evaluated
  bool vacuous = false;             // total exceeds 1
};

// Block-ensemble FER bound: a high-rate term for profiles with support > T
// and a low-rate term for support <= T, plus the symbolic epsilon/3 piece.
BoundReport theorem1_fer_bound(int k, int n_minus_k, int m, const ChannelModel& ch,
                               double h_source, double delta);

// Convolutional first-error bound at a fixed decision time: a tau-sum over
// the last fully-correct window position and a support-<=2T term.
BoundReport conv_first_error_bound(int k, int n_minus_k, int m, const ChannelModel& ch,
                                   double h_source, double delta);

struct ShannonLimit {
  double snr_db = 0;
  double ebn0_db = 0;
  bool feasible = true;
};

// Smallest binary-input AWGN SNR with C(snr) >= rate * entropy(theta);
// ebn0 = snr / (2 rate entropy(theta)). Infeasible when the target reaches
// one bit per use.
ShannonLimit shannon_limit(double rate, double theta);

struct SourceLimit {
  double theta_star = 0;
  bool clamped = false;  // rate > 1: any bias is compressible, returns 1/2
};

// Largest source bias theta with entropy(theta) <= rate, rate in bits per bit.
SourceLimit source_limit(double rate);

}  // namespace ras
