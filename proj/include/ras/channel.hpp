#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "ras/bitvec.hpp"
#include "ras/rng.hpp"

namespace ras {

// Saturation value for LLRs, natural-log units. Exceeds any finite-confidence
// LLR arising in the experiments while keeping box-plus arithmetic finite.
constexpr double kLlrCap = 30.0;

// Erasure mark inside Observation::y; only meaningful for the erasure kinds,
// where bit observations are restricted to {0,1}.
constexpr double kErased = -1.0;

enum class ChannelKind { kBsc, kBec, kBiAwgn, kNoiseless, kTotallyErased };

// Binary-input output-symmetric memoryless channel. BPSK maps bit b to the
// signal 1-2b, so P(y|1) = P(pi(y)|0) with pi(y) = -y for BIAWGN and
// pi(y) = 1-y for the discrete kinds (erasure is the fixed point).
class ChannelModel {
public:
  static ChannelModel bsc(double eps);
  static ChannelModel bec(double eta);
  static ChannelModel biawgn(double sigma);
  static ChannelModel biawgn_from_snr_db(double snr_db);  // SNR = 1/sigma^2
  static ChannelModel noiseless();
  static ChannelModel totally_erased();

  ChannelKind kind() const { return kind_; }
  double param() const { return param_; }  // eps | eta | sigma
  double sigma() const;                    // BIAWGN only
  double snr_db() const;                   // BIAWGN only

  // Mutual information I(X;Y) with uniform input, bits per use.
  double capacity() const;

  bool discrete() const { return kind_ != ChannelKind::kBiAwgn; }

  // Output alphabet of the discrete kinds as (P(y|0), P(y|1)) pairs.
  std::vector<std::pair<double, double>> output_pmf() const;

private:
  ChannelModel(ChannelKind k, double p) : kind_(k), param_(p) {}

  ChannelKind kind_;
  double param_;
};

struct Observation {
  ChannelKind kind = ChannelKind::kNoiseless;
  std::vector<double> y;  // bits as 0/1, kErased marks, or BIAWGN reals

  std::size_t size() const { return y.size(); }
};

using LlrVector = std::vector<double>;

Observation transmit(const BitVector& x, const ChannelModel& ch, Rng& rng);

// Per-symbol L = ln P(y|0)/P(y|1), clamped to [-kLlrCap, kLlrCap].
// TOTALLY_ERASED carries no channel information; it requires the source prior
// theta and returns the prior LLR ln((1-theta)/theta) for every symbol.
LlrVector llr(const ChannelModel& ch, const Observation& obs,
              std::optional<double> source_prior = std::nullopt);

inline double channel_capacity(const ChannelModel& ch) { return ch.capacity(); }

}  // namespace ras
