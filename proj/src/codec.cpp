#include "ras/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ras {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double prior_llr(double theta, double cap) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("decode: theta must lie in [0, 1]");
  if (theta <= 0.0) return cap;
  if (theta >= 1.0) return -cap;
  return std::clamp(std::log((1.0 - theta) / theta), -cap, cap);
}

void check_config(const DecoderConfig& cfg) {
  if (cfg.max_iterations < 1)
    throw std::invalid_argument("decode: max_iterations must be >= 1");
  if (!(cfg.convergence_threshold > 0.0))
    throw std::invalid_argument("decode: convergence_threshold must be positive");
  if (!(cfg.llr_cap > 0.0)) throw std::invalid_argument("decode: llr_cap must be positive");
  if (cfg.pinned_tail_blocks < 0)
    throw std::invalid_argument("decode: pinned_tail_blocks must be >= 0");
}

void check_stream_blocks(const std::vector<BitVector>& blocks, int k, const char* who) {
  for (const BitVector& b : blocks)
    if (int(b.size()) != k)
      throw std::length_error(std::string(who) + ": message block length != k");
}

// Running log-sum-exp; -inf addends are zero mass and are skipped.
struct LseAcc {
  double m = kNegInf, s = 0.0;

  void add(double x) {
    if (x == kNegInf) return;
    if (x <= m) {
      s += std::exp(x - m);
    } else {
      s = s * std::exp(m - x) + 1.0;
      m = x;
    }
  }
  double value() const { return m == kNegInf ? kNegInf : m + std::log(s); }
};

}  // namespace

BitVector encode_block(const BlockRaSGenerator& g, const BitVector& u) {
  if (long(u.size()) != g.message_len())
    throw std::length_error("encode_block: message length mismatch");
  BitVector x = block_parity(g, u);
  BitVector cw(u.size() + x.size());
  for (std::size_t i = 0; i < u.size(); ++i) cw.set(i, u.get(i));
  for (std::size_t i = 0; i < x.size(); ++i) cw.set(u.size() + i, x.get(i));
  return cw;
}

std::vector<BitVector> encode_conv_stream(const ConvRaSGenerator& gen,
                                          const std::vector<BitVector>& message_blocks) {
  check_stream_blocks(message_blocks, gen.k, "encode_conv_stream");
  const int b = int(message_blocks.size());
  std::vector<std::vector<SparseGenBlock>> rows;
  if (!gen.time_invariant) {
    rows.reserve(b);
    for (int i = 0; i < b; ++i) rows.push_back(gen.row_band(i));
  }
  std::vector<BitVector> coded(b);
  for (int t = 0; t < b; ++t) {
    coded[t] = BitVector(gen.n_k);
    for (int d = 0; d <= std::min(gen.m, t); ++d) {
      int i = t - d;
      const SparseGenBlock& blk = gen.time_invariant ? gen.band[d] : rows[i][d];
      const BitVector& u = message_blocks[i];
      for (int c = 0; c < gen.n_k; ++c) {
        int32_t r = blk.cols[c];
        if (r >= 0 && u.get(r)) coded[t].flip(c);
      }
    }
  }
  return coded;
}

std::vector<BitVector> terminate(const ConvRaSGenerator& gen,
                                 const std::vector<BitVector>& message_blocks) {
  std::vector<BitVector> padded = message_blocks;
  for (int d = 0; d < gen.m; ++d) padded.emplace_back(gen.k);
  return encode_conv_stream(gen, padded);
}

BlockRaSGenerator unroll_conv(const ConvRaSGenerator& gen, int b) {
  if (b < 1) throw std::invalid_argument("unroll_conv: need at least one block");
  BlockRaSGenerator g;
  g.k = gen.k;
  g.n_k = gen.n_k;
  g.m = b - 1;
  g.seed = gen.seed;
  SparseGenBlock empty;
  empty.k = gen.k;
  empty.cols.assign(gen.n_k, SparseGenBlock::kNone);
  g.blocks.assign(size_t(b) * b, empty);
  for (int i = 0; i < b; ++i) {
    std::vector<SparseGenBlock> band = gen.row_band(i);
    for (int d = 0; d <= gen.m && i + d < b; ++d) g.block(i, i + d) = band[d];
  }
  return g;
}

DecodeResult map_decode_exhaustive(const BlockRaSGenerator& g, double theta,
                                   const LlrVector& llr_sys, const LlrVector& llr_par) {
  const int kk = g.message_len();
  if (kk > 20) throw std::invalid_argument("map_decode_exhaustive: K > 20 refused");
  if (long(llr_sys.size()) != kk || long(llr_par.size()) != g.parity_len())
    throw std::length_error("map_decode_exhaustive: LLR length mismatch");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("map_decode_exhaustive: theta must lie in [0, 1]");
  const double lp1 = theta > 0.0 ? std::log(theta) : kNegInf;
  const double lp0 = theta < 1.0 ? std::log1p(-theta) : kNegInf;

  double best = kNegInf;
  uint32_t best_u = 0;
  std::vector<LseAcc> acc0(kk), acc1(kk);
  BitVector u(kk);
  for (uint32_t word = 0; word < (uint32_t(1) << kk); ++word) {
    for (int i = 0; i < kk; ++i) u.set(i, (word >> (kk - 1 - i)) & 1u);
    double score = 0.0;
    for (int i = 0; i < kk; ++i)
      score += u.get(i) ? lp1 : lp0 + llr_sys[i];
    BitVector x = block_parity(g, u);
    for (long j = 0; j < g.parity_len(); ++j)
      if (!x.get(j)) score += llr_par[j];
    if (score > best) {
      best = score;
      best_u = word;
    }
    for (int i = 0; i < kk; ++i) (u.get(i) ? acc1[i] : acc0[i]).add(score);
  }

  DecodeResult res;
  res.estimate = BitVector(kk);
  for (int i = 0; i < kk; ++i) res.estimate.set(i, (best_u >> (kk - 1 - i)) & 1u);
  res.posterior_llrs.resize(kk);
  for (int i = 0; i < kk; ++i) res.posterior_llrs[i] = acc0[i].value() - acc1[i].value();
  res.converged = true;
  res.iterations_used = 0;
  return res;
}

namespace {

// Shared check-node kernel: exact box-plus via the tanh rule, with the
// half-edge channel term as the 0th input.
void box_plus_checks(const std::vector<int32_t>& check_off, const std::vector<double>& v2c,
                     const std::vector<double>& tanh_ch, std::vector<double>& c2v,
                     int first_check, int last_check, double cap, std::vector<double>& tv,
                     std::vector<double>& fwd) {
  constexpr double kTanhMax = 1.0 - 1e-12;
  for (int chk = first_check; chk < last_check; ++chk) {
    int off = check_off[chk], deg = check_off[chk + 1] - off;
    if (deg == 0) continue;
    if (int(tv.size()) < deg) {
      tv.resize(deg);
      fwd.resize(deg + 1);
    }
    for (int i = 0; i < deg; ++i) tv[i] = std::tanh(0.5 * v2c[off + i]);
    fwd[0] = tanh_ch[chk];
    for (int i = 0; i < deg; ++i) fwd[i + 1] = fwd[i] * tv[i];
    double bwd = 1.0;
    for (int i = deg - 1; i >= 0; --i) {
      double x = std::clamp(fwd[i] * bwd, -kTanhMax, kTanhMax);
      c2v[off + i] = std::clamp(2.0 * std::atanh(x), -cap, cap);
      bwd *= tv[i];
    }
  }
}

}  // namespace

DecodeResult bp_decode_block(const BlockRaSGenerator& g, double theta,
                             const LlrVector& llr_sys, const LlrVector& llr_par,
                             const DecoderConfig& cfg) {
  check_config(cfg);
  const int kk = g.message_len(), np = g.parity_len();
  if (long(llr_sys.size()) != kk || long(llr_par.size()) != np)
    throw std::length_error("bp_decode_block: LLR length mismatch");
  const double cap = cfg.llr_cap;
  const double prior = prior_llr(theta, cap);

  // CSR by check, then per-variable edge lists.
  std::vector<int32_t> edge_var, check_off{0};
  for (int j = 0; j <= g.m; ++j)
    for (int t = 0; t < g.n_k; ++t) {
      for (int i = 0; i <= g.m; ++i) {
        int32_t r = g.block(i, j).cols[t];
        if (r >= 0) edge_var.push_back(i * g.k + r);
      }
      check_off.push_back(int32_t(edge_var.size()));
    }
  std::vector<int32_t> var_off(kk + 1, 0), var_edges(edge_var.size());
  for (int32_t v : edge_var) ++var_off[v + 1];
  for (int v = 0; v < kk; ++v) var_off[v + 1] += var_off[v];
  {
    std::vector<int32_t> fill(var_off.begin(), var_off.end() - 1);
    for (std::size_t e = 0; e < edge_var.size(); ++e) var_edges[fill[edge_var[e]]++] = int32_t(e);
  }

  std::vector<double> intrinsic(kk), posterior(kk), v2c(edge_var.size()), c2v(edge_var.size(), 0.0);
  std::vector<double> tanh_ch(np);
  for (int j = 0; j < np; ++j) tanh_ch[j] = std::tanh(0.5 * std::clamp(llr_par[j], -cap, cap));
  for (int v = 0; v < kk; ++v) {
    intrinsic[v] = prior + llr_sys[v];
    posterior[v] = intrinsic[v];
  }
  for (std::size_t e = 0; e < edge_var.size(); ++e)
    v2c[e] = std::clamp(intrinsic[edge_var[e]], -cap, cap);

  DecodeResult res;
  std::vector<double> tv, fwd;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    box_plus_checks(check_off, v2c, tanh_ch, c2v, 0, np, cap, tv, fwd);
    double maxd = 0.0;
    for (int v = 0; v < kk; ++v) {
      double sum = intrinsic[v];
      for (int idx = var_off[v]; idx < var_off[v + 1]; ++idx) sum += c2v[var_edges[idx]];
      maxd = std::max(maxd, std::abs(sum - posterior[v]));
      posterior[v] = sum;
      for (int idx = var_off[v]; idx < var_off[v + 1]; ++idx) {
        int32_t e = var_edges[idx];
        v2c[e] = std::clamp(sum - c2v[e], -cap, cap);
      }
    }
    res.iterations_used = it;
    if (maxd < cfg.convergence_threshold) {
      res.converged = true;
      break;
    }
  }
  res.estimate = BitVector(kk);
  for (int v = 0; v < kk; ++v) res.estimate.set(v, posterior[v] < 0.0);
  res.posterior_llrs = posterior;
  return res;
}

ConvBpDecoder::ConvBpDecoder(const ConvRaSGenerator& gen, int stream_blocks,
                             const DecoderConfig& cfg)
    : k_(gen.k), n_k_(gen.n_k), m_(gen.m), b_(stream_blocks), cfg_(cfg) {
  check_config(cfg);
  if (b_ < 0) throw std::invalid_argument("ConvBpDecoder: negative stream length");
  window_ = cfg.window_blocks > 0 ? cfg.window_blocks : 2 * (m_ + 1);
  if (window_ < m_ + 1)
    throw std::invalid_argument("ConvBpDecoder: window_blocks must be >= m+1");

  std::vector<std::vector<SparseGenBlock>> rows;
  if (!gen.time_invariant) {
    rows.reserve(b_);
    for (int i = 0; i < b_; ++i) rows.push_back(gen.row_band(i));
  }
  check_off_.assign(1, 0);
  check_off_.reserve(size_t(b_) * n_k_ + 1);
  for (int t = 0; t < b_; ++t) {
    for (int c = 0; c < n_k_; ++c) {
      for (int d = 0; d <= std::min(m_, t); ++d) {
        int i = t - d;
        const SparseGenBlock& blk = gen.time_invariant ? gen.band[d] : rows[i][d];
        if (blk.cols[c] >= 0) edge_var_.push_back(int32_t(i) * k_ + blk.cols[c]);
      }
      check_off_.push_back(int32_t(edge_var_.size()));
    }
  }
  const int vars = b_ * k_;
  var_off_.assign(vars + 1, 0);
  var_edges_.resize(edge_var_.size());
  for (int32_t v : edge_var_) ++var_off_[v + 1];
  for (int v = 0; v < vars; ++v) var_off_[v + 1] += var_off_[v];
  std::vector<int32_t> fill(var_off_.begin(), var_off_.end() - 1);
  for (std::size_t e = 0; e < edge_var_.size(); ++e) var_edges_[fill[edge_var_[e]]++] = int32_t(e);
}

void ConvBpDecoder::check_pass(int first_block, int last_block) {
  static thread_local std::vector<double> tv, fwd;
  box_plus_checks(check_off_, v2c_, tanh_ch_, c2v_, first_block * n_k_, last_block * n_k_,
                  cfg_.llr_cap, tv, fwd);
}

double ConvBpDecoder::var_pass(int first_block, int last_block) {
  double maxd = 0.0;
  for (int blk = first_block; blk < last_block; ++blk) {
    if (committed_[blk]) continue;
    for (int r = 0; r < k_; ++r) {
      int v = blk * k_ + r;
      double sum = prior_;
      for (int idx = var_off_[v]; idx < var_off_[v + 1]; ++idx) sum += c2v_[var_edges_[idx]];
      maxd = std::max(maxd, std::abs(sum - posterior_[v]));
      posterior_[v] = sum;
      for (int idx = var_off_[v]; idx < var_off_[v + 1]; ++idx) {
        int32_t e = var_edges_[idx];
        v2c_[e] = std::clamp(sum - c2v_[e], -cfg_.llr_cap, cfg_.llr_cap);
      }
    }
  }
  return maxd;
}

void ConvBpDecoder::commit(int block, bool pin_zero) {
  for (int r = 0; r < k_; ++r) {
    int v = block * k_ + r;
    double sat = (!pin_zero && posterior_[v] < 0.0) ? -cfg_.llr_cap : cfg_.llr_cap;
    posterior_[v] = sat;
    for (int idx = var_off_[v]; idx < var_off_[v + 1]; ++idx) v2c_[var_edges_[idx]] = sat;
  }
  committed_[block] = 1;
}

std::vector<DecodeResult> ConvBpDecoder::decode(double theta,
                                                const std::vector<LlrVector>& llr_stream) {
  if (int(llr_stream.size()) != b_)
    throw std::length_error("ConvBpDecoder: stream length mismatch");
  for (const LlrVector& l : llr_stream)
    if (int(l.size()) != n_k_) throw std::length_error("ConvBpDecoder: LLR block length != n-k");
  prior_ = prior_llr(theta, cfg_.llr_cap);

  v2c_.assign(edge_var_.size(), std::clamp(prior_, -cfg_.llr_cap, cfg_.llr_cap));
  c2v_.assign(edge_var_.size(), 0.0);
  posterior_.assign(size_t(b_) * k_, prior_);
  committed_.assign(b_, 0);
  tanh_ch_.resize(size_t(b_) * n_k_);
  for (int t = 0; t < b_; ++t)
    for (int c = 0; c < n_k_; ++c)
      tanh_ch_[size_t(t) * n_k_ + c] =
          std::tanh(0.5 * std::clamp(llr_stream[t][c], -cfg_.llr_cap, cfg_.llr_cap));

  std::vector<DecodeResult> res(b_);
  const int pinned = std::min(cfg_.pinned_tail_blocks, b_);
  const int live = b_ - pinned;
  for (int blk = live; blk < b_; ++blk) {
    commit(blk, true);
    res[blk].estimate = BitVector(k_);
    res[blk].converged = true;
    res[blk].posterior_llrs.assign(k_, cfg_.llr_cap);
  }

  auto snapshot = [&](int blk, int iters, bool conv) {
    DecodeResult& r = res[blk];
    r.estimate = BitVector(k_);
    r.posterior_llrs.resize(k_);
    for (int i = 0; i < k_; ++i) {
      double p = posterior_[blk * k_ + i];
      r.estimate.set(i, p < 0.0);
      r.posterior_llrs[i] = p;
    }
    r.iterations_used = iters;
    r.converged = conv;
  };
  auto iterate = [&](int bf, int bl) {
    for (int it = 1; it <= cfg_.max_iterations; ++it) {
      check_pass(bf, bl);
      if (var_pass(bf, bl) < cfg_.convergence_threshold) return std::pair{it, true};
    }
    return std::pair{cfg_.max_iterations, false};
  };

  if (window_ >= b_) {
    // Window covers everything: one joint BP pass, no sequential commits.
    auto [iters, conv] = iterate(0, b_);
    for (int blk = 0; blk < live; ++blk) snapshot(blk, iters, conv);
    return res;
  }
  for (int s = 0; s < live; ++s) {
    auto [iters, conv] = iterate(s, std::min(s + window_, b_));
    snapshot(s, iters, conv);
    commit(s, false);
  }
  return res;
}

std::vector<DecodeResult> bp_decode_sliding_window(const ConvRaSGenerator& gen, double theta,
                                                   const std::vector<LlrVector>& llr_stream,
                                                   const DecoderConfig& cfg) {
  ConvBpDecoder dec(gen, int(llr_stream.size()), cfg);
  return dec.decode(theta, llr_stream);
}

DecodeResult genie_aided_decode(const ConvRaSGenerator& gen, double theta,
                                const std::vector<LlrVector>& llr_stream,
                                const std::vector<BitVector>& true_blocks, int target) {
  const int b = int(llr_stream.size());
  if (int(true_blocks.size()) != b)
    throw std::length_error("genie_aided_decode: block count mismatch");
  if (target < 0 || target >= b)
    throw std::invalid_argument("genie_aided_decode: target out of range");
  check_stream_blocks(true_blocks, gen.k, "genie_aided_decode");
  for (const LlrVector& l : llr_stream)
    if (int(l.size()) != gen.n_k)
      throw std::length_error("genie_aided_decode: LLR block length != n-k");
  const double cap = kLlrCap;
  const double prior = prior_llr(theta, cap);

  std::vector<std::vector<SparseGenBlock>> rows;
  auto band_of = [&](int i) -> const std::vector<SparseGenBlock>& {
    if (gen.time_invariant) return gen.band;
    if (rows.empty()) {
      rows.resize(b);
      for (int r = 0; r < b; ++r) rows[r] = gen.row_band(r);
    }
    return rows[i];
  };

  LlrVector posterior(gen.k, prior);
  for (int t = target; t < b && t - target <= gen.m; ++t) {
    const SparseGenBlock& own = band_of(target)[t - target];
    for (int c = 0; c < gen.n_k; ++c) {
      int32_t r = own.cols[c];
      if (r < 0) continue;
      // Everything else on this check is revealed; fold its parity into the
      // sign of the channel observation.
      bool other = false;
      for (int d = 0; d <= std::min(gen.m, t); ++d) {
        int i = t - d;
        if (i == target) continue;
        int32_t r2 = band_of(i)[d].cols[c];
        if (r2 >= 0 && true_blocks[i].get(r2)) other = !other;
      }
      double l = std::clamp(llr_stream[t][c], -cap, cap);
      posterior[r] += other ? -l : l;
    }
  }

  DecodeResult res;
  res.estimate = BitVector(gen.k);
  for (int r = 0; r < gen.k; ++r) res.estimate.set(r, posterior[r] < 0.0);
  res.posterior_llrs = std::move(posterior);
  res.iterations_used = 1;
  res.converged = true;
  return res;
}

}  // namespace ras
