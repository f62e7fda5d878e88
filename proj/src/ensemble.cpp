#include "ras/ensemble.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

namespace ras {
namespace {

constexpr uint64_t kTagBand = 0x62616e64;  // band derivation stream

void check_dims(int k, int n_k, int m) {
  if (k < 1) throw std::invalid_argument("ensemble: k must be >= 1");
  if (n_k < 1) throw std::invalid_argument("ensemble: n_k must be >= 1");
  if (m < 0) throw std::invalid_argument("ensemble: m must be >= 0");
}

// Balanced band: deal each info bit's quota of column slots so repeat counts
// differ by at most one. Column groups of size <= k partition the band's
// columns; a bit lands at most once per group, which also bounds its count in
// any single block by ceil(n_k/k).
std::vector<SparseGenBlock> make_regular_band(int k, int n_k, int m, Rng& rng) {
  const int groups_per_block = (n_k + k - 1) / k;
  struct Group {
    int block, offset, size, remaining;
    std::vector<int32_t> rows;
  };
  std::vector<Group> groups;
  for (int d = 0; d <= m; ++d)
    for (int g = 0; g < groups_per_block; ++g) {
      int size = std::min(k, n_k - g * k);
      groups.push_back({d, g * k, size, size, {}});
    }

  const long total = long(m + 1) * n_k;
  const long base = total / k;
  const int rem = int(total % k);
  std::vector<int> order(k);
  for (int r = 0; r < k; ++r) order[r] = r;
  for (int r = k - 1; r > 0; --r) std::swap(order[r], order[rng.below(uint32_t(r) + 1)]);
  std::vector<long> quota(k, base);
  for (int i = 0; i < rem; ++i) ++quota[order[i]];

  // Largest quotas first, always into the fullest groups: this greedy meets
  // every quota whenever the capacities admit it.
  std::vector<int> rows(order.begin(), order.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [&](int a, int b) { return quota[a] > quota[b]; });
  std::vector<std::tuple<int, uint64_t, int>> ranked(groups.size());
  for (int r : rows) {
    for (size_t g = 0; g < groups.size(); ++g)
      ranked[g] = {-groups[g].remaining, rng.next(), int(g)};
    std::sort(ranked.begin(), ranked.end());
    if (quota[r] > long(groups.size()))
      throw std::logic_error("ensemble: quota exceeds group count");
    for (long i = 0; i < quota[r]; ++i) {
      Group& grp = groups[std::get<2>(ranked[i])];
      if (grp.remaining <= 0) throw std::logic_error("ensemble: group overfull");
      grp.rows.push_back(r);
      --grp.remaining;
    }
  }

  std::vector<SparseGenBlock> band(m + 1);
  for (int d = 0; d <= m; ++d) {
    band[d].k = k;
    band[d].cols.assign(n_k, SparseGenBlock::kNone);
  }
  for (Group& grp : groups) {
    for (size_t i = grp.rows.size(); i > 1; --i)
      std::swap(grp.rows[i - 1], grp.rows[rng.below(uint32_t(i))]);
    for (size_t i = 0; i < grp.rows.size(); ++i)
      band[grp.block].cols[grp.offset + i] = grp.rows[i];
  }
  return band;
}

std::vector<SparseGenBlock> make_band(int k, int n_k, int m, EnsembleMode mode, Rng rng) {
  if (mode == EnsembleMode::kRegular) return make_regular_band(k, n_k, m, rng);
  std::vector<SparseGenBlock> band;
  band.reserve(m + 1);
  for (int d = 0; d <= m; ++d) band.push_back(sample_block(k, n_k, rng));
  return band;
}

const char* mode_token(const ConvRaSGenerator& g) {
  if (g.time_invariant)
    return g.mode == EnsembleMode::kIid ? "conv_ti_iid" : "conv_ti_regular";
  return g.mode == EnsembleMode::kIid ? "conv_tv_iid" : "conv_tv_regular";
}

void write_block_line(std::ostream& os, const SparseGenBlock& b) {
  for (int j = 0; j < b.n_k(); ++j) {
    if (j) os << ' ';
    os << b.cols[j];
  }
  os << '\n';
}

SparseGenBlock read_block_line(std::istream& is, int k, int n_k) {
  SparseGenBlock b;
  b.k = k;
  b.cols.resize(n_k);
  for (int j = 0; j < n_k; ++j) {
    if (!(is >> b.cols[j])) throw std::invalid_argument("generator file: truncated block line");
    if (b.cols[j] < SparseGenBlock::kNone || b.cols[j] >= k)
      throw std::invalid_argument("generator file: column index out of range");
  }
  return b;
}

}  // namespace

SparseGenBlock sample_block(int k, int n_k, Rng& rng) {
  check_dims(k, n_k, 0);
  SparseGenBlock b;
  b.k = k;
  b.cols.resize(n_k);
  for (int j = 0; j < n_k; ++j) {
    uint32_t r = rng.below(uint32_t(k) + 1);
    b.cols[j] = r == uint32_t(k) ? SparseGenBlock::kNone : int32_t(r);
  }
  return b;
}

SparseGenBlock make_cpm_block(int b, int shift) {
  if (b < 1) throw std::invalid_argument("make_cpm_block: b must be >= 1");
  if (shift < 0 || shift >= b) throw std::invalid_argument("make_cpm_block: shift out of range");
  SparseGenBlock blk;
  blk.k = b;
  blk.cols.resize(b);
  for (int j = 0; j < b; ++j) blk.cols[j] = int32_t((j + shift) % b);
  return blk;
}

BlockRaSGenerator sample_block_ras(int k, int n_k, int m, Rng& rng) {
  check_dims(k, n_k, m);
  BlockRaSGenerator g;
  g.k = k;
  g.n_k = n_k;
  g.m = m;
  g.seed = rng.next();
  Rng sub(g.seed, kTagBand);
  g.blocks.reserve(size_t(m + 1) * (m + 1));
  for (int i = 0; i <= m; ++i)
    for (int j = 0; j <= m; ++j) g.blocks.push_back(sample_block(k, n_k, sub));
  return g;
}

std::vector<SparseGenBlock> ConvRaSGenerator::row_band(long t) const {
  if (t < 0) throw std::invalid_argument("row_band: t must be >= 0");
  if (time_invariant) return band;
  return make_band(k, n_k, m, mode, Rng(seed, uint64_t(t) + 1, kTagBand));
}

ConvRaSGenerator sample_conv_ras(int k, int n_k, int m, Rng& rng, bool time_invariant,
                                 EnsembleMode mode) {
  check_dims(k, n_k, m);
  ConvRaSGenerator g;
  g.k = k;
  g.n_k = n_k;
  g.m = m;
  g.mode = mode;
  g.time_invariant = time_invariant;
  g.seed = rng.next();
  if (time_invariant) g.band = make_band(k, n_k, m, mode, Rng(g.seed, 0, kTagBand));
  return g;
}

BitVector block_parity(const BlockRaSGenerator& g, const BitVector& u) {
  if (long(u.size()) != g.message_len())
    throw std::length_error("block_parity: message length mismatch");
  BitVector x(g.parity_len());
  for (int i = 0; i <= g.m; ++i)
    for (int j = 0; j <= g.m; ++j) {
      const SparseGenBlock& b = g.block(i, j);
      for (int t = 0; t < g.n_k; ++t) {
        int32_t r = b.cols[t];
        if (r >= 0 && u.get(size_t(i) * g.k + r)) x.flip(size_t(j) * g.n_k + t);
      }
    }
  return x;
}

ParityCheckMatrix dual_parity_check(const BlockRaSGenerator& g) {
  ParityCheckMatrix h;
  h.k = g.k;
  h.n_k = g.n_k;
  h.m = g.m;
  h.checks_of.resize(size_t(g.k) * (g.m + 1));
  for (int i = 0; i <= g.m; ++i)
    for (int j = 0; j <= g.m; ++j) {
      const SparseGenBlock& b = g.block(i, j);
      for (int t = 0; t < g.n_k; ++t) {
        int32_t r = b.cols[t];
        if (r >= 0)
          h.checks_of[size_t(i) * g.k + r].push_back(int32_t(j) * g.n_k + t);
      }
    }
  return h;
}

BlockRaSGenerator generator_from_dual(const ParityCheckMatrix& h) {
  BlockRaSGenerator g;
  g.k = h.k;
  g.n_k = h.n_k;
  g.m = h.m;
  g.blocks.assign(size_t(h.m + 1) * (h.m + 1), SparseGenBlock{});
  for (int i = 0; i <= h.m; ++i)
    for (int j = 0; j <= h.m; ++j) {
      g.block(i, j).k = h.k;
      g.block(i, j).cols.assign(h.n_k, SparseGenBlock::kNone);
    }
  for (int i = 0; i <= h.m; ++i)
    for (int r = 0; r < h.k; ++r)
      for (int32_t p : h.checks_of[size_t(i) * h.k + r]) {
        int j = p / h.n_k, t = p % h.n_k;
        int32_t& slot = g.block(i, j).cols[t];
        if (slot != SparseGenBlock::kNone)
          throw std::invalid_argument("generator_from_dual: duplicate column entry");
        slot = r;
      }
  return g;
}

bool is_codeword(const BitVector& u, const BlockRaSGenerator& g) {
  return !block_parity(g, u).any();
}

void save_generator(std::ostream& os, const BlockRaSGenerator& g) {
  os << g.k << ' ' << g.n_k << ' ' << g.m << " block " << g.seed << '\n';
  for (const SparseGenBlock& b : g.blocks) write_block_line(os, b);
}

void save_generator(std::ostream& os, const ConvRaSGenerator& g) {
  os << g.k << ' ' << g.n_k << ' ' << g.m << ' ' << mode_token(g) << ' ' << g.seed << '\n';
  if (g.time_invariant)
    for (const SparseGenBlock& b : g.band) write_block_line(os, b);
}

GeneratorFile load_generator(std::istream& is) {
  GeneratorFile f;
  int k, n_k, m;
  std::string mode;
  uint64_t seed;
  if (!(is >> k >> n_k >> m >> mode >> seed))
    throw std::invalid_argument("generator file: bad header");
  check_dims(k, n_k, m);
  if (mode == "block") {
    f.is_block = true;
    f.block.k = k;
    f.block.n_k = n_k;
    f.block.m = m;
    f.block.seed = seed;
    for (int i = 0; i < (m + 1) * (m + 1); ++i)
      f.block.blocks.push_back(read_block_line(is, k, n_k));
    return f;
  }
  f.conv.k = k;
  f.conv.n_k = n_k;
  f.conv.m = m;
  f.conv.seed = seed;
  if (mode == "conv_ti_iid" || mode == "conv_ti_regular") {
    f.conv.time_invariant = true;
    f.conv.mode = mode == "conv_ti_iid" ? EnsembleMode::kIid : EnsembleMode::kRegular;
    for (int d = 0; d <= m; ++d) f.conv.band.push_back(read_block_line(is, k, n_k));
  } else if (mode == "conv_tv_iid" || mode == "conv_tv_regular") {
    f.conv.time_invariant = false;
    f.conv.mode = mode == "conv_tv_iid" ? EnsembleMode::kIid : EnsembleMode::kRegular;
  } else {
    throw std::invalid_argument("generator file: unknown mode token");
  }
  return f;
}

}  // namespace ras
