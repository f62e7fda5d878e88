#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ras/bitvec.hpp"
#include "ras/rng.hpp"

namespace ras {

// k x n_k generator block with column weight <= 1: cols[j] holds the row index
// feeding parity column j, or kNone for an all-zero column.
struct SparseGenBlock {
  static constexpr int32_t kNone = -1;

  int32_t k = 0;
  std::vector<int32_t> cols;

  int32_t n_k() const { return int32_t(cols.size()); }
  bool operator==(const SparseGenBlock&) const = default;
};

// Each column independently uniform over the k+1 weight-<=1 patterns.
SparseGenBlock sample_block(int k, int n_k, Rng& rng);

// Circulant permutation block: column j carries row (j + shift) mod b.
SparseGenBlock make_cpm_block(int b, int shift);

enum class EnsembleMode { kIid, kRegular };

// Systematic block generator [I G]; only G is stored, as an (m+1) x (m+1)
// grid of sparse blocks.
struct BlockRaSGenerator {
  int k = 0, n_k = 0, m = 0;
  uint64_t seed = 0;
  std::vector<SparseGenBlock> blocks;  // row-major grid

  const SparseGenBlock& block(int i, int j) const { return blocks[i * (m + 1) + j]; }
  SparseGenBlock& block(int i, int j) { return blocks[i * (m + 1) + j]; }
  int message_len() const { return k * (m + 1); }
  int parity_len() const { return n_k * (m + 1); }
};

BlockRaSGenerator sample_block_ras(int k, int n_k, int m, Rng& rng);

// Convolutional generator: memory-m band of k x n_k blocks. band[d] is the
// block G_{t,t+d} of every generator row t in the time-invariant case; the
// time-varying case derives each row's band lazily from the stored seed, so
// streams of any length can be handled. In regular mode the band is built from
// permutation dealing: every info bit appears floor(E/k) or ceil(E/k) times
// across the band (E = (m+1) n_k) and at most ceil(n_k/k) times per block.
struct ConvRaSGenerator {
  int k = 0, n_k = 0, m = 0;
  EnsembleMode mode = EnsembleMode::kIid;
  bool time_invariant = true;
  uint64_t seed = 0;
  std::vector<SparseGenBlock> band;  // m+1 blocks when time-invariant

  std::vector<SparseGenBlock> row_band(long t) const;
};

ConvRaSGenerator sample_conv_ras(int k, int n_k, int m, Rng& rng,
                                 bool time_invariant = true,
                                 EnsembleMode mode = EnsembleMode::kIid);

// Parity part x = uG of the systematic codeword [u | x].
BitVector block_parity(const BlockRaSGenerator& g, const BitVector& u);

// H = G^T, stored as the list of parity positions referencing each message
// coordinate. Describes the dual (parity-check) code {u : uG = 0}.
struct ParityCheckMatrix {
  int k = 0, n_k = 0, m = 0;
  std::vector<std::vector<int32_t>> checks_of;  // size k(m+1)

  int rows() const { return n_k * (m + 1); }
  int cols() const { return k * (m + 1); }
};

ParityCheckMatrix dual_parity_check(const BlockRaSGenerator& g);
BlockRaSGenerator generator_from_dual(const ParityCheckMatrix& h);

// Membership in the dual code: u G = 0.
bool is_codeword(const BitVector& u, const BlockRaSGenerator& g);

// Plain-text serialization: header "k n_k m mode seed", then one line per
// stored block (-1 marks NONE columns). Time-varying generators store no
// block lines; their rows regenerate from the seed. Round-trips bit-exactly.
void save_generator(std::ostream& os, const BlockRaSGenerator& g);
void save_generator(std::ostream& os, const ConvRaSGenerator& g);

struct GeneratorFile {
  bool is_block = false;
  BlockRaSGenerator block;
  ConvRaSGenerator conv;
};

GeneratorFile load_generator(std::istream& is);

}  // namespace ras
