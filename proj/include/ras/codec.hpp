#pragma once

#include <vector>

#include "ras/channel.hpp"
#include "ras/ensemble.hpp"

namespace ras {

struct DecoderConfig {
  int max_iterations = 50;
  double convergence_threshold = 1e-3;  // max |posterior change|, natural-log units
  int window_blocks = 0;                // coded blocks per window; 0 = 2(m+1)
  double llr_cap = kLlrCap;
  // Trailing message blocks known to be zero (termination); committed up
  // front as perfect priors instead of being decoded.
  int pinned_tail_blocks = 0;
};

struct DecodeResult {
  BitVector estimate;
  int iterations_used = 0;
  bool converged = false;
  LlrVector posterior_llrs;
};

// Systematic codeword [u | x], x = block_parity(g, u).
BitVector encode_block(const BlockRaSGenerator& g, const BitVector& u);

// Non-systematic stream: coded block t = sum over i in [max(0,t-m), t] of
// u^(i) applied to row i's band block t-i. One coded block per message block.
std::vector<BitVector> encode_conv_stream(const ConvRaSGenerator& gen,
                                          const std::vector<BitVector>& message_blocks);

// Appends m all-zero message blocks, then encodes: M data blocks give M+m
// coded blocks and drive the decoder's window past the last data block.
std::vector<BitVector> terminate(const ConvRaSGenerator& gen,
                                 const std::vector<BitVector>& message_blocks);

// Equivalent block generator of the first b message blocks of a stream:
// grid entry (i, j) is row i's band block j-i inside the diagonal band and
// zero outside. Lets stream decoders be checked against block oracles.
BlockRaSGenerator unroll_conv(const ConvRaSGenerator& gen, int b);

// Exhaustive MAP oracle, K = k(m+1) <= 20. estimate is the sequence argmax
// (ties to the lexicographically smaller message); posterior_llrs are exact
// bitwise marginals, which the sequence argmax does not always follow.
DecodeResult map_decode_exhaustive(const BlockRaSGenerator& g, double theta,
                                   const LlrVector& llr_sys, const LlrVector& llr_par);

// Flooding sum-product on the normal graph: variable nodes carry the prior
// and systematic LLR, check nodes the parity XOR with the parity channel LLR
// as a half-edge. Stops when posteriors move less than the threshold.
DecodeResult bp_decode_block(const BlockRaSGenerator& g, double theta,
                             const LlrVector& llr_sys, const LlrVector& llr_par,
                             const DecoderConfig& cfg = {});

// Streaming decoder with reusable graph and message buffers. One instance
// per worker thread: decode() overwrites internal state. The stream length
// (message blocks, termination included) is fixed at construction.
class ConvBpDecoder {
 public:
  ConvBpDecoder(const ConvRaSGenerator& gen, int stream_blocks, const DecoderConfig& cfg = {});

  // One DecodeResult per message block. Windows of cfg.window_blocks coded
  // blocks: iterate, commit the oldest block as saturated priors, slide.
  // A window covering the whole stream degenerates to one joint BP pass.
  std::vector<DecodeResult> decode(double theta, const std::vector<LlrVector>& llr_stream);

  int stream_blocks() const { return b_; }

 private:
  void check_pass(int first_check, int last_check);
  double var_pass(int first_block, int last_block);
  void commit(int block, bool pin_zero);

  int k_, n_k_, m_, b_, window_;
  DecoderConfig cfg_;
  std::vector<int32_t> edge_var_;    // edge -> variable, grouped by check
  std::vector<int32_t> check_off_;   // CSR offsets per check
  std::vector<int32_t> var_edges_;   // edge ids grouped by variable
  std::vector<int32_t> var_off_;
  // per-decode state
  std::vector<double> v2c_, c2v_, tanh_ch_, posterior_;
  std::vector<char> committed_;
  double prior_ = 0;
};

std::vector<DecodeResult> bp_decode_sliding_window(const ConvRaSGenerator& gen, double theta,
                                                   const std::vector<LlrVector>& llr_stream,
                                                   const DecoderConfig& cfg = {});

// Every message block except target revealed and saturated; each check then
// sees one unknown bit, so a single update is the exact fixed point. Returns
// the target block's decode only.
DecodeResult genie_aided_decode(const ConvRaSGenerator& gen, double theta,
                                const std::vector<LlrVector>& llr_stream,
                                const std::vector<BitVector>& true_blocks, int target);

}  // namespace ras
