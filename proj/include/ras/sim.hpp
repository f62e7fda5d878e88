#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ras/channel.hpp"
#include "ras/codec.hpp"
#include "ras/ensemble.hpp"

namespace ras {

enum class SimMode { kSource, kChannel, kJscc };
enum class SimChannelFamily { kBiAwgn, kBiAwgnHard, kBsc, kNoiseless };
enum class SweepKind { kEbn0Db, kSnrDb, kCrossover, kTheta };
enum class DecodeKind { kSlidingWindow, kBlock, kGenie };

// One experiment: a sweep of operating points over a fixed code and decoder.
// Mode invariants: channel mode requires theta = 1/2; source mode requires a
// noiseless parity channel and a theta sweep.
struct SimConfig {
  std::string name = "point";
  SimMode mode = SimMode::kChannel;
  SimChannelFamily channel = SimChannelFamily::kBiAwgn;
  DecodeKind decode_kind = DecodeKind::kSlidingWindow;
  int k = 256;
  int n_k = 512;
  int m = 8;
  double theta = 0.5;
  SweepKind sweep_kind = SweepKind::kEbn0Db;
  std::vector<double> sweep;
  EnsembleMode ensemble_mode = EnsembleMode::kRegular;
  bool time_invariant = true;
  DecoderConfig decoder;
  int data_blocks_per_frame = 32;
  long max_frames = 1000000;
  long max_frame_errors = 100;
  uint64_t master_seed = 1;
  int threads = 0;  // 0 = all hardware threads
  std::string generator_file;  // optional: load instead of sampling
};

struct SimResult {
  std::string experiment;
  SimMode mode = SimMode::kChannel;
  int k = 0, n_k = 0, m = 0;
  double theta = 0;
  double snr_db = 0, ebn0_db = 0;  // NaN for channels without an SNR axis
  long trials = 0;
  long long bit_errors = 0;
  long frame_errors = 0;
  double ber = 0, fer = 0;
  std::string stopped_by;  // "frame_errors" | "max_frames" | "error"
  uint64_t seed = 0;
  double wall_time = 0;  // seconds; not part of the CSV contract
  std::string error;     // failure note for marked rows
};

// One sweep point. Frames are simulated in deterministic per-frame streams
// derived from (master_seed, point_index, frame), so the result is a pure
// function of (config, point_index) regardless of thread count. Genie frames
// decode one uniformly drawn data block against revealed neighbors.
SimResult run_point(const SimConfig& cfg, int point_index);

// All sweep points in order; a point failure marks its row (stopped_by =
// "error") and the sweep continues.
std::vector<SimResult> run_sweep(const SimConfig& cfg);

// run_point restricted to genie decoding (the GA lower-bound machinery).
SimResult ga_bound_point(const SimConfig& cfg, int point_index);

std::string csv_header();
std::string csv_row(const SimResult& r);

// key = value lines with '#' comments; a [section] starts one sweep that
// inherits every key above the first section. Unknown keys are errors.
std::vector<SimConfig> parse_config_file(std::istream& is);

// Applies one "key=value" override (the CLI flag path onto parsed configs).
void apply_config_key(SimConfig& cfg, const std::string& key, const std::string& value);

// ASCII bit lines, one frame per line.
std::vector<BitVector> load_bit_lines(std::istream& is);
void save_bit_lines(std::ostream& os, const std::vector<BitVector>& frames);

const char* mode_name(SimMode m);

}  // namespace ras
