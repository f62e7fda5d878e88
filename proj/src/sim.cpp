#include "ras/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ras/infocalc.hpp"

namespace ras {
namespace {

constexpr uint64_t kTagGenerator = 0x67656e;  // code sampling stream
constexpr uint64_t kTagFrame = 0x667261;      // per-frame streams
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

void check_sweep_axis(const SimConfig& cfg) {
  switch (cfg.channel) {
    case SimChannelFamily::kNoiseless:
      return;
    case SimChannelFamily::kBsc:
      if (cfg.sweep_kind != SweepKind::kCrossover)
        throw std::invalid_argument("sim: BSC sweeps take crossover points");
      return;
    default:
      if (cfg.sweep_kind != SweepKind::kEbn0Db && cfg.sweep_kind != SweepKind::kSnrDb)
        throw std::invalid_argument("sim: AWGN sweeps take ebn0_db or snr_db points");
      return;
  }
}

void validate_config(const SimConfig& cfg) {
  if (cfg.k < 1 || cfg.n_k < 1) throw std::invalid_argument("sim: k and n_k must be >= 1");
  if (cfg.m < 0) throw std::invalid_argument("sim: m must be >= 0");
  if (cfg.data_blocks_per_frame < 1)
    throw std::invalid_argument("sim: data_blocks_per_frame must be >= 1");
  if (cfg.max_frames < 1) throw std::invalid_argument("sim: max_frames must be >= 1");
  if (cfg.max_frame_errors < 1)
    throw std::invalid_argument("sim: max_frame_errors must be >= 1");
  if (cfg.threads < 0) throw std::invalid_argument("sim: threads must be >= 0");
  if (cfg.sweep.empty()) throw std::invalid_argument("sim: empty sweep");
  switch (cfg.mode) {
    case SimMode::kChannel:
      if (cfg.theta != 0.5)
        throw std::invalid_argument("sim: channel mode requires theta = 1/2");
      check_sweep_axis(cfg);
      break;
    case SimMode::kSource:
      if (cfg.channel != SimChannelFamily::kNoiseless)
        throw std::invalid_argument("sim: source mode requires the noiseless parity channel");
      if (cfg.sweep_kind != SweepKind::kTheta)
        throw std::invalid_argument("sim: source mode sweeps theta");
      break;
    case SimMode::kJscc:
      if (!(cfg.theta > 0.0 && cfg.theta <= 0.5))
        throw std::invalid_argument("sim: jscc mode requires theta in (0, 1/2]");
      check_sweep_axis(cfg);
      break;
  }
}

struct PointSetup {
  ChannelModel ch = ChannelModel::noiseless();
  double snr_db = kNan;
  double ebn0_db = kNan;
  double theta = 0.5;
};

PointSetup resolve_point(const SimConfig& cfg, double v) {
  PointSetup s;
  if (cfg.mode == SimMode::kSource) {
    if (!(v > 0.0 && v <= 0.5))
      throw std::invalid_argument("sim: theta point outside (0, 1/2]");
    s.theta = v;
    return s;
  }
  s.theta = cfg.theta;
  if (cfg.channel == SimChannelFamily::kNoiseless) return s;
  if (cfg.channel == SimChannelFamily::kBsc) {
    s.ch = ChannelModel::bsc(v);
    return s;
  }
  // Eb/N0 counts source bits: one per channel use at rate R for channel
  // coding, H(theta) of them for JSCC.
  const double rate = double(cfg.k) / cfg.n_k;
  const double h = cfg.mode == SimMode::kJscc ? entropy(cfg.theta) : 1.0;
  const double shift_db = 10.0 * std::log10(2.0 * rate * h);
  if (cfg.sweep_kind == SweepKind::kEbn0Db) {
    s.ebn0_db = v;
    s.snr_db = v + shift_db;
  } else {
    s.snr_db = v;
    s.ebn0_db = v - shift_db;
  }
  const double sigma = std::pow(10.0, -s.snr_db / 20.0);
  s.ch = cfg.channel == SimChannelFamily::kBiAwgnHard
             ? ChannelModel::bsc(q_func(1.0 / sigma))
             : ChannelModel::biawgn(sigma);
  return s;
}

ConvRaSGenerator make_generator(const SimConfig& cfg) {
  if (!cfg.generator_file.empty()) {
    std::ifstream f(cfg.generator_file);
    if (!f) throw std::invalid_argument("sim: cannot open generator_file " + cfg.generator_file);
    GeneratorFile gf = load_generator(f);
    if (gf.is_block)
      throw std::invalid_argument("sim: generator_file must hold a conv generator");
    if (gf.conv.k != cfg.k || gf.conv.n_k != cfg.n_k || gf.conv.m != cfg.m)
      throw std::invalid_argument("sim: generator_file dimensions do not match config");
    return gf.conv;
  }
  Rng rng(cfg.master_seed, 0, 0, kTagGenerator);
  return sample_conv_ras(cfg.k, cfg.n_k, cfg.m, rng, cfg.time_invariant, cfg.ensemble_mode);
}

struct PointContext {
  const SimConfig* cfg = nullptr;
  const ConvRaSGenerator* gen = nullptr;
  PointSetup setup;
  int point_index = 0;
  int data_blocks = 0, total_blocks = 0;
  DecoderConfig dec_cfg;
};

struct FrameStat {
  long long bit_errors = 0;
  bool frame_error = false;
};

FrameStat run_frame(const PointContext& ctx, ConvBpDecoder* dec, long frame) {
  const SimConfig& cfg = *ctx.cfg;
  Rng rng(cfg.master_seed, uint64_t(ctx.point_index) + 1, uint64_t(frame) + 1, kTagFrame);
  std::vector<BitVector> data(ctx.data_blocks);
  for (int b = 0; b < ctx.data_blocks; ++b) {
    data[b] = BitVector(cfg.k);
    for (int i = 0; i < cfg.k; ++i)
      if (rng.bernoulli(ctx.setup.theta)) data[b].set(i, true);
  }
  std::vector<BitVector> coded = terminate(*ctx.gen, data);
  std::vector<LlrVector> llrs(ctx.total_blocks);
  for (int t = 0; t < ctx.total_blocks; ++t) {
    Observation obs = transmit(coded[t], ctx.setup.ch, rng);
    llrs[t] = llr(ctx.setup.ch, obs);
  }
  FrameStat st;
  if (cfg.decode_kind == DecodeKind::kGenie) {
    int target = int(rng.below(uint32_t(ctx.data_blocks)));
    std::vector<BitVector> padded = data;
    for (int d = 0; d < cfg.m; ++d) padded.emplace_back(cfg.k);
    DecodeResult r = genie_aided_decode(*ctx.gen, ctx.setup.theta, llrs, padded, target);
    st.bit_errors = (long long)((r.estimate ^ data[target]).count());
  } else {
    std::vector<DecodeResult> rs = dec->decode(ctx.setup.theta, llrs);
    for (int b = 0; b < ctx.data_blocks; ++b)
      st.bit_errors += (long long)((rs[b].estimate ^ data[b]).count());
  }
  st.frame_error = st.bit_errors > 0;
  return st;
}

}  // namespace

const char* mode_name(SimMode m) {
  switch (m) {
    case SimMode::kSource:
      return "source";
    case SimMode::kChannel:
      return "channel";
    case SimMode::kJscc:
      return "jscc";
  }
  return "?";
}

SimResult run_point(const SimConfig& cfg, int point_index) {
  validate_config(cfg);
  if (point_index < 0 || point_index >= int(cfg.sweep.size()))
    throw std::invalid_argument("sim: point index out of range");
  const auto t0 = std::chrono::steady_clock::now();

  ConvRaSGenerator gen = make_generator(cfg);
  PointContext ctx;
  ctx.cfg = &cfg;
  ctx.gen = &gen;
  ctx.setup = resolve_point(cfg, cfg.sweep[point_index]);
  ctx.point_index = point_index;
  ctx.data_blocks = cfg.data_blocks_per_frame;
  ctx.total_blocks = cfg.data_blocks_per_frame + cfg.m;
  ctx.dec_cfg = cfg.decoder;
  ctx.dec_cfg.pinned_tail_blocks = cfg.m;
  if (cfg.decode_kind == DecodeKind::kBlock) ctx.dec_cfg.window_blocks = ctx.total_blocks;

  const int workers =
      cfg.threads > 0 ? cfg.threads : int(std::max(1u, std::thread::hardware_concurrency()));
  const long chunk = std::max<long>(64, 8L * workers);

  long long bit_errors = 0;
  long frame_errors = 0, trials = 0;
  bool hit_error_target = false;
  std::vector<FrameStat> stats;
  std::exception_ptr worker_error = nullptr;
  std::mutex error_mutex;
  std::atomic<bool> failed{false};

  for (long base = 0; base < cfg.max_frames && !hit_error_target; base += chunk) {
    const long n = std::min(chunk, cfg.max_frames - base);
    stats.assign(std::size_t(n), {});
    std::atomic<long> next{0};
    auto work = [&]() {
      try {
        std::unique_ptr<ConvBpDecoder> dec;
        if (cfg.decode_kind != DecodeKind::kGenie)
          dec = std::make_unique<ConvBpDecoder>(gen, ctx.total_blocks, ctx.dec_cfg);
        for (;;) {
          long i = next.fetch_add(1);
          if (i >= n || failed.load()) break;
          stats[std::size_t(i)] = run_frame(ctx, dec.get(), base + i);
        }
      } catch (...) {
        std::lock_guard<std::mutex> g(error_mutex);
        if (!worker_error) worker_error = std::current_exception();
        failed.store(true);
      }
    };
    const int nw = int(std::min<long>(workers, n));
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(nw) - 1);
    for (int w = 1; w < nw; ++w) pool.emplace_back(work);
    work();
    for (auto& th : pool) th.join();
    if (worker_error) std::rethrow_exception(worker_error);
    // Deterministic in-order fold: the stopping frame is the same no matter
    // how many workers filled the chunk.
    for (long i = 0; i < n; ++i) {
      ++trials;
      bit_errors += stats[std::size_t(i)].bit_errors;
      if (stats[std::size_t(i)].frame_error) ++frame_errors;
      if (frame_errors >= cfg.max_frame_errors) {
        hit_error_target = true;
        break;
      }
    }
  }

  SimResult res;
  res.experiment = cfg.name;
  res.mode = cfg.mode;
  res.k = cfg.k;
  res.n_k = cfg.n_k;
  res.m = cfg.m;
  res.theta = ctx.setup.theta;
  res.snr_db = ctx.setup.snr_db;
  res.ebn0_db = ctx.setup.ebn0_db;
  res.trials = trials;
  res.bit_errors = bit_errors;
  res.frame_errors = frame_errors;
  const long long frame_bits =
      (long long)cfg.k * (cfg.decode_kind == DecodeKind::kGenie ? 1 : cfg.data_blocks_per_frame);
  res.ber = trials > 0 ? double(bit_errors) / (double(frame_bits) * double(trials)) : 0.0;
  res.fer = trials > 0 ? double(frame_errors) / double(trials) : 0.0;
  res.stopped_by = hit_error_target ? "frame_errors" : "max_frames";
  res.seed = cfg.master_seed;
  res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

std::vector<SimResult> run_sweep(const SimConfig& cfg) {
  validate_config(cfg);
  std::vector<SimResult> out;
  out.reserve(cfg.sweep.size());
  for (int i = 0; i < int(cfg.sweep.size()); ++i) {
    try {
      out.push_back(run_point(cfg, i));
    } catch (const std::exception& e) {
      SimResult r;
      r.experiment = cfg.name;
      r.mode = cfg.mode;
      r.k = cfg.k;
      r.n_k = cfg.n_k;
      r.m = cfg.m;
      r.theta = cfg.theta;
      r.snr_db = r.ebn0_db = kNan;
      r.stopped_by = "error";
      r.error = e.what();
      r.seed = cfg.master_seed;
      out.push_back(std::move(r));
    }
  }
  return out;
}

SimResult ga_bound_point(const SimConfig& cfg, int point_index) {
  if (cfg.decode_kind != DecodeKind::kGenie)
    throw std::invalid_argument("ga_bound_point: decode kind must be genie");
  return run_point(cfg, point_index);
}

std::string csv_header() {
  return "experiment,mode,k,n_minus_k,m,theta,snr_db,ebn0_db,trials,bit_errors,"
         "frame_errors,ber,fer,stopped_by,seed";
}

std::string csv_row(const SimResult& r) {
  char buf[64];
  std::string s;
  auto add = [&s](const std::string& field) {
    s += field;
    s += ',';
  };
  add(r.experiment);
  add(mode_name(r.mode));
  add(std::to_string(r.k));
  add(std::to_string(r.n_k));
  add(std::to_string(r.m));
  std::snprintf(buf, sizeof buf, "%.10g", r.theta);
  add(buf);
  if (std::isnan(r.snr_db)) {
    add("");
  } else {
    std::snprintf(buf, sizeof buf, "%.4f", r.snr_db);
    add(buf);
  }
  if (std::isnan(r.ebn0_db)) {
    add("");
  } else {
    std::snprintf(buf, sizeof buf, "%.4f", r.ebn0_db);
    add(buf);
  }
  add(std::to_string(r.trials));
  add(std::to_string(r.bit_errors));
  add(std::to_string(r.frame_errors));
  std::snprintf(buf, sizeof buf, "%.6e", r.ber);
  add(buf);
  std::snprintf(buf, sizeof buf, "%.6e", r.fer);
  add(buf);
  add(r.stopped_by);
  s += std::to_string(r.seed);
  return s;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

long parse_long(const std::string& v, const char* key) {
  std::size_t pos = 0;
  long x = 0;
  try {
    x = std::stol(v, &pos);
  } catch (...) {
    pos = std::string::npos;
  }
  if (pos != v.size())
    throw std::invalid_argument(std::string("config: bad integer for ") + key + ": " + v);
  return x;
}

double parse_double(const std::string& v, const char* key) {
  std::size_t pos = 0;
  double x = 0;
  try {
    x = std::stod(v, &pos);
  } catch (...) {
    pos = std::string::npos;
  }
  if (pos != v.size())
    throw std::invalid_argument(std::string("config: bad number for ") + key + ": " + v);
  return x;
}

bool parse_bool(const std::string& v, const char* key) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument(std::string("config: bad flag for ") + key + ": " + v);
}

std::vector<double> parse_list(const std::string& v, const char* key) {
  std::vector<double> out;
  std::string item;
  std::stringstream ss(v);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_double(item, key));
  }
  return out;
}

}  // namespace

void apply_config_key(SimConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "mode") {
    if (value == "source")
      cfg.mode = SimMode::kSource;
    else if (value == "channel")
      cfg.mode = SimMode::kChannel;
    else if (value == "jscc")
      cfg.mode = SimMode::kJscc;
    else
      throw std::invalid_argument("config: unknown mode " + value);
  } else if (key == "channel") {
    if (value == "biawgn")
      cfg.channel = SimChannelFamily::kBiAwgn;
    else if (value == "biawgn_hard")
      cfg.channel = SimChannelFamily::kBiAwgnHard;
    else if (value == "bsc")
      cfg.channel = SimChannelFamily::kBsc;
    else if (value == "noiseless")
      cfg.channel = SimChannelFamily::kNoiseless;
    else
      throw std::invalid_argument("config: unknown channel " + value);
  } else if (key == "decode") {
    if (value == "sliding")
      cfg.decode_kind = DecodeKind::kSlidingWindow;
    else if (value == "block")
      cfg.decode_kind = DecodeKind::kBlock;
    else if (value == "genie")
      cfg.decode_kind = DecodeKind::kGenie;
    else
      throw std::invalid_argument("config: unknown decode kind " + value);
  } else if (key == "sweep_kind") {
    if (value == "ebn0_db")
      cfg.sweep_kind = SweepKind::kEbn0Db;
    else if (value == "snr_db")
      cfg.sweep_kind = SweepKind::kSnrDb;
    else if (value == "crossover")
      cfg.sweep_kind = SweepKind::kCrossover;
    else if (value == "theta")
      cfg.sweep_kind = SweepKind::kTheta;
    else
      throw std::invalid_argument("config: unknown sweep_kind " + value);
  } else if (key == "ensemble") {
    if (value == "iid")
      cfg.ensemble_mode = EnsembleMode::kIid;
    else if (value == "regular")
      cfg.ensemble_mode = EnsembleMode::kRegular;
    else
      throw std::invalid_argument("config: unknown ensemble " + value);
  } else if (key == "sweep") {
    cfg.sweep = parse_list(value, "sweep");
  } else if (key == "k") {
    cfg.k = int(parse_long(value, "k"));
  } else if (key == "n_k") {
    cfg.n_k = int(parse_long(value, "n_k"));
  } else if (key == "m") {
    cfg.m = int(parse_long(value, "m"));
  } else if (key == "theta") {
    cfg.theta = parse_double(value, "theta");
  } else if (key == "data_blocks") {
    cfg.data_blocks_per_frame = int(parse_long(value, "data_blocks"));
  } else if (key == "max_frames") {
    cfg.max_frames = parse_long(value, "max_frames");
  } else if (key == "max_frame_errors") {
    cfg.max_frame_errors = parse_long(value, "max_frame_errors");
  } else if (key == "master_seed") {
    try {
      std::size_t pos = 0;
      cfg.master_seed = std::stoull(value, &pos);
      if (pos != value.size()) throw std::invalid_argument("");
    } catch (...) {
      throw std::invalid_argument("config: bad integer for master_seed: " + value);
    }
  } else if (key == "threads") {
    cfg.threads = int(parse_long(value, "threads"));
  } else if (key == "time_invariant") {
    cfg.time_invariant = parse_bool(value, "time_invariant");
  } else if (key == "window_blocks") {
    cfg.decoder.window_blocks = int(parse_long(value, "window_blocks"));
  } else if (key == "max_iterations") {
    cfg.decoder.max_iterations = int(parse_long(value, "max_iterations"));
  } else if (key == "convergence_threshold") {
    cfg.decoder.convergence_threshold = parse_double(value, "convergence_threshold");
  } else if (key == "llr_cap") {
    cfg.decoder.llr_cap = parse_double(value, "llr_cap");
  } else if (key == "generator_file") {
    cfg.generator_file = value;
  } else if (key == "name") {
    if (value.find(',') != std::string::npos)
      throw std::invalid_argument("config: name must not contain commas");
    cfg.name = value;
  } else {
    throw std::invalid_argument("config: unknown key " + key);
  }
}

std::vector<SimConfig> parse_config_file(std::istream& is) {
  SimConfig base;
  std::vector<SimConfig> sections;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']')
          throw std::invalid_argument("config: unterminated section header");
        SimConfig next = base;
        next.name = trim(line.substr(1, line.size() - 2));
        if (next.name.empty()) throw std::invalid_argument("config: empty section name");
        if (next.name.find(',') != std::string::npos)
          throw std::invalid_argument("config: name must not contain commas");
        sections.push_back(std::move(next));
        continue;
      }
      std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("config: expected key = value");
      std::string key = trim(line.substr(0, eq));
      std::string value = trim(line.substr(eq + 1));
      apply_config_key(sections.empty() ? base : sections.back(), key, value);
    } catch (const std::exception& e) {
      throw std::invalid_argument("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (sections.empty()) return {base};
  return sections;
}

std::vector<BitVector> load_bit_lines(std::istream& is) {
  std::vector<BitVector> out;
  std::string line;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    out.push_back(BitVector::from_string(line));
  }
  return out;
}

void save_bit_lines(std::ostream& os, const std::vector<BitVector>& frames) {
  for (const BitVector& f : frames) os << f.to_string() << '\n';
}

}  // namespace ras
