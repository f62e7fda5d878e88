#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ras/codec.hpp"
#include "ras/ensemble.hpp"
#include "ras/infocalc.hpp"
#include "ras/sim.hpp"

using namespace ras;

namespace {

ChannelModel parse_channel(const std::string& spec) {
  std::size_t colon = spec.find(':');
  std::string kind = spec.substr(0, colon);
  double val = 0.0;
  if (colon != std::string::npos) val = std::stod(spec.substr(colon + 1));
  if (kind == "bsc") return ChannelModel::bsc(val);
  if (kind == "bec") return ChannelModel::bec(val);
  if (kind == "biawgn") return ChannelModel::biawgn(val);
  if (kind == "biawgn_snr") return ChannelModel::biawgn_from_snr_db(val);
  if (kind == "noiseless") return ChannelModel::noiseless();
  if (kind == "erased") return ChannelModel::totally_erased();
  throw std::invalid_argument("unknown channel spec '" + spec +
                              "' (bsc:e, bec:n, biawgn:sigma, biawgn_snr:db, noiseless, erased)");
}

std::vector<double> parse_grid(const std::string& spec) {
  // "a:b:n" inclusive linear grid, or a comma list.
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    double a, b;
    int n;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%d", &a, &b, &n) != 3 || n < 1)
      throw std::invalid_argument("bad grid spec '" + spec + "' (want a:b:n)");
    for (int i = 0; i < n; ++i)
      out.push_back(n == 1 ? a : a + (b - a) * i / (n - 1));
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  if (out.empty()) throw std::invalid_argument("empty grid spec");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open " + path);
  return f;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot write " + path);
  return f;
}

void print_bound(const BoundReport& r, const char* title) {
  std::printf("%s: k=%d n_k=%d m=%d T=%d rho1=%.6g h=%.6g delta=%.6g\n", title, r.k,
              r.n_minus_k, r.m, r.t_split, r.rho1, r.h_source, r.delta);
  for (const auto& [name, rate] : r.rates) std::printf("  rate %-6s = %.8f\n", name.c_str(), rate);
  for (std::size_t i = 0; i < r.terms.size(); ++i)
    std::printf("  term %-22s = %.6e (log2 %.4f)\n", r.terms[i].first.c_str(),
                r.terms[i].second, r.terms_log2[i].second);
  std::printf("  total = %.6e (log2 %.4f)%s\n", r.total, r.total_log2,
              r.vacuous ? " [vacuous: exceeds 1]" : "");
  if (r.typicality_symbolic)
    std::printf("  plus a source-atypicality term epsilon/3 (symbolic, not evaluated)\n");
}

int do_encode(const std::string& gen_path, const std::string& in_path,
              const std::string& out_path) {
  std::ifstream gf = open_in(gen_path);
  GeneratorFile gen = load_generator(gf);
  std::ifstream in = open_in(in_path);
  std::vector<BitVector> lines = load_bit_lines(in);
  std::vector<BitVector> out_lines;
  for (const BitVector& u : lines) {
    if (gen.is_block) {
      out_lines.push_back(encode_block(gen.block, u));
      continue;
    }
    if (u.size() % std::size_t(gen.conv.k) != 0)
      throw std::length_error("message line length not a multiple of k");
    std::vector<BitVector> blocks;
    for (std::size_t off = 0; off < u.size(); off += gen.conv.k) {
      BitVector b(gen.conv.k);
      for (int i = 0; i < gen.conv.k; ++i) b.set(i, u.get(off + i));
      blocks.push_back(std::move(b));
    }
    std::vector<BitVector> coded = terminate(gen.conv, blocks);
    BitVector flat(coded.size() * gen.conv.n_k);
    for (std::size_t t = 0; t < coded.size(); ++t)
      for (int c = 0; c < gen.conv.n_k; ++c)
        flat.set(t * gen.conv.n_k + c, coded[t].get(c));
    out_lines.push_back(std::move(flat));
  }
  std::ofstream out = open_out(out_path);
  save_bit_lines(out, out_lines);
  std::fprintf(stderr, "encoded %zu line(s)\n", out_lines.size());
  return 0;
}

LlrVector bit_llrs(const ChannelModel& ch, const BitVector& bits, std::size_t off, std::size_t n,
                   std::optional<double> prior) {
  Observation obs;
  obs.kind = ch.kind();
  obs.y.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    obs.y[i] = ch.kind() == ChannelKind::kTotallyErased ? kErased : double(bits.get(off + i));
  return llr(ch, obs, prior);
}

int do_decode(const std::string& gen_path, const std::string& channel_spec, double theta,
              const std::string& sys_channel_spec, const std::string& in_path,
              const std::string& out_path, const DecoderConfig& cfg) {
  std::ifstream gf = open_in(gen_path);
  GeneratorFile gen = load_generator(gf);
  ChannelModel ch = parse_channel(channel_spec);
  if (!ch.discrete() )
    throw std::invalid_argument("decode reads bit files; use bsc/bec/noiseless channels");
  std::ifstream in = open_in(in_path);
  std::vector<BitVector> lines = load_bit_lines(in);
  std::vector<BitVector> out_lines;
  for (const BitVector& rx : lines) {
    if (gen.is_block) {
      const BlockRaSGenerator& g = gen.block;
      std::size_t kk = std::size_t(g.message_len()), np = std::size_t(g.parity_len());
      if (rx.size() != kk + np)
        throw std::length_error("received line length != codeword length");
      ChannelModel sys_ch = parse_channel(sys_channel_spec.empty() ? channel_spec
                                                                   : sys_channel_spec);
      std::optional<double> prior;
      if (sys_ch.kind() == ChannelKind::kTotallyErased) prior = theta;
      LlrVector lsys = bit_llrs(sys_ch, rx, 0, kk, prior);
      LlrVector lpar = bit_llrs(ch, rx, kk, np, std::nullopt);
      DecodeResult res = bp_decode_block(g, theta, lsys, lpar, cfg);
      out_lines.push_back(res.estimate);
      continue;
    }
    const ConvRaSGenerator& g = gen.conv;
    if (rx.size() % std::size_t(g.n_k) != 0 || rx.size() < std::size_t(g.m + 1) * g.n_k)
      throw std::length_error("received line length must be (data blocks + m) * n_k bits");
    int total = int(rx.size() / g.n_k);
    int data_blocks = total - g.m;
    std::vector<LlrVector> stream(total);
    for (int t = 0; t < total; ++t)
      stream[t] = bit_llrs(ch, rx, std::size_t(t) * g.n_k, g.n_k, std::nullopt);
    DecoderConfig c = cfg;
    c.pinned_tail_blocks = g.m;
    std::vector<DecodeResult> res = bp_decode_sliding_window(g, theta, stream, c);
    BitVector flat(std::size_t(data_blocks) * g.k);
    for (int b = 0; b < data_blocks; ++b)
      for (int i = 0; i < g.k; ++i) flat.set(std::size_t(b) * g.k + i, res[b].estimate.get(i));
    out_lines.push_back(std::move(flat));
  }
  std::ofstream out = open_out(out_path);
  save_bit_lines(out, out_lines);
  std::fprintf(stderr, "decoded %zu line(s)\n", out_lines.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RaS / Conv-RaS coding toolkit"};
  app.require_subcommand(1);
  int rc = 0;

  // limits
  auto* limits = app.add_subcommand("limits", "Shannon and source limits");
  double lim_theta = 0.5;
  std::vector<double> lim_rates{0.5};
  std::vector<double> lim_source_rates;
  limits->add_option("--theta", lim_theta, "source bias");
  limits->add_option("--rate", lim_rates, "transmission rate(s) k/(n-k)")->delimiter(',');
  limits->add_option("--source-rate", lim_source_rates, "source rate(s) (n-k)/k")->delimiter(',');
  limits->callback([&] {
    for (double r : lim_rates) {
      ShannonLimit s = shannon_limit(r, lim_theta);
      if (s.feasible)
        std::printf("shannon rate=%.6g theta=%.6g snr_db=%.4f ebn0_db=%.4f\n", r, lim_theta,
                    s.snr_db, s.ebn0_db);
      else
        std::printf("shannon rate=%.6g theta=%.6g infeasible (R*H >= 1 bit/use)\n", r, lim_theta);
    }
    for (double r : lim_source_rates) {
      SourceLimit s = source_limit(r);
      std::printf("source rate=%.6g theta_star=%.8f%s\n", r, s.theta_star,
                  s.clamped ? " (clamped)" : "");
    }
  });

  // pmi
  auto* pmi = app.add_subcommand("pmi", "partial mutual information sweep");
  std::string pmi_channel = "bsc:0.11";
  std::string pmi_grid = "0:1:21";
  pmi->add_option("--channel", pmi_channel, "channel spec");
  pmi->add_option("--p", pmi_grid, "grid a:b:n or comma list");
  pmi->callback([&] {
    ChannelModel ch = parse_channel(pmi_channel);
    std::printf("p,i0,i1,i,boundary\n");
    for (double p : parse_grid(pmi_grid)) {
      PartialMutualInfo r = partial_mutual_info(ch, p);
      std::printf("%.6g,%.9f,%.9f,%.9f,%d\n", r.p, r.i0, r.i1, r.i, int(r.boundary));
    }
  });

  // exponent
  auto* expc = app.add_subcommand("exponent", "partial error exponent E(p,R)");
  std::string exp_channel = "bsc:0.05";
  std::string exp_p = "0.5";
  std::string exp_r = "0.1";
  expc->add_option("--channel", exp_channel, "channel spec");
  expc->add_option("--p", exp_p, "success probabilities, grid or list");
  expc->add_option("--rate", exp_r, "rates, grid or list");
  expc->callback([&] {
    ChannelModel ch = parse_channel(exp_channel);
    std::printf("p,rate,e,gamma_star\n");
    for (double p : parse_grid(exp_p))
      for (double r : parse_grid(exp_r)) {
        ExponentResult e = partial_error_exponent(ch, p, r);
        std::printf("%.6g,%.6g,%.9f,%.9f\n", p, r, e.e, e.gamma_star);
      }
  });

  // rho
  auto* rhoc = app.add_subcommand("rho", "superposition bias of a weight profile");
  int rho_k = 1;
  std::string rho_weights;
  int rho_t = 0;
  rhoc->add_option("--k", rho_k, "sub-block length")->required();
  rhoc->add_option("--weights", rho_weights, "comma list of block weights")->required();
  rhoc->add_option("--bounds-t", rho_t, "also print the support-T envelope");
  rhoc->callback([&] {
    WeightProfile w;
    w.k = rho_k;
    for (double x : parse_grid(rho_weights)) w.weights.push_back(int(x));
    std::printf("rho = %.12f (support %d)\n", rho(w), w.support());
    int t = rho_t > 0 ? rho_t : w.support();
    if (t > 0) {
      RhoBounds b = rho_bounds(rho_k, t);
      std::printf("bounds(T=%d): [%.12f, %.12f], rho1 = %.12f\n", t, b.lower, b.upper, b.rho1);
    }
  });

  // bounds
  auto* bounds = app.add_subcommand("bounds", "ensemble FER / first-error bound reports");
  std::string bnd_kind = "theorem1";
  int bnd_k = 1, bnd_nk = 3, bnd_m = 400;
  std::string bnd_channel = "bsc:0.02";
  double bnd_h = 1.0, bnd_delta = 0.05;
  bounds->add_option("--kind", bnd_kind, "theorem1 | conv");
  bounds->add_option("--k", bnd_k, "info bits per block");
  bounds->add_option("--n-k", bnd_nk, "parity bits per block");
  bounds->add_option("--m", bnd_m, "memory");
  bounds->add_option("--channel", bnd_channel, "parity channel spec");
  bounds->add_option("--entropy", bnd_h, "source entropy H (bits)");
  bounds->add_option("--delta", bnd_delta, "typicality slack (bits)");
  bounds->callback([&] {
    ChannelModel ch = parse_channel(bnd_channel);
    if (bnd_kind == "theorem1")
      print_bound(theorem1_fer_bound(bnd_k, bnd_nk, bnd_m, ch, bnd_h, bnd_delta), "theorem1");
    else if (bnd_kind == "conv")
      print_bound(conv_first_error_bound(bnd_k, bnd_nk, bnd_m, ch, bnd_h, bnd_delta), "conv");
    else
      throw std::invalid_argument("unknown bound kind " + bnd_kind);
  });

  // sample
  auto* sample = app.add_subcommand("sample", "sample a generator and write its serialization");
  int s_k = 256, s_nk = 512, s_m = 8;
  uint64_t s_seed = 1;
  bool s_block = false, s_time_varying = false;
  std::string s_ensemble = "regular", s_out;
  sample->add_option("--k", s_k, "info bits per block");
  sample->add_option("--n-k", s_nk, "parity bits per block");
  sample->add_option("--m", s_m, "memory");
  sample->add_option("--seed", s_seed, "sampling seed");
  sample->add_flag("--block", s_block, "block RaS generator instead of conv");
  sample->add_flag("--time-varying", s_time_varying, "fresh band per generator row");
  sample->add_option("--ensemble", s_ensemble, "iid | regular");
  sample->add_option("--out", s_out, "output file")->required();
  sample->callback([&] {
    Rng rng(s_seed);
    std::ofstream out = open_out(s_out);
    if (s_block) {
      save_generator(out, sample_block_ras(s_k, s_nk, s_m, rng));
      return;
    }
    EnsembleMode mode;
    if (s_ensemble == "iid")
      mode = EnsembleMode::kIid;
    else if (s_ensemble == "regular")
      mode = EnsembleMode::kRegular;
    else
      throw std::invalid_argument("unknown ensemble " + s_ensemble);
    save_generator(out, sample_conv_ras(s_k, s_nk, s_m, rng, !s_time_varying, mode));
  });

  // encode / decode
  auto* enc = app.add_subcommand("encode", "encode bit-file lines with a serialized generator");
  std::string e_gen, e_in, e_out;
  enc->add_option("--gen", e_gen, "generator file")->required();
  enc->add_option("--in", e_in, "message bit file")->required();
  enc->add_option("--out", e_out, "coded bit file")->required();
  enc->callback([&] { rc = do_encode(e_gen, e_in, e_out); });

  auto* dec = app.add_subcommand("decode", "decode bit-file lines (discrete channels)");
  std::string d_gen, d_in, d_out, d_channel = "noiseless", d_sys_channel;
  double d_theta = 0.5;
  DecoderConfig d_cfg;
  dec->add_option("--gen", d_gen, "generator file")->required();
  dec->add_option("--in", d_in, "received bit file")->required();
  dec->add_option("--out", d_out, "decoded bit file")->required();
  dec->add_option("--channel", d_channel, "parity channel (bsc:e | bec:n | noiseless)");
  dec->add_option("--sys-channel", d_sys_channel,
                  "systematic channel for block decoding (default: same; 'erased' for "
                  "source decoding)");
  dec->add_option("--theta", d_theta, "source prior");
  dec->add_option("--max-iterations", d_cfg.max_iterations, "BP iteration cap");
  dec->add_option("--window-blocks", d_cfg.window_blocks, "sliding window size (coded blocks)");
  dec->callback([&] { rc = do_decode(d_gen, d_channel, d_theta, d_sys_channel, d_in, d_out, d_cfg); });

  // simulate
  auto* simc = app.add_subcommand("simulate", "run config-driven Monte Carlo sweeps");
  std::string sim_config, sim_out;
  std::vector<std::string> sim_sets;
  simc->add_option("--config", sim_config, "config file")->required();
  simc->add_option("--set", sim_sets, "key=value override applied to every sweep");
  simc->add_option("--out", sim_out, "CSV output file (default: stdout)");
  simc->callback([&] {
    std::ifstream f = open_in(sim_config);
    std::vector<SimConfig> sweeps = parse_config_file(f);
    for (SimConfig& cfg : sweeps)
      for (const std::string& kv : sim_sets) {
        std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("--set wants key=value, got " + kv);
        apply_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
    std::ostringstream csv;
    csv << csv_header() << '\n';
    for (const SimConfig& cfg : sweeps) {
      for (const SimResult& r : run_sweep(cfg)) {
        csv << csv_row(r) << '\n';
        if (!r.error.empty()) std::fprintf(stderr, "point failed: %s\n", r.error.c_str());
      }
    }
    if (sim_out.empty()) {
      std::fputs(csv.str().c_str(), stdout);
    } else {
      std::ofstream out = open_out(sim_out);
      out << csv.str();
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return rc;
}
