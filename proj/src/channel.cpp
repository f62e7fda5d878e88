#include "ras/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ras/quadrature.hpp"

namespace ras {
namespace {

double clamp_llr(double v) { return std::clamp(v, -kLlrCap, kLlrCap); }

// log(1 + e^x) without overflow.
double softplus(double x) {
  if (x > 36.0) return x + std::exp(-x);
  if (x < -36.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace

ChannelModel ChannelModel::bsc(double eps) {
  if (!(eps >= 0.0 && eps <= 0.5))
    throw std::invalid_argument("bsc: crossover must lie in [0, 1/2]");
  return ChannelModel(ChannelKind::kBsc, eps);
}

ChannelModel ChannelModel::bec(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("bec: erasure rate must lie in [0, 1]");
  return ChannelModel(ChannelKind::kBec, eta);
}

ChannelModel ChannelModel::biawgn(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("biawgn: sigma must be positive");
  return ChannelModel(ChannelKind::kBiAwgn, sigma);
}

ChannelModel ChannelModel::biawgn_from_snr_db(double snr_db) {
  return biawgn(std::pow(10.0, -snr_db / 20.0));
}

ChannelModel ChannelModel::noiseless() { return ChannelModel(ChannelKind::kNoiseless, 0.0); }

ChannelModel ChannelModel::totally_erased() {
  return ChannelModel(ChannelKind::kTotallyErased, 1.0);
}

double ChannelModel::sigma() const {
  if (kind_ != ChannelKind::kBiAwgn) throw std::invalid_argument("sigma: BIAWGN only");
  return param_;
}

double ChannelModel::snr_db() const {
  return -20.0 * std::log10(sigma());
}

double ChannelModel::capacity() const {
  switch (kind_) {
    case ChannelKind::kBsc:
      return 1.0 - h2(param_);
    case ChannelKind::kBec:
      return 1.0 - param_;
    case ChannelKind::kNoiseless:
      return 1.0;
    case ChannelKind::kTotallyErased:
      return 0.0;
    case ChannelKind::kBiAwgn: {
      // C = 1 - E_{y ~ N(1, sigma^2)} log2(1 + e^{-2y/sigma^2})
      const double s2 = param_ * param_;
      double loss = gauss_expect_adaptive(1.0, param_, [&](double y) {
        return softplus(-2.0 * y / s2);
      });
      return 1.0 - loss / std::log(2.0);
    }
  }
  return 0.0;
}

std::vector<std::pair<double, double>> ChannelModel::output_pmf() const {
  switch (kind_) {
    case ChannelKind::kBsc:
      return {{1.0 - param_, param_}, {param_, 1.0 - param_}};
    case ChannelKind::kBec:
      return {{1.0 - param_, 0.0}, {param_, param_}, {0.0, 1.0 - param_}};
    case ChannelKind::kNoiseless:
      return {{1.0, 0.0}, {0.0, 1.0}};
    case ChannelKind::kTotallyErased:
      return {{1.0, 1.0}};
    case ChannelKind::kBiAwgn:
      break;
  }
  throw std::invalid_argument("output_pmf: discrete kinds only");
}

Observation transmit(const BitVector& x, const ChannelModel& ch, Rng& rng) {
  Observation obs;
  obs.kind = ch.kind();
  obs.y.resize(x.size());
  switch (ch.kind()) {
    case ChannelKind::kBsc:
      for (std::size_t i = 0; i < x.size(); ++i) {
        bool flip = rng.bernoulli(ch.param());
        obs.y[i] = double(x.get(i) != flip);
      }
      break;
    case ChannelKind::kBec:
      for (std::size_t i = 0; i < x.size(); ++i)
        obs.y[i] = rng.bernoulli(ch.param()) ? kErased : double(x.get(i));
      break;
    case ChannelKind::kBiAwgn:
      for (std::size_t i = 0; i < x.size(); ++i)
        obs.y[i] = (x.get(i) ? -1.0 : 1.0) + ch.param() * rng.gaussian();
      break;
    case ChannelKind::kNoiseless:
      for (std::size_t i = 0; i < x.size(); ++i) obs.y[i] = double(x.get(i));
      break;
    case ChannelKind::kTotallyErased:
      for (std::size_t i = 0; i < x.size(); ++i) obs.y[i] = kErased;
      break;
  }
  return obs;
}

LlrVector llr(const ChannelModel& ch, const Observation& obs,
              std::optional<double> source_prior) {
  if (obs.kind != ch.kind())
    throw std::invalid_argument("llr: observation kind does not match channel");
  LlrVector out(obs.y.size());
  switch (ch.kind()) {
    case ChannelKind::kBsc: {
      double eps = ch.param();
      double mag = eps <= 0.0 ? kLlrCap : clamp_llr(std::log((1.0 - eps) / eps));
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = obs.y[i] == 1.0 ? -mag : mag;
      break;
    }
    case ChannelKind::kBec:
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = obs.y[i] == kErased ? 0.0 : (obs.y[i] == 1.0 ? -kLlrCap : kLlrCap);
      break;
    case ChannelKind::kBiAwgn: {
      double s2 = ch.param() * ch.param();
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = clamp_llr(2.0 * obs.y[i] / s2);
      break;
    }
    case ChannelKind::kNoiseless:
      for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = obs.y[i] == 1.0 ? -kLlrCap : kLlrCap;
      break;
    case ChannelKind::kTotallyErased: {
      if (!source_prior)
        throw std::invalid_argument("llr: totally erased output needs the source prior");
      double theta = *source_prior;
      if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("llr: source prior must lie in [0, 1]");
      double v = theta <= 0.0   ? kLlrCap
                 : theta >= 1.0 ? -kLlrCap
                                : clamp_llr(std::log((1.0 - theta) / theta));
      std::fill(out.begin(), out.end(), v);
      break;
    }
  }
  return out;
}

}  // namespace ras
