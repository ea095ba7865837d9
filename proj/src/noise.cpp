#include "adsde/noise.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace adsde {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

// Uniform on (0, 1] from 53 bits; never returns 0 so log() is safe.
double open_closed_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::StandardGaussian:
      return "gaussian";
    case NoiseKind::ScaledRademacher:
      return "rademacher";
    case NoiseKind::BoundedUniform:
      return "uniform";
  }
  return "gaussian";
}

NoiseKind noise_kind_from_string(std::string_view name) {
  if (name == "gaussian") return NoiseKind::StandardGaussian;
  if (name == "rademacher") return NoiseKind::ScaledRademacher;
  if (name == "uniform") return NoiseKind::BoundedUniform;
  throw std::invalid_argument("unknown noise kind '" + std::string(name) + "'");
}

double kappa_of(const NoiseSpec& spec) {
  switch (spec.kind) {
    case NoiseKind::StandardGaussian:
    case NoiseKind::ScaledRademacher:
      return 1.0;
    case NoiseKind::BoundedUniform:
      return 3.0;
  }
  return 1.0;
}

double tau_supremum(const NoiseSpec& spec) {
  if (spec.kind == NoiseKind::StandardGaussian) return 0.5;
  return std::numeric_limits<double>::infinity();
}

Philox4x32::Counter Philox4x32::encrypt(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

NoiseStream::NoiseStream(NoiseSpec spec, std::uint32_t stream_id, std::uint64_t counter)
    : spec_(spec), stream_id_(stream_id), counter_(counter) {
  if (spec_.dimension == 0) throw std::invalid_argument("noise dimension must be positive");
}

Philox4x32::Counter NoiseStream::block(std::uint64_t index, std::uint32_t lane) const {
  const Philox4x32::Counter ctr{static_cast<std::uint32_t>(index),
                                static_cast<std::uint32_t>(index >> 32), lane, stream_id_};
  const Philox4x32::Key key{static_cast<std::uint32_t>(spec_.seed),
                            static_cast<std::uint32_t>(spec_.seed >> 32)};
  return Philox4x32::encrypt(ctr, key);
}

Vector NoiseStream::draw() {
  Vector out(static_cast<Eigen::Index>(spec_.dimension));
  draw_into(std::span<double>(out.data(), spec_.dimension));
  return out;
}

void NoiseStream::draw_into(std::span<double> out) {
  if (out.size() != spec_.dimension) throw std::invalid_argument("noise buffer size mismatch");
  const std::uint64_t index = ++counter_;
  const std::size_t m = spec_.dimension;
  switch (spec_.kind) {
    case NoiseKind::StandardGaussian: {
      // Box-Muller: one block gives one pair, no state carried between draws.
      for (std::size_t i = 0; i < m; i += 2) {
        const auto w = block(index, static_cast<std::uint32_t>(i / 2));
        const double radius = std::sqrt(-2.0 * std::log(open_closed_unit(w[0], w[1])));
        const double angle = 2.0 * std::numbers::pi * open_closed_unit(w[2], w[3]);
        out[i] = radius * std::cos(angle);
        if (i + 1 < m) out[i + 1] = radius * std::sin(angle);
      }
      break;
    }
    case NoiseKind::ScaledRademacher: {
      for (std::size_t i = 0; i < m; i += 4) {
        const auto w = block(index, static_cast<std::uint32_t>(i / 4));
        for (std::size_t k = 0; k < 4 && i + k < m; ++k) {
          out[i + k] = (w[k] >> 31) ? 1.0 : -1.0;
        }
      }
      break;
    }
    case NoiseKind::BoundedUniform: {
      const double half_width = std::sqrt(3.0);
      for (std::size_t i = 0; i < m; i += 2) {
        const auto w = block(index, static_cast<std::uint32_t>(i / 2));
        out[i] = half_width * (2.0 * open_closed_unit(w[0], w[1]) - 1.0);
        if (i + 1 < m) out[i + 1] = half_width * (2.0 * open_closed_unit(w[2], w[3]) - 1.0);
      }
      break;
    }
  }
}

}  // namespace adsde
