#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "adsde/types.hpp"

namespace adsde {

enum class NoiseKind { StandardGaussian, ScaledRademacher, BoundedUniform };

std::string_view to_string(NoiseKind kind);
/// Throws std::invalid_argument on an unknown name.
NoiseKind noise_kind_from_string(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::StandardGaussian;
  std::size_t dimension = 1;
  std::uint64_t seed = 0;

  bool operator==(const NoiseSpec&) const = default;
};

/// Sub-Gaussian constant: E[exp(<theta, U>)] <= exp(kappa |theta|^2 / 2).
///
/// Gaussian and Rademacher attain kappa = 1. For the uniform law on
/// [-sqrt3, sqrt3] the Hoeffding bound (range^2 / 4) gives 3.
double kappa_of(const NoiseSpec& spec);

/// Supremum of the tau for which E[exp(tau |U|^2)] is finite. Infinite for the
/// bounded kinds, 1/2 (exclusive) for the Gaussian.
double tau_supremum(const NoiseSpec& spec);

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter encrypt(Counter counter, Key key);
};

/// Reproducible white-noise stream.
///
/// U_n for n >= 1 is a pure function of (seed, stream id, n): the n-th draw
/// encrypts the counter (n, block, stream id) under the seed, so any stream can
/// be resumed from a recorded counter and distinct stream ids never overlap.
/// Single owner; move it between threads, never share it.
class NoiseStream {
 public:
  explicit NoiseStream(NoiseSpec spec, std::uint32_t stream_id = 0,
                       std::uint64_t counter = 0);

  /// Returns U_{counter+1} and advances the counter.
  Vector draw();
  void draw_into(std::span<double> out);

  const NoiseSpec& spec() const noexcept { return spec_; }
  std::uint32_t stream_id() const noexcept { return stream_id_; }
  /// Number of draws consumed so far.
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  Philox4x32::Counter block(std::uint64_t index, std::uint32_t lane) const;

  NoiseSpec spec_;
  std::uint32_t stream_id_;
  std::uint64_t counter_;
};

}  // namespace adsde
