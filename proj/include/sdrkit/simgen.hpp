#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "sdrkit/estimators.hpp"
#include "sdrkit/linalg.hpp"

namespace sdrkit {

/// Simulation designs:
///   Ex1i   Y = β₁ᵀX + ε,                          β₁ = (1,1,1,1,0,…)/2
///   Ex1ii  Y = sin(β₂ᵀX) + exp(β₃ᵀX)·ε,           β₂ = e₁, β₃ = e₂
///   Ex2    Y = (β₁ᵀX + ε₁, β₂ᵀX + ε₂, ε₃, ε₄),     β₁ = e₁, β₂ = (0,2,1,0,0,0)
///   Ex3i   Y = (2·exp(ε₁), ε₂, ε₃, ε₄),  corr(ε₁,ε₂ | X) = sin(βᵀX), β = (0.8,0.6,0,…)
///   Ex3ii  Y = (ε₁, ε₂, ε₃, ε₄),        same error law as Ex3i
///   Ex4    Y = 0.4(β₁ᵀX)² + |β₂ᵀX|^{1/2} + 0.4ε,  β₁ = (1,1,1,0,…), β₂ = (1,0,0,0,1,3,0,…)
///   Ex5    Y = ((β₁ᵀX)² + ε₁, |β₂ᵀX| + ε₂, ε₃, ε₄), β as in Ex2
/// Ex1*/Ex4 use p = ⌊√n⌋ − 5; the others p = 6. X ~ N(0, I_p) throughout.
enum class Example { Ex1i, Ex1ii, Ex2, Ex3i, Ex3ii, Ex4, Ex5 };

enum class ErrorLaw { Normal, Cauchy, MixNormal, Mvt1 };

/// How the second mixture component "N(0, 10)" is read.
enum class MixtureReading { Variance, StandardDeviation };

struct SimSpec {
  Example example = Example::Ex1i;
  Eigen::Index n = 100;
  ErrorLaw error = ErrorLaw::Normal;
  std::uint64_t seed = 0;
  MixtureReading mixture = MixtureReading::Variance;

  void validate() const;
  Eigen::Index p() const;
  Eigen::Index q() const;
  int d() const;
};

struct GeneratedSample {
  DataSet data;
  Matrix truth;  // p×d, unit-norm columns spanning the central subspace
  int d = 0;
};

std::string_view to_string(Example example);
std::string_view to_string(ErrorLaw law);
Example parse_example(std::string_view token);
ErrorLaw parse_error_law(std::string_view token);

/// The project's random engine: 64-bit Mersenne Twister seeded through
/// splitmix64.
using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);
Rng make_rng(std::uint64_t seed);

/// Seed of substream `index` derived from a master seed: seed ⊕ splitmix64(index).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// count×dims i.i.d. error draws. `cov_cholesky` (dims×dims, lower) correlates
/// the coordinates of each row for Normal and Mvt1; Cauchy and MixNormal are
/// drawn independently per coordinate.
Matrix sample_error(ErrorLaw law, Eigen::Index count, Eigen::Index dims, Rng& rng,
                    const std::optional<Matrix>& cov_cholesky = std::nullopt,
                    MixtureReading mixture = MixtureReading::Variance);

GeneratedSample generate(const SimSpec& spec);

}  // namespace sdrkit
