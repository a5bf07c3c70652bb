#pragma once

// Frozen experiment constants. Changing any value here changes reports; bump kDefaultsVersion.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace gibbslab::defaults {

inline constexpr int kDefaultsVersion = 1;

/// Denominator of the volume deviation exponent eps^2 / (36 D ||delta f||_1^2).
inline constexpr double kDeviationDenominator = 36.0;
/// Event margin: E_n uses E f + eps/3, E'_n the interval of half-width eps/3 around E f + eps.
inline constexpr double kEventMarginFraction = 1.0 / 3.0;
/// ((2n+1)/(2(n-k)+1))^d <= 5/4 defines N-breve.
inline constexpr double kVolumeRatioCeiling = 5.0 / 4.0;
/// Additive slack of the absolute-log entropy bound.
inline constexpr double kAbsEntropySlack = 2.0 / std::numbers::e;
/// rho = 2 eps / (5 (2k+1)^d)
inline double shields_rho(double epsilon, int d, int k) { return 2.0 * epsilon / (5.0 * std::pow(2.0 * k + 1.0, d)); }

/// Lambda multipliers, applied with both signs and divided by ||delta F||_2.
inline constexpr std::array<double, 5> kLambdaGrid{0.1, 0.25, 0.5, 1.0, 2.0};
/// Grid points with |lambda| ||delta F||_1 above this are dropped.
inline constexpr double kLambdaOscillationCap = 20.0;

/// Burn-in sweeps at high and low temperature.
inline constexpr std::uint64_t kBurninHighTemperature = 1000;
inline constexpr std::uint64_t kBurninLowTemperature = 10000;

/// Critical inverse temperature of the 2D nearest-neighbour Ising model.
inline const double kBetaCritical2d = std::log(1.0 + std::sqrt(2.0)) / 2.0;

/// Batch-means verdict width in standard errors.
inline constexpr double kSigmaMultiplier = 3.0;

}  // namespace gibbslab::defaults
