#pragma once

// Settings shared by the acceptance suite and the golden-value generator, so
// that a golden file always describes the exact run the suite repeats.

#include <array>
#include <cstddef>
#include <cstdint>

namespace rdelab::acceptance {

// Operator iteration: first n with sup |f_n - Hbar| < 1e-2.
inline constexpr double kOperatorTarget = 1e-2;
inline constexpr std::size_t kOperatorMaxIters = 400;
// Refined grid used by the oracle run.
inline constexpr double kOracleXMax = 60.0;
inline constexpr double kOracleStep = 0.005;

// Beta recursion run to its natural early stop.
inline constexpr std::size_t kBetaNMax = 5000;
inline constexpr double kBetaStopTolerance = 1e-6;
inline constexpr std::size_t kBetaResolution = 10000;
inline constexpr std::size_t kBetaOracleResolution = 40000;

// Coupling ladder.
inline constexpr std::array<std::size_t, 6> kCouplingDepths{0, 2, 4, 6, 8, 10};
inline constexpr std::size_t kCouplingReplicates = 10000;
inline constexpr std::uint64_t kCouplingSeed = 0x5eed'0001ULL;
inline constexpr double kCouplingCutoff = 30.0;

}  // namespace rdelab::acceptance
