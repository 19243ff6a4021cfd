#pragma once

#include <cstddef>
#include <cstdint>

#include "stratshap/core.h"
#include "stratshap/models.h"

// Synthetic stand-in for an insurance frequency study: driver age decides
// the stratum, a bonus-malus score depends strongly on age, and three noise
// covariates are independent of both. The model's bonus-malus effect is
// three times larger for drivers over 35, so bonus-malus interacts with age
// while z1..z3 enter additively.
namespace stratshap::synth {

inline constexpr int kMinAge = 18;
inline constexpr int kMaxAge = 80;

// Columns: age, bm, z1, z2, z3 (age is categorical).
Dataset sample_age_bm(std::size_t rows_per_age, std::uint64_t seed);

// Tree ensemble over (age, bm, z1, z2, z3).
Model age_bm_model();

}  // namespace stratshap::synth
