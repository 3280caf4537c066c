#pragma once

#include <cstdint>

#include "cruot/data_io.hpp"
#include "cruot/types.hpp"

namespace cruot {

// Synthetic benchmark pair used by the demo and the unbalancedness sweep.
//
// Source, 3D: an equal-weight mixture of two solid ellipsoids,
//   blob_a: center ( kToyScale, 0, 0),            semi-axes kToyScale * (0.5, 0.3, 0.2)
//   blob_b: center (-kToyScale, 0.7 kToyScale, 0), semi-axes kToyScale * (0.5, 0.3, 0.2)
// Target, 2D: a 0.85 / 0.15 mixture of
//   ellipse: center ( kToyScale, 0),              semi-axes kToyScale * (0.5, 0.25)
//   square:  center (-kToyScale, 0.7 kToyScale),  half-side kToyScale * 0.25
//
// Points are uniform over each solid region; component choice is an
// independent Bernoulli draw per sample, so label counts are approximately
// (not exactly) proportional. All draws are deterministic in the seed.
// The 0.5/0.5 source vs 0.85/0.15 target proportions are what makes the
// balanced problem strained and mass removal profitable at finite lambda.
inline constexpr double kToyScale = 0.35;
inline constexpr double kToyEllipseWeight = 0.85;

struct ToyOptions {
  Index n_source = 300;
  Index n_target = 300;
  std::uint64_t seed = 0;
};

Dataset generate_toy_source(const ToyOptions& opts);
Dataset generate_toy_target(const ToyOptions& opts);

}  // namespace cruot
