// Nearest-rank percentile bins and tercile classification.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "paratone/error.hpp"

namespace paratone {

enum class Tercile { Low, Mid, Top };

inline const char* tercile_name(Tercile t) {
  switch (t) {
    case Tercile::Low: return "Low";
    case Tercile::Mid: return "Mid";
    case Tercile::Top: return "Top";
  }
  return "?";
}

inline Tercile tercile_from_name(const std::string& s) {
  if (s == "Low") return Tercile::Low;
  if (s == "Mid") return Tercile::Mid;
  if (s == "Top") return Tercile::Top;
  raise(ErrorCode::UnknownAttribute, "unknown tercile: " + s);
}

// The eight binnable attributes, in canonical order. The first five are the
// controllable synthesis attributes; the last three are the pseudo scores.
enum class Attribute {
  PitchMean = 0,
  PitchStd,
  Level,
  Jitter,
  Shimmer,
  Arousal,
  Valence,
  Dominance,
};

inline constexpr int kNumAttributes = 8;
inline constexpr int kNumControllable = 5;

inline constexpr std::array<Attribute, kNumAttributes> kAllAttributes = {
    Attribute::PitchMean, Attribute::PitchStd, Attribute::Level,
    Attribute::Jitter,    Attribute::Shimmer,  Attribute::Arousal,
    Attribute::Valence,   Attribute::Dominance};

// Keys used in bins.json / feature dumps.
inline const char* attribute_feature_key(Attribute a) {
  switch (a) {
    case Attribute::PitchMean: return "pitch_mean";
    case Attribute::PitchStd: return "pitch_std";
    case Attribute::Level: return "level_db";
    case Attribute::Jitter: return "jitter_ratio";
    case Attribute::Shimmer: return "shimmer_ratio";
    case Attribute::Arousal: return "arousal";
    case Attribute::Valence: return "valence";
    case Attribute::Dominance: return "dominance";
  }
  return "?";
}

// Keys used in AttributeSpec JSON and caption tooling.
inline const char* attribute_spec_key(Attribute a) {
  switch (a) {
    case Attribute::PitchMean: return "pitch_mean";
    case Attribute::PitchStd: return "pitch_std";
    case Attribute::Level: return "level";
    case Attribute::Jitter: return "jitter";
    case Attribute::Shimmer: return "shimmer";
    case Attribute::Arousal: return "arousal";
    case Attribute::Valence: return "valence";
    case Attribute::Dominance: return "dominance";
  }
  return "?";
}

struct Bin {
  double p30 = 0.0;
  double p70 = 0.0;
};

struct BinBoundaries {
  std::array<Bin, kNumAttributes> bins{};

  const Bin& of(Attribute a) const { return bins[static_cast<int>(a)]; }
  Bin& of(Attribute a) { return bins[static_cast<int>(a)]; }
};

// Nearest-rank percentile: the ceil(p/100 * N)-th smallest value.
inline double nearest_rank_percentile(std::vector<double> values, double p) {
  const std::size_t n = values.size();
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(p / 100.0 * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
  return values[rank - 1];
}

inline Bin compute_bin(const std::vector<double>& values) {
  if (values.size() < 10) {
    raise(ErrorCode::InsufficientData,
          "need >= 10 values per attribute to bin");
  }
  for (double v : values) {
    if (!std::isfinite(v)) raise(ErrorCode::NonFiniteValue, "non-finite value");
  }
  Bin b;
  b.p30 = nearest_rank_percentile(values, 30.0);
  b.p70 = nearest_rank_percentile(values, 70.0);
  return b;
}

inline BinBoundaries compute_bins(
    const std::array<std::vector<double>, kNumAttributes>& values) {
  BinBoundaries out;
  for (int a = 0; a < kNumAttributes; ++a) {
    out.bins[a] = compute_bin(values[a]);
  }
  return out;
}

// Low iff v < p30; Mid iff p30 <= v < p70; Top iff v >= p70.
inline Tercile classify(double value, const Bin& bin) {
  if (value < bin.p30) return Tercile::Low;
  if (value < bin.p70) return Tercile::Mid;
  return Tercile::Top;
}

}  // namespace paratone
