#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "disfl/corpus.hpp"
#include "disfl/transforms.hpp"

namespace disfl {

// Platform-independent 64-bit hash of (key, seed): FNV-1a over the seed
// bytes and the key, finished with the splitmix64 mixer.
std::uint64_t stable_hash(std::string_view key, std::uint64_t seed);

// Maps a hash to [0, 1) using its top 53 bits.
double unit_interval(std::uint64_t h);

struct SplitSpec {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SplitResult {
  Manifest train;
  Manifest dev;
  Manifest test;
};

// Every speaker lands wholly in one partition, chosen by where
// stable_hash(speaker_id, seed) falls among the cumulative ratios.
SplitResult speaker_disjoint_split(const Manifest& m, const SplitSpec& spec);

// round(fraction * |m|) records with the smallest stable_hash(utterance_id,
// seed), in input order. Subsets for growing fractions under one seed are
// nested.
Manifest take_fraction(const Manifest& m, double fraction, std::uint64_t seed);

struct MixSpec {
  double disfluencies_fraction = 1.0;
  std::uint64_t seed = 0;
  PartialWordStrategy strategy;

  void validate() const;
};

struct MixReport {
  std::size_t ordinary_utterances = 0;
  std::size_t disfluent_utterances = 0;
  double ordinary_sec = 0.0;
  double disfluent_sec = 0.0;
  std::size_t ordinary_speakers = 0;
  std::size_t disfluent_speakers = 0;
  std::size_t total_speakers = 0;

  double total_sec() const { return ordinary_sec + disfluent_sec; }
  std::size_t total_utterances() const { return ordinary_utterances + disfluent_utterances; }
  // Percent of the mix.
  double disfluent_share_duration_pct() const;
  double disfluent_share_count_pct() const;
  // Disfluent hours as a percent of the ordinary pool alone.
  double disfluent_vs_ordinary_pct() const;

  std::string to_json() const;
};

struct MixResult {
  Manifest mixed;
  MixReport report;
};

// ordinary followed by the selected disfluent records, whose transcripts are
// rewritten with spec.strategy. Throws IdCollision if a selected record
// shares an id with the ordinary pool.
MixResult build_mix(const Manifest& ordinary, const Manifest& disfluencies, const MixSpec& spec);

}  // namespace disfl
