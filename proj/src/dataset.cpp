#include "disfl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>
#include <vector>

#include "disfl/error.hpp"
#include "json.hpp"

namespace disfl {

std::uint64_t stable_hash(std::string_view key, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix_byte = [&h](unsigned char b) {
    h ^= b;
    h *= 0x100000001b3ULL;
  };
  for (int i = 0; i < 8; ++i) mix_byte(static_cast<unsigned char>(seed >> (8 * i)));
  for (char c : key) mix_byte(static_cast<unsigned char>(c));
  // splitmix64 finalizer
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

double unit_interval(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

void SplitSpec::validate() const {
  if (train < 0 || dev < 0 || test < 0 || std::abs(train + dev + test - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidArgument, "split ratios must be nonnegative and sum to 1");
}

SplitResult speaker_disjoint_split(const Manifest& m, const SplitSpec& spec) {
  spec.validate();
  SplitResult out;
  out.train.name = m.name + "-train";
  out.dev.name = m.name + "-dev";
  out.test.name = m.name + "-test";
  for (const auto& r : m.records) {
    double u = unit_interval(stable_hash(r.speaker_id, spec.seed));
    if (u < spec.train) out.train.records.push_back(r);
    else if (u < spec.train + spec.dev) out.dev.records.push_back(r);
    else out.test.records.push_back(r);
  }
  return out;
}

Manifest take_fraction(const Manifest& m, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "fraction must lie in [0, 1]");
  const std::size_t n = m.records.size();
  const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));

  std::vector<std::pair<std::uint64_t, std::size_t>> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = {stable_hash(m.records[i].utterance_id, seed), i};
  std::sort(order.begin(), order.end());

  std::vector<std::size_t> chosen(keep);
  for (std::size_t k = 0; k < keep; ++k) chosen[k] = order[k].second;
  std::sort(chosen.begin(), chosen.end());

  Manifest out;
  out.name = m.name;
  out.records.reserve(keep);
  for (auto i : chosen) out.records.push_back(m.records[i]);
  return out;
}

void MixSpec::validate() const {
  if (!(disfluencies_fraction >= 0.0 && disfluencies_fraction <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "disfluencies fraction must lie in [0, 1]");
  strategy.validate();
}

static double pct(double part, double whole) { return whole > 0 ? 100.0 * part / whole : 0.0; }

double MixReport::disfluent_share_duration_pct() const { return pct(disfluent_sec, total_sec()); }

double MixReport::disfluent_share_count_pct() const {
  return pct(static_cast<double>(disfluent_utterances), static_cast<double>(total_utterances()));
}

double MixReport::disfluent_vs_ordinary_pct() const { return pct(disfluent_sec, ordinary_sec); }

std::string MixReport::to_json() const {
  nlohmann::ordered_json j;
  j["total_hours"] = total_sec() / 3600.0;
  j["ordinary_hours"] = ordinary_sec / 3600.0;
  j["disfluent_hours"] = disfluent_sec / 3600.0;
  j["disfluent_share_pct"] = disfluent_share_duration_pct();
  j["disfluent_share_count_pct"] = disfluent_share_count_pct();
  j["disfluent_vs_ordinary_pct"] = disfluent_vs_ordinary_pct();
  j["ordinary_utterances"] = ordinary_utterances;
  j["disfluent_utterances"] = disfluent_utterances;
  j["speakers"] = {{"ordinary", ordinary_speakers},
                   {"disfluent", disfluent_speakers},
                   {"total", total_speakers}};
  return j.dump(2);
}

MixResult build_mix(const Manifest& ordinary, const Manifest& disfluencies, const MixSpec& spec) {
  spec.validate();
  auto picked = take_fraction(disfluencies, spec.disfluencies_fraction, spec.seed);

  std::unordered_set<std::string> ids;
  for (const auto& r : ordinary.records) ids.insert(r.utterance_id);
  for (const auto& r : picked.records)
    if (ids.count(r.utterance_id))
      throw Error(ErrorCode::IdCollision, "utterance '" + r.utterance_id + "' is in both pools");

  MixResult out;
  out.mixed.name = ordinary.name + "+" + disfluencies.name;
  out.mixed.records = ordinary.records;
  out.mixed.records.reserve(ordinary.size() + picked.size());

  auto& rep = out.report;
  rep.ordinary_utterances = ordinary.size();
  rep.disfluent_utterances = picked.size();
  rep.ordinary_sec = ordinary.total_duration_sec();
  rep.disfluent_sec = picked.total_duration_sec();
  rep.ordinary_speakers = ordinary.speakers().size();
  rep.disfluent_speakers = picked.speakers().size();

  for (auto& r : picked.records) {
    r.transcript = transform(r.transcript, spec.strategy);
    out.mixed.records.push_back(std::move(r));
  }
  rep.total_speakers = out.mixed.speakers().size();
  return out;
}

}  // namespace disfl
