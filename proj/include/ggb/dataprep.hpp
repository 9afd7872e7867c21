#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggb/error.hpp"
#include "ggb/geometry.hpp"
#include "ggb/rng.hpp"

namespace ggb {

struct EpisodeManifest {
  std::string episode_id;
  std::string instruction;
  std::string subset;  // General / Install / GoogleApps / Single / WebShopping
  int step_count = 0;
  std::string source;  // pointer into the upstream dump
};

struct SplitResult {
  std::uint64_t seed = 0;
  // subset -> episode ids, in selection order
  std::map<std::string, std::vector<std::string>> train;
  std::map<std::string, std::vector<std::string>> test;
  std::map<std::string, std::vector<std::string>> validation;

  nlohmann::json to_json() const {
    nlohmann::json subsets;
    std::set<std::string> names;
    for (const auto& [k, v] : train) names.insert(k);
    for (const auto& [k, v] : test) names.insert(k);
    for (const auto& name : names) {
      nlohmann::json s;
      auto tr = train.find(name);
      auto te = test.find(name);
      auto va = validation.find(name);
      s["train_ids"] = tr == train.end() ? std::vector<std::string>{} : tr->second;
      s["test_ids"] = te == test.end() ? std::vector<std::string>{} : te->second;
      if (va != validation.end()) s["validation_ids"] = va->second;
      s["requested"] = s["train_ids"].size() + s["test_ids"].size();
      subsets[name] = s;
    }
    return {{"seed", seed}, {"rule", "floor"}, {"subsets", subsets}};
  }
};

// Keeps one episode per exact instruction string within each subset,
// chosen by a seeded uniform draw over the duplicates.
inline std::vector<EpisodeManifest> dedupe_trajectories(
    const std::vector<EpisodeManifest>& episodes, std::uint64_t seed) {
  // (subset, instruction) -> episodes, in input order
  std::map<std::pair<std::string, std::string>, std::vector<const EpisodeManifest*>>
      groups;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& e : episodes) {
    auto key = std::make_pair(e.subset, e.instruction);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&e);
  }
  std::vector<EpisodeManifest> out;
  out.reserve(order.size());
  for (const auto& key : order) {
    const auto& group = groups[key];
    Rng rng(derive_seed(seed, key.first + "\x1f" + key.second));
    out.push_back(*group[rng.next_below(group.size())]);
  }
  return out;
}

inline const std::map<std::string, std::size_t> kAitwSubsetCounts = {
    {"General", 545},
    {"Install", 688},
    {"GoogleApps", 306},
    {"Single", 700},
    {"WebShopping", 700}};

// Instruction-wise 80/20 split: per subset, a seeded sample of the
// requested instruction count, shuffled, train size = floor(frac * n).
inline SplitResult split_aitw(
    const std::vector<EpisodeManifest>& deduped,
    const std::map<std::string, std::size_t>& per_subset_counts = kAitwSubsetCounts,
    double train_frac = 0.8, std::uint64_t seed = 0) {
  std::map<std::string, std::vector<const EpisodeManifest*>> by_subset;
  for (const auto& e : deduped) by_subset[e.subset].push_back(&e);

  SplitResult result;
  result.seed = seed;
  for (const auto& [subset, want] : per_subset_counts) {
    auto it = by_subset.find(subset);
    std::size_t have = it == by_subset.end() ? 0 : it->second.size();
    if (have < want)
      throw Error(ErrorKind::Underflow,
                  "subset " + subset + " has " + std::to_string(have) +
                      " instructions, needs " + std::to_string(want) +
                      " (short by " + std::to_string(want - have) + ")");
    std::vector<std::size_t> idx(have);
    for (std::size_t i = 0; i < have; ++i) idx[i] = i;
    Rng rng(derive_seed(seed, "split\x1f" + subset));
    rng.shuffle(idx);
    idx.resize(want);  // seeded sample of the requested count
    rng.shuffle(idx);
    std::size_t n_train = static_cast<std::size_t>(
        std::floor(train_frac * static_cast<double>(want)));
    auto& tr = result.train[subset];
    auto& te = result.test[subset];
    for (std::size_t i = 0; i < want; ++i) {
      const auto& id = it->second[idx[i]]->episode_id;
      (i < n_train ? tr : te).push_back(id);
    }
  }
  return result;
}

// Validation episodes drawn from the origin (pre-dedup) pool, with
// instructions disjoint from both train and test.
inline std::map<std::string, std::vector<std::string>> select_validation(
    const std::vector<EpisodeManifest>& origin_episodes,
    const std::vector<EpisodeManifest>& deduped, const SplitResult& exclude,
    std::size_t per_subset = 100, std::uint64_t seed = 0) {
  std::map<std::string, std::string> id_to_instruction;
  for (const auto& e : origin_episodes)
    id_to_instruction[e.episode_id] = e.instruction;
  for (const auto& e : deduped) id_to_instruction[e.episode_id] = e.instruction;

  std::set<std::string> used;
  auto collect = [&](const std::map<std::string, std::vector<std::string>>& m) {
    for (const auto& [subset, ids] : m)
      for (const auto& id : ids) {
        auto it = id_to_instruction.find(id);
        if (it != id_to_instruction.end()) used.insert(it->second);
      }
  };
  collect(exclude.train);
  collect(exclude.test);

  std::map<std::string, std::vector<const EpisodeManifest*>> pool;
  std::map<std::string, std::set<std::string>> pool_instructions;
  for (const auto& e : origin_episodes) {
    if (used.count(e.instruction)) continue;
    // one candidate episode per unused instruction
    if (pool_instructions[e.subset].insert(e.instruction).second)
      pool[e.subset].push_back(&e);
  }

  std::map<std::string, std::vector<std::string>> out;
  for (const auto& [subset, ids] : exclude.train) {
    auto it = pool.find(subset);
    std::size_t have = it == pool.end() ? 0 : it->second.size();
    if (have < per_subset)
      throw Error(ErrorKind::Underflow,
                  "validation pool for " + subset + " has " +
                      std::to_string(have) + " instructions, needs " +
                      std::to_string(per_subset));
    std::vector<std::size_t> idx(have);
    for (std::size_t i = 0; i < have; ++i) idx[i] = i;
    Rng rng(derive_seed(seed, "val\x1f" + subset));
    rng.shuffle(idx);
    auto& sel = out[subset];
    for (std::size_t i = 0; i < per_subset; ++i)
      sel.push_back(it->second[idx[i]]->episode_id);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Mind2Web screenshot cropping. Crops are exact 1920x1080 row slices of
// a full-page capture; the target bbox is remapped into crop space.

struct PixelBBox {
  long long left = 0, top = 0, right = 0, down = 0;  // [left,right) x [top,down)
};

inline constexpr int kCropWidth = 1920;
inline constexpr int kCropHeight = 1080;

struct CropSpec {
  PixelDims page;
  long long offset = 0;  // crop rows [offset, offset + 1080)
  NormBBox remapped;     // target bbox relative to the crop

  nlohmann::json to_json() const {
    return {{"page", {page.width, page.height}},
            {"crop", {{"x", 0}, {"y", offset}, {"width", kCropWidth}, {"height", kCropHeight}}},
            {"bbox",
             {remapped.left, remapped.top, remapped.right, remapped.down}}};
  }
};

inline CropSpec crop_mind2web(PixelDims page, PixelBBox target,
                              std::uint64_t seed) {
  if (page.width != kCropWidth)
    throw Error(ErrorKind::InvalidArgument,
                "page width " + std::to_string(page.width) + ", expected 1920");
  if (page.height < kCropHeight)
    throw Error(ErrorKind::InvalidArgument,
                "page-too-short: height " + std::to_string(page.height));
  if (target.down - target.top > kCropHeight)
    throw Error(ErrorKind::InvalidArgument,
                "target taller than " + std::to_string(kCropHeight));
  if (target.left < 0 || target.top < 0 || target.right > page.width ||
      target.down > page.height || target.left > target.right ||
      target.top > target.down)
    throw Error(ErrorKind::Range, "target bbox outside page");

  CropSpec spec;
  spec.page = page;
  if (target.down <= kCropHeight) {
    spec.offset = 0;  // top elements are never cropped randomly
  } else {
    long long lo = std::max<long long>(0, target.down - kCropHeight);
    long long hi = std::min<long long>(target.top, page.height - kCropHeight);
    Rng rng(seed);
    spec.offset = lo + static_cast<long long>(rng.next_below(
                           static_cast<std::uint64_t>(hi - lo + 1)));
  }
  spec.remapped = {
      static_cast<double>(target.left) / kCropWidth,
      static_cast<double>(target.top - spec.offset) / kCropHeight,
      static_cast<double>(target.right) / kCropWidth,
      static_cast<double>(target.down - spec.offset) / kCropHeight};
  return spec;
}

}  // namespace ggb
