#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ggb/action.hpp"
#include "ggb/geometry.hpp"
#include "ggb/metrics.hpp"

namespace ggb {

struct Observation {
  std::string screenshot;  // image path; may be empty for fakes
  PixelDims dims{1, 1};
  std::string instruction;
};

enum class EnvStatus { running, success, failure };

// Environment contract for episode runners. reset with equal
// (task, seed) must yield an identical initial observation.
class EnvAdapter {
 public:
  virtual ~EnvAdapter() = default;
  virtual Observation reset(const std::string& task, std::uint64_t seed) = 0;
  virtual std::pair<Observation, EnvStatus> apply(const Action& action) = 0;
};

// Scripted fake environment: succeeds once the expected action sequence
// has been applied in order, fails on the first mismatch. An empty
// `expected` never terminates (step-limit testing).
class ScriptedEnv : public EnvAdapter {
 public:
  ScriptedEnv(std::string instruction, std::vector<Action> expected,
              double click_tolerance = 0.05)
      : instruction_(std::move(instruction)),
        expected_(std::move(expected)),
        click_tolerance_(click_tolerance) {}

  Observation reset(const std::string& task, std::uint64_t seed) override {
    position_ = 0;
    Observation obs;
    obs.dims = {160, 210};
    obs.instruction = instruction_.empty()
                          ? task + " #" + std::to_string(seed)
                          : instruction_;
    return obs;
  }

  std::pair<Observation, EnvStatus> apply(const Action& action) override {
    Observation obs;
    obs.dims = {160, 210};
    if (expected_.empty()) return {obs, EnvStatus::running};
    if (position_ >= expected_.size()) return {obs, EnvStatus::failure};
    if (!matches(expected_[position_], action)) return {obs, EnvStatus::failure};
    ++position_;
    return {obs, position_ == expected_.size() ? EnvStatus::success
                                               : EnvStatus::running};
  }

 private:
  bool matches(const Action& want, const Action& got) const {
    if (want.type_id != got.type_id) return false;
    if (want.click_point)
      return got.click_point &&
             point_distance(*want.click_point, *got.click_point) <= click_tolerance_;
    if (want.typed_text)
      return got.typed_text &&
             normalize_text(*want.typed_text) == normalize_text(*got.typed_text);
    if (want.value)
      return got.value && normalize_text(*want.value) == normalize_text(*got.value);
    return true;
  }

  std::string instruction_;
  std::vector<Action> expected_;
  double click_tolerance_;
  std::size_t position_ = 0;
};

}  // namespace ggb
