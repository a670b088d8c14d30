#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <iterator>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "dronesafe/action.hpp"
#include "dronesafe/world.hpp"

namespace dronesafe {

// Bounded FIFO; the oldest entry is evicted once capacity is reached.
template <class T>
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  }

  void push(T entry) {
    if (entries_.size() == capacity_) entries_.pop_front();
    entries_.push_back(std::move(entry));
  }

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return entries_.empty(); }
  void clear() { entries_.clear(); }

  // Oldest first.
  const T& operator[](std::size_t i) const { return entries_[i]; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // Uniform without replacement.
  template <class URBG>
  std::vector<T> sample_minibatch(std::size_t n, URBG& rng) const {
    if (n > entries_.size()) throw std::invalid_argument("minibatch larger than buffer");
    std::vector<T> out;
    out.reserve(n);
    std::sample(entries_.begin(), entries_.end(), std::back_inserter(out), n, rng);
    std::shuffle(out.begin(), out.end(), rng);
    return out;
  }

  // Newest min(k, size) entries, newest last.
  std::vector<T> recent_window(std::size_t k) const {
    const std::size_t n = std::min(k, entries_.size());
    return std::vector<T>(entries_.end() - static_cast<std::ptrdiff_t>(n), entries_.end());
  }

 private:
  std::size_t capacity_;
  std::deque<T> entries_;
};

struct RlTransition {
  Observation s;
  int action = 0;  // PolicySlot index
  double reward = 0.0;
  Observation s_next;
  std::array<double, 4> costs{};  // hinge cost per constraint
  bool done = false;
  // Slots applicable in s (bit i = slot i).
  std::uint8_t mask = 0x7f;
  // Slots applicable in s_next (bit i = slot i), for the bootstrap target.
  std::uint8_t next_mask = 0;
  // Slot of the planner's proposal, -1 when the planner passed.
  int proposed = -1;
};

struct PlannerRecord {
  DroneId drone = 0;
  int t = 0;
  Observation s;
  Action proposed;
  bool override_flag = false;
  std::optional<HallucinationClass> fault_class;
};

using RlReplay = ReplayBuffer<RlTransition>;
using PlannerMemory = ReplayBuffer<PlannerRecord>;

// Binary snapshot of an RL buffer. Layout (little-endian):
//   char[4] "DSRB", u32 version (=1), u64 capacity, u64 count,
//   count x { f64[13] s, i32 action, f64 reward, f64[13] s_next,
//             f64[4] costs, u8 done, u8 mask, u8 next_mask,
//             i32 proposed }
void save_replay(const RlReplay& buffer, const std::string& path);
RlReplay load_replay(const std::string& path);

}  // namespace dronesafe
