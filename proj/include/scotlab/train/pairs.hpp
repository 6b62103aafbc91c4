#pragma once

#include "scotlab/rng.hpp"

namespace scotlab {

enum class SamplerMode { All2All, Vanilla, All2AllSubset };

inline SamplerMode sampler_mode_from(const std::string& s) {
  if (s == "all2all") return SamplerMode::All2All;
  if (s == "vanilla") return SamplerMode::Vanilla;
  if (s == "all2all-subset") return SamplerMode::All2AllSubset;
  throw ValueError("unknown sampler mode: " + s + " (all2all | vanilla | all2all-subset)");
}

using SnapshotPair = std::pair<int64_t, int64_t>;  // (k, kbar), k <= kbar

inline void check_times(int64_t K, const std::vector<double>& times) {
  if (int64_t(times.size()) != K + 1)
    throw ValueError("expected K+1 = " + std::to_string(K + 1) + " times, got " +
                     std::to_string(times.size()));
  for (size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1]) throw ValueError("snapshot times must be strictly increasing");
}

// Every ordered pair (k, kbar) with k <= kbar: (K+1)(K+2)/2 pairs,
// including the K+1 identity pairs with zero lead time.
inline std::vector<SnapshotPair> enumerate_all2all(int64_t K, const std::vector<double>& times) {
  check_times(K, times);
  std::vector<SnapshotPair> pairs;
  pairs.reserve(size_t((K + 1) * (K + 2) / 2));
  for (int64_t k = 0; k <= K; ++k)
    for (int64_t kbar = k; kbar <= K; ++kbar) pairs.emplace_back(k, kbar);
  return pairs;
}

// Pairs anchored at the initial snapshot: (0, kbar) for all kbar.
inline std::vector<SnapshotPair> enumerate_vanilla(int64_t K, const std::vector<double>& times) {
  check_times(K, times);
  std::vector<SnapshotPair> pairs;
  for (int64_t kbar = 0; kbar <= K; ++kbar) pairs.emplace_back(0, kbar);
  return pairs;
}

// Snapshot indices {0, j, 2j, ...} always containing 0 and K.
inline std::vector<int64_t> select_subset(const std::vector<double>& times, int64_t stride) {
  if (stride < 1) throw ValueError("subset stride must be >= 1");
  const int64_t K = int64_t(times.size()) - 1;
  std::vector<int64_t> idx;
  for (int64_t i = 0; i <= K; i += stride) idx.push_back(i);
  if (idx.back() != K) idx.push_back(K);
  return idx;
}

// all2all over a snapshot subset, reported in original snapshot indices
inline std::vector<SnapshotPair> enumerate_subset_all2all(const std::vector<double>& times,
                                                          int64_t stride) {
  auto idx = select_subset(times, stride);
  std::vector<SnapshotPair> pairs;
  for (size_t a = 0; a < idx.size(); ++a)
    for (size_t b = a; b < idx.size(); ++b) pairs.emplace_back(idx[a], idx[b]);
  return pairs;
}

inline std::vector<SnapshotPair> enumerate_pairs(SamplerMode mode, const std::vector<double>& times,
                                                 int64_t subset_stride) {
  const int64_t K = int64_t(times.size()) - 1;
  switch (mode) {
    case SamplerMode::All2All: return enumerate_all2all(K, times);
    case SamplerMode::Vanilla: return enumerate_vanilla(K, times);
    case SamplerMode::All2AllSubset: return enumerate_subset_all2all(times, subset_stride);
  }
  throw ValueError("bad sampler mode");
}

// One training example drawn from a bound task.
struct PairRef {
  int32_t task = 0;
  int32_t traj = 0;
  int32_t k = 0;
  int32_t kbar = 0;
};

// Deterministic epoch order: a Fisher-Yates permutation of the full pair
// set keyed by (seed, epoch).
inline void shuffle_epoch(std::vector<PairRef>& pairs, uint64_t seed, int64_t epoch) {
  CounterRng rng(seed, 0x9e37'0000'0000ULL + uint64_t(epoch));
  rng.shuffle(pairs);
}

}  // namespace scotlab
