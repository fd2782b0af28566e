#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace subflow {

/// A subset of the ground set {0, ..., n-1}, kept sorted and free of duplicates.
class GroundSubset {
 public:
  GroundSubset() = default;
  GroundSubset(std::initializer_list<int> members) : GroundSubset(std::vector<int>(members)) {}
  explicit GroundSubset(std::vector<int> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  }

  static GroundSubset from_mask(std::uint64_t mask, int n) {
    GroundSubset s;
    for (int i = 0; i < n; ++i) {
      if (mask >> i & 1U) s.members_.push_back(i);
    }
    return s;
  }

  static GroundSubset full(int n) {
    GroundSubset s;
    s.members_.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s.members_[static_cast<std::size_t>(i)] = i;
    return s;
  }

  std::uint64_t mask() const {
    std::uint64_t m = 0;
    for (int i : members_) m |= std::uint64_t{1} << i;
    return m;
  }

  bool contains(int i) const { return std::binary_search(members_.begin(), members_.end(), i); }
  bool is_subset_of(const GroundSubset& other) const {
    return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                         members_.end());
  }

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  const std::vector<int>& members() const { return members_; }

  /// True when every member lies in [0, n).
  bool fits(int n) const { return members_.empty() || (members_.front() >= 0 && members_.back() < n); }

  bool operator==(const GroundSubset&) const = default;

 private:
  std::vector<int> members_;
};

}  // namespace subflow
