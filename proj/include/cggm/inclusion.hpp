#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cggm {

/// Binary predictor-selection vector with a cached count of ones.
class InclusionVector {
 public:
  InclusionVector() = default;
  explicit InclusionVector(int size) : bits_(size, 0) {}
  explicit InclusionVector(std::vector<std::uint8_t> bits);
  static InclusionVector from_indices(int size, const std::vector<int>& selected);

  int size() const noexcept { return static_cast<int>(bits_.size()); }
  int count() const noexcept { return count_; }
  bool operator[](int i) const { return bits_[i] != 0; }
  void set(int i, bool on);
  void flip(int i) { set(i, !(*this)[i]); }

  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
  std::vector<int> selected() const;
  /// '0'/'1' string, used as a cache key.
  std::string key() const;

  bool operator==(const InclusionVector& other) const { return bits_ == other.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
  int count_ = 0;
};

}  // namespace cggm
