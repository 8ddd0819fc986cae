#include "cggm/inclusion.hpp"

#include "cggm/errors.hpp"

namespace cggm {

InclusionVector::InclusionVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto& b : bits_) {
    b = b ? 1 : 0;
    count_ += b;
  }
}

InclusionVector InclusionVector::from_indices(int size, const std::vector<int>& selected) {
  InclusionVector v(size);
  for (int i : selected) {
    if (i < 0 || i >= size) throw InvalidArgument("inclusion index out of range");
    v.set(i, true);
  }
  return v;
}

void InclusionVector::set(int i, bool on) {
  if (i < 0 || i >= size()) throw InvalidArgument("inclusion index out of range");
  if ((bits_[i] != 0) == on) return;
  bits_[i] = on ? 1 : 0;
  count_ += on ? 1 : -1;
}

std::vector<int> InclusionVector::selected() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (bits_[i]) out.push_back(i);
  return out;
}

std::string InclusionVector::key() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) s[i] = '1';
  return s;
}

}  // namespace cggm
