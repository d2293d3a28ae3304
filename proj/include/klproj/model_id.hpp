#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "types.hpp"

namespace klproj {

/// FNV-1a over raw bytes.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t basis = 0xcbf29ce484222325ULL) {
  const unsigned char* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = basis;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Identity of a sub-model: the set of retained penalized coordinates,
/// stored as a variable-length bitset so p may exceed 64.
class ModelId {
 public:
  ModelId() = default;

  ModelId(Index p, const std::vector<Index>& members) : p_(p), bits_(word_count(p), 0) {
    for (Index j : members) set(j);
  }

  /// Bit j is set iff column j is penalized and |beta_j| exceeds threshold.
  static ModelId from_beta(const Vector& beta, const std::vector<char>& penalized,
                           double threshold) {
    ModelId id;
    id.p_ = beta.size();
    id.bits_.assign(word_count(id.p_), 0);
    for (Index j = 0; j < beta.size(); ++j)
      if (penalized[static_cast<std::size_t>(j)] != 0 &&
          (beta[j] > threshold || beta[j] < -threshold))
        id.set(j);
    return id;
  }

  Index size() const { return p_; }

  int count() const {
    int c = 0;
    for (std::uint64_t w : bits_) c += __builtin_popcountll(w);
    return c;
  }

  bool contains(Index j) const {
    if (j < 0 || j >= p_) return false;
    return (bits_[static_cast<std::size_t>(j >> 6)] >> (j & 63)) & 1ULL;
  }

  std::vector<Index> members() const {
    std::vector<Index> out;
    for (Index j = 0; j < p_; ++j)
      if (contains(j)) out.push_back(j);
    return out;
  }

  /// "{a,b}" using column names, or indices when names run short.
  std::string label(const std::vector<std::string>& names) const {
    std::string s = "{";
    bool first = true;
    for (Index j : members()) {
      if (!first) s += ",";
      first = false;
      s += j < static_cast<Index>(names.size()) ? names[static_cast<std::size_t>(j)]
                                                : std::to_string(j);
    }
    return s + "}";
  }

  bool operator==(const ModelId& o) const { return p_ == o.p_ && bits_ == o.bits_; }
  bool operator!=(const ModelId& o) const { return !(*this == o); }
  bool operator<(const ModelId& o) const {
    if (p_ != o.p_) return p_ < o.p_;
    return bits_ < o.bits_;
  }

  std::uint64_t hash() const {
    std::uint64_t h = fnv1a64(&p_, sizeof(p_));
    if (!bits_.empty()) h = fnv1a64(bits_.data(), bits_.size() * sizeof(std::uint64_t), h);
    return h;
  }

 private:
  static std::size_t word_count(Index p) { return static_cast<std::size_t>((p + 63) / 64); }

  void set(Index j) {
    if (j < 0 || j >= p_) throw std::out_of_range("ModelId member out of range");
    bits_[static_cast<std::size_t>(j >> 6)] |= 1ULL << (j & 63);
  }

  Index p_ = 0;
  std::vector<std::uint64_t> bits_;
};

struct ModelIdHash {
  std::size_t operator()(const ModelId& m) const { return static_cast<std::size_t>(m.hash()); }
};

}  // namespace klproj
