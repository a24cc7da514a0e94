#pragma once

// Integer partitions: the index set of Verma monomials
// L_{-p[0]} L_{-p[1]} ... L_{-p[k-1]} Phi with p weakly decreasing.

#include <cstdint>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace virbound {

class Partition {
 public:
  Partition() = default;
  explicit Partition(std::vector<int> parts) : parts_(std::move(parts)) {
    for (std::size_t i = 0; i < parts_.size(); ++i) {
      if (parts_[i] <= 0) throw std::invalid_argument("partition parts must be positive");
      if (i > 0 && parts_[i] > parts_[i - 1])
        throw std::invalid_argument("partition parts must be weakly decreasing");
    }
  }

  const std::vector<int>& parts() const { return parts_; }
  std::size_t length() const { return parts_.size(); }
  bool empty() const { return parts_.empty(); }
  int weight() const { return std::accumulate(parts_.begin(), parts_.end(), 0); }
  int largest() const { return parts_.empty() ? 0 : parts_.front(); }

  /// Partition with the largest part removed.
  Partition tail() const {
    Partition t;
    if (!parts_.empty()) t.parts_.assign(parts_.begin() + 1, parts_.end());
    return t;
  }

  /// Prepends a part that is at least as large as the current largest.
  Partition with_leading(int part) const {
    if (part < largest()) throw std::invalid_argument("leading part must dominate");
    Partition p;
    p.parts_.reserve(parts_.size() + 1);
    p.parts_.push_back(part);
    p.parts_.insert(p.parts_.end(), parts_.begin(), parts_.end());
    return p;
  }

  friend bool operator==(const Partition& a, const Partition& b) { return a.parts_ == b.parts_; }
  friend bool operator!=(const Partition& a, const Partition& b) { return !(a == b); }
  friend bool operator<(const Partition& a, const Partition& b) { return a.parts_ < b.parts_; }

  friend std::ostream& operator<<(std::ostream& os, const Partition& p) {
    os << '(';
    for (std::size_t i = 0; i < p.parts_.size(); ++i) os << (i ? "," : "") << p.parts_[i];
    return os << ')';
  }

 private:
  std::vector<int> parts_;
};

namespace detail {
inline void partitions_bounded(int remaining, int max_part, std::vector<int>& prefix,
                               std::vector<Partition>& out) {
  if (remaining == 0) {
    out.emplace_back(prefix);
    return;
  }
  for (int part = std::min(remaining, max_part); part >= 1; --part) {
    prefix.push_back(part);
    partitions_bounded(remaining - part, part, prefix, out);
    prefix.pop_back();
  }
}
}  // namespace detail

/// All partitions of k in reverse-lexicographic order:
/// 4 -> (4), (3,1), (2,2), (2,1,1), (1,1,1,1). k = 0 gives the empty partition.
inline std::vector<Partition> enumerate_partitions(int k) {
  if (k < 0) throw std::invalid_argument("partition weight must be nonnegative");
  std::vector<Partition> out;
  std::vector<int> prefix;
  detail::partitions_bounded(k, k, prefix, out);
  return out;
}

/// Partition numbers p(0..k) by the standard coin-change recurrence.
inline std::vector<std::uint64_t> partition_numbers(int k) {
  std::vector<std::uint64_t> p(static_cast<std::size_t>(k) + 1, 0);
  p[0] = 1;
  for (int part = 1; part <= k; ++part)
    for (int w = part; w <= k; ++w) p[w] += p[w - part];
  return p;
}

/// Position of each partition of a fixed weight within enumerate_partitions order.
class PartitionIndex {
 public:
  explicit PartitionIndex(int k) : level_(k), partitions_(enumerate_partitions(k)) {
    for (std::size_t i = 0; i < partitions_.size(); ++i) index_.emplace(partitions_[i], i);
  }
  int level() const { return level_; }
  std::size_t size() const { return partitions_.size(); }
  const Partition& operator[](std::size_t i) const { return partitions_[i]; }
  const std::vector<Partition>& partitions() const { return partitions_; }
  std::size_t index_of(const Partition& p) const {
    auto it = index_.find(p);
    if (it == index_.end()) throw std::out_of_range("partition not in this level");
    return it->second;
  }

 private:
  int level_;
  std::vector<Partition> partitions_;
  std::map<Partition, std::size_t> index_;
};

}  // namespace virbound
