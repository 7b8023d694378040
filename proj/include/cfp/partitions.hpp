#ifndef CFP_PARTITIONS_HPP
#define CFP_PARTITIONS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace cfp {

/// Cluster sizes of a configuration, non-increasing.
struct SizePartition {
  std::vector<int> parts;

  int total() const;
  friend bool operator==(const SizePartition&, const SizePartition&) = default;
};

/// Occupancy form (m_1, ..., m_N) of a partition of N: m_i clusters of size i.
///
/// Stored dense with length N so that `m(i)` is O(1); serialized sparse as
/// (size, count) pairs.
class OccupancyPartition {
 public:
  OccupancyPartition() = default;
  /// Dense counts, counts[i - 1] = m_i. Throws InvalidArgument unless the
  /// counts are non-negative and the length equals sum i m_i.
  explicit OccupancyPartition(std::vector<int> counts);

  static OccupancyPartition from_sparse(int n, std::span<const std::pair<int, int>> size_counts);

  int n() const { return static_cast<int>(counts_.size()); }
  /// m_i for 1 <= i <= n(); 0 outside that range.
  int m(int i) const { return i >= 1 && i <= n() ? counts_[i - 1] : 0; }
  /// K = sum m_i.
  int clusters() const;
  const std::vector<int>& counts() const { return counts_; }

  SizePartition sizes() const;
  /// (size, count) pairs with count > 0, by ascending size.
  std::vector<std::pair<int, int>> sparse() const;
  /// sum over clusters of size^2, i.e. sum i^2 m_i.
  long long sum_squares() const;

  friend bool operator==(const OccupancyPartition&, const OccupancyPartition&) = default;
  friend auto operator<=>(const OccupancyPartition& a, const OccupancyPartition& b) { return a.counts_ <=> b.counts_; }

 private:
  std::vector<int> counts_;
};

OccupancyPartition occupancy_from_sizes(const SizePartition& sizes);

/// Ordered table of occupancy partitions with reverse lookup.
///
/// Order is reverse-lexicographic on the size form, largest part first:
/// for N = 4 that is (4), (3,1), (2,2), (2,1,1), (1,1,1,1).
class PartitionIndex {
 public:
  PartitionIndex() = default;
  PartitionIndex(int n, std::vector<OccupancyPartition> table);

  int n() const { return n_; }
  std::size_t size() const { return table_.size(); }
  bool empty() const { return table_.empty(); }
  const OccupancyPartition& operator[](std::size_t i) const { return table_[i]; }
  auto begin() const { return table_.begin(); }
  auto end() const { return table_.end(); }

  /// Index of `p` in the table, or nullopt when absent.
  std::optional<std::size_t> lookup(const OccupancyPartition& p) const;

 private:
  int n_ = 0;
  std::vector<OccupancyPartition> table_;
  std::map<std::vector<int>, std::size_t> index_;
};

/// Largest N accepted for full enumeration: 128, or CFP_MAX_N when set.
int enumeration_cap();

PartitionIndex enumerate_occupancy(int n, std::optional<int> max_size = std::nullopt);
PartitionIndex enumerate_occupancy_given_k(int n, int k, std::optional<int> max_size = std::nullopt);

/// Calls `visit(const OccupancyPartition&)` for every partition of n with at
/// most `max_size` per part (and exactly k parts when k > 0), in canonical
/// order, without materializing the table.
template <class Visit>
void for_each_partition(int n, int max_size, int k, Visit&& visit);

}  // namespace cfp

#include "cfp/detail/partitions_impl.hpp"

#endif  // CFP_PARTITIONS_HPP
