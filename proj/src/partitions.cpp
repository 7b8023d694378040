#include "cfp/partitions.hpp"

#include <cstdlib>
#include <string>

#include "cfp/errors.hpp"

namespace cfp {

int SizePartition::total() const {
  int s = 0;
  for (int p : parts) s += p;
  return s;
}

OccupancyPartition::OccupancyPartition(std::vector<int> counts) : counts_(std::move(counts)) {
  long long total = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) {
    if (counts_[i] < 0) throw InvalidArgument("negative occupancy count");
    total += static_cast<long long>(i + 1) * counts_[i];
  }
  if (total != static_cast<long long>(counts_.size()))
    throw InvalidArgument("occupancy counts do not sum to N: sum i*m_i = " + std::to_string(total) +
                          ", N = " + std::to_string(counts_.size()));
}

OccupancyPartition OccupancyPartition::from_sparse(int n, std::span<const std::pair<int, int>> size_counts) {
  if (n < 1) throw InvalidArgument("partition of N requires N >= 1");
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  for (auto [size, count] : size_counts) {
    if (size < 1 || size > n) throw InvalidArgument("cluster size " + std::to_string(size) + " out of range");
    if (count < 0) throw InvalidArgument("negative cluster count");
    counts[size - 1] += count;
  }
  return OccupancyPartition(std::move(counts));
}

int OccupancyPartition::clusters() const {
  int k = 0;
  for (int c : counts_) k += c;
  return k;
}

SizePartition OccupancyPartition::sizes() const {
  SizePartition s;
  for (int i = n(); i >= 1; --i)
    for (int j = 0; j < m(i); ++j) s.parts.push_back(i);
  return s;
}

std::vector<std::pair<int, int>> OccupancyPartition::sparse() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i <= n(); ++i)
    if (m(i) > 0) out.emplace_back(i, m(i));
  return out;
}

long long OccupancyPartition::sum_squares() const {
  long long s = 0;
  for (int i = 1; i <= n(); ++i) s += static_cast<long long>(i) * i * m(i);
  return s;
}

OccupancyPartition occupancy_from_sizes(const SizePartition& sizes) {
  if (sizes.parts.empty()) throw InvalidArgument("empty size partition");
  for (std::size_t i = 0; i < sizes.parts.size(); ++i) {
    if (sizes.parts[i] < 1) throw InvalidArgument("cluster sizes must be positive");
    if (i > 0 && sizes.parts[i] > sizes.parts[i - 1]) throw InvalidArgument("cluster sizes must be non-increasing");
  }
  std::vector<int> counts(static_cast<std::size_t>(sizes.total()), 0);
  for (int p : sizes.parts) ++counts[p - 1];
  return OccupancyPartition(std::move(counts));
}

PartitionIndex::PartitionIndex(int n, std::vector<OccupancyPartition> table) : n_(n), table_(std::move(table)) {
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (table_[i].n() != n_) throw InvalidArgument("partition of the wrong N in index");
    if (!index_.emplace(table_[i].counts(), i).second) throw InvalidArgument("duplicate partition in index");
  }
}

std::optional<std::size_t> PartitionIndex::lookup(const OccupancyPartition& p) const {
  const auto it = index_.find(p.counts());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int enumeration_cap() {
  if (const char* env = std::getenv("CFP_MAX_N")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return 128;
}

namespace {

void check_enumeration_args(int n, std::optional<int> max_size) {
  if (n < 1) throw InvalidArgument("N must be >= 1");
  if (max_size && *max_size < 1) throw InvalidArgument("max_size must be >= 1");
  if (n > enumeration_cap())
    throw ResourceError("full partition enumeration refused for N = " + std::to_string(n) + " (cap " +
                        std::to_string(enumeration_cap()) + "; set CFP_MAX_N to override)");
}

}  // namespace

PartitionIndex enumerate_occupancy(int n, std::optional<int> max_size) {
  check_enumeration_args(n, max_size);
  if (max_size && *max_size > n) throw InvalidArgument("max_size must not exceed N");
  std::vector<OccupancyPartition> table;
  for_each_partition(n, max_size.value_or(n), 0, [&](const OccupancyPartition& p) { table.push_back(p); });
  return PartitionIndex(n, std::move(table));
}

PartitionIndex enumerate_occupancy_given_k(int n, int k, std::optional<int> max_size) {
  check_enumeration_args(n, max_size);
  if (k < 1 || k > n) throw InvalidArgument("K must satisfy 1 <= K <= N");
  std::vector<OccupancyPartition> table;
  for_each_partition(n, max_size.value_or(n), k, [&](const OccupancyPartition& p) { table.push_back(p); });
  return PartitionIndex(n, std::move(table));
}

}  // namespace cfp
