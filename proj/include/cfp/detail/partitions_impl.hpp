#ifndef CFP_DETAIL_PARTITIONS_IMPL_HPP
#define CFP_DETAIL_PARTITIONS_IMPL_HPP

#include <algorithm>
#include <vector>

namespace cfp {

namespace detail {

// Depth-first over size forms, largest part first. `parts_left` < 0 means
// the part count is free.
template <class Visit>
void partitions_rec(int remaining, int max_part, int parts_left, std::vector<int>& counts, Visit& visit,
                    OccupancyPartition& scratch) {
  if (remaining == 0) {
    if (parts_left <= 0) {
      scratch = OccupancyPartition(counts);
      visit(static_cast<const OccupancyPartition&>(scratch));
    }
    return;
  }
  if (parts_left == 0) return;
  int hi = std::min(remaining, max_part);
  if (parts_left > 0) {
    // The remaining parts_left - 1 parts need at least one particle each.
    hi = std::min(hi, remaining - (parts_left - 1));
  }
  for (int part = hi; part >= 1; --part) {
    if (parts_left > 0 && static_cast<long long>(part) * parts_left < remaining) break;
    ++counts[part - 1];
    partitions_rec(remaining - part, part, parts_left > 0 ? parts_left - 1 : -1, counts, visit, scratch);
    --counts[part - 1];
  }
}

}  // namespace detail

template <class Visit>
void for_each_partition(int n, int max_size, int k, Visit&& visit) {
  if (n <= 0) return;
  std::vector<int> counts(static_cast<std::size_t>(n), 0);
  OccupancyPartition scratch;
  detail::partitions_rec(n, std::min(max_size, n), k > 0 ? k : -1, counts, visit, scratch);
}

}  // namespace cfp

#endif  // CFP_DETAIL_PARTITIONS_IMPL_HPP
