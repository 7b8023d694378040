#ifndef CFP_IO_HPP
#define CFP_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "cfp/exact.hpp"
#include "cfp/kernels.hpp"
#include "cfp/pairtimes.hpp"
#include "cfp/partitions.hpp"
#include "cfp/simulate.hpp"

namespace cfp {

using Json = nlohmann::ordered_json;

// {"family": ..., "a": ..., "M": ..., "tables": {"a": [...], "C": [[...]], "F": [[...]]}}
// Numbers may be JSON numbers or strings ("1/3", "0.25").
KernelSpec kernel_spec_from_json(const Json& j);
Json kernel_spec_to_json(const KernelSpec& spec);
KernelSpec load_kernel_spec(const std::string& path);

// [[size, count], ...] by ascending size.
Json partition_to_json(const OccupancyPartition& m);
OccupancyPartition partition_from_json(int n, const Json& j);

Json number_json(const Rational& v);
Json number_json(double v);

template <class T>
Json cnk_table_to_json(const CnkTable<T>& table);

template <class P>
Json moment_report_to_json(const MomentReport<P>& report);

template <class P>
std::string pi_to_csv(const ClusterCountDistribution<P>& pi);

Json pair_times_to_json(const PairTimesReport& report);
Json sim_stats_to_json(const SimStats& stats);
std::string event_log_to_csv(const EventLog& log);

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

}  // namespace cfp

#endif  // CFP_IO_HPP
