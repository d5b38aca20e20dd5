#include "mdrscreen/slicing.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace mdr {

int default_slice_count(std::size_t group_size) {
    if (group_size >= 10) return 5;
    return std::max<int>(1, static_cast<int>(group_size / 2));
}

namespace {

struct GroupSlices {
    std::vector<double> cuts;
    std::vector<std::size_t> counts;
};

// Slices one status group; writes the within-group slice index (0-based) of
// each member into `slice_of`.
GroupSlices slice_group(const std::vector<double>& time, const std::vector<std::size_t>& members, int h,
                        std::uint8_t status, std::vector<int>& slice_of) {
    const std::size_t m = members.size();
    const auto hs = static_cast<std::size_t>(h);
    const std::string group = status == 1 ? "event" : "censored";
    if (m < hs || m == 0) {
        throw Error(ErrorCode::GroupTooSmall, group + " group has " + std::to_string(m) + " observations but " +
                                                  std::to_string(h) + " slices were requested");
    }

    std::vector<std::size_t> order = members;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return time[a] < time[b]; });

    std::vector<std::size_t> target(hs - 1);
    for (std::size_t j = 1; j < hs; ++j) target[j - 1] = (2 * j * m + hs) / (2 * hs);

    GroupSlices out;
    out.counts.assign(hs, 0);
    std::size_t slice = 0;
    std::size_t cumulative = 0;
    std::size_t i = 0;
    while (i < m) {
        std::size_t block_end = i + 1;
        while (block_end < m && time[order[block_end]] == time[order[i]]) ++block_end;
        for (std::size_t k = i; k < block_end; ++k) slice_of[order[k]] = static_cast<int>(slice);
        out.counts[slice] += block_end - i;
        cumulative = block_end;
        const double block_time = time[order[i]];
        while (slice + 1 < hs && cumulative >= target[slice]) {
            if (out.counts[slice] == 0) break;
            out.cuts.push_back(block_time);
            ++slice;
        }
        i = block_end;
    }
    if (out.cuts.size() != hs - 1 || std::find(out.counts.begin(), out.counts.end(), 0u) != out.counts.end()) {
        throw Error(ErrorCode::DegenerateTimes, group + " group times have too many ties to form " +
                                                    std::to_string(h) + " non-empty slices");
    }
    return out;
}

}  // namespace

SlicePartition partition_slices(const SurvivalDataset& data, int h_event, int h_censored) {
    if (h_event < 2) throw Error(ErrorCode::InvalidArgument, "h_event must be >= 2");
    if (h_censored < 1) throw Error(ErrorCode::InvalidArgument, "h_censored must be >= 1");

    const auto& time = data.observed_time();
    const auto& status = data.status();
    std::vector<std::size_t> censored;
    std::vector<std::size_t> events;
    for (std::size_t i = 0; i < data.n(); ++i) (status[i] == 1 ? events : censored).push_back(i);

    std::vector<int> within(data.n(), 0);
    const GroupSlices g0 = slice_group(time, censored, h_censored, 0, within);
    const GroupSlices g1 = slice_group(time, events, h_event, 1, within);

    SlicePartition part;
    part.boundaries_censored = g0.cuts;
    part.boundaries_event = g1.cuts;
    for (int j = 1; j <= h_censored; ++j) part.labels.push_back({0, j});
    for (int j = 1; j <= h_event; ++j) part.labels.push_back({1, j});
    part.counts = g0.counts;
    part.counts.insert(part.counts.end(), g1.counts.begin(), g1.counts.end());

    part.membership.resize(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        part.membership[i] = status[i] == 1 ? h_censored + within[i] : within[i];
    }
    const auto n = static_cast<double>(data.n());
    part.probs.reserve(part.counts.size());
    for (std::size_t c : part.counts) part.probs.push_back(static_cast<double>(c) / n);
    return part;
}

SlicePartition partition_slices_default(const SurvivalDataset& data, int h_event, int h_censored) {
    if (h_event <= 0) h_event = default_slice_count(data.count_status(1));
    if (h_censored <= 0) h_censored = default_slice_count(data.count_status(0));
    return partition_slices(data, h_event, h_censored);
}

Eigen::MatrixXd slice_indicator_matrix(const SlicePartition& partition) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(partition.n()),
                                              static_cast<Eigen::Index>(partition.slice_count()));
    for (std::size_t i = 0; i < partition.n(); ++i) m(static_cast<Eigen::Index>(i), partition.membership[i]) = 1.0;
    return m;
}

}  // namespace mdr
