#include "mdrscreen/screening.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace mdr {

std::vector<std::size_t> rank_order(const IndexVector& indices) {
    const auto& v = indices.values();
    const auto& ids = indices.ids();
    std::vector<std::size_t> order(indices.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (v[a] != v[b]) return v[a] > v[b];
        return ids[a] < ids[b];
    });
    return order;
}

ScreeningResult select_threshold(const IndexVector& indices, double gamma) {
    if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "threshold must be nonnegative");
    ScreeningResult r;
    r.method = Method::Sis;
    r.indices = indices;
    for (std::size_t pos : rank_order(indices)) {
        if (indices.values()[pos] >= gamma) r.selected.push_back(indices.ids()[pos]);
    }
    r.config_echo["threshold"] = gamma;
    return r;
}

ScreeningResult select_top(const IndexVector& indices, std::size_t d) {
    if (d < 1 || d > indices.size()) {
        throw Error(ErrorCode::DTooLarge, "d = " + std::to_string(d) + " but " + std::to_string(indices.size()) +
                                              " candidates are available");
    }
    const auto order = rank_order(indices);
    ScreeningResult r;
    r.method = Method::Sis;
    r.indices = indices;
    r.selected.reserve(d);
    for (std::size_t i = 0; i < d; ++i) r.selected.push_back(indices.ids()[order[i]]);

    const double cutoff = indices.values()[order[d - 1]];
    for (std::size_t i = d; i < order.size() && indices.values()[order[i]] == cutoff; ++i) ++r.boundary_ties;
    if (r.boundary_ties > 0) {
        r.warnings.push_back(std::to_string(r.boundary_ties) +
                             " unselected candidate(s) tie with the d-th largest index; broken by ascending id");
    }
    r.config_echo["top"] = d;
    return r;
}

std::size_t default_dn(std::size_t n) {
    if (n < 3) throw Error(ErrorCode::InvalidArgument, "d_n needs n >= 3");
    const double nd = static_cast<double>(n);
    return static_cast<std::size_t>(std::floor(nd / std::log(nd)));
}

}  // namespace mdr
