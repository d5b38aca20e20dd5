#include "mdrscreen/mdr_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdrscreen/numeric.hpp"
#include "parallel.hpp"

namespace mdr {

StandardizedColumn standardize(std::span<const double> column) {
    const std::size_t n = column.size();
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "standardize needs at least 2 observations");

    StandardizedColumn out;
    out.mean = compensated_mean(column);
    CompensatedSum ss;
    double scale = 0.0;
    for (double x : column) {
        const double d = x - out.mean;
        ss.add(d * d);
        scale = std::max(scale, std::abs(x));
    }
    out.sd = std::sqrt(ss.value() / static_cast<double>(n));
    if (!(out.sd > 64.0 * std::numeric_limits<double>::epsilon() * scale)) {
        throw Error(ErrorCode::ZeroVariance, "column is constant");
    }
    out.z.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.z[i] = (column[i] - out.mean) / out.sd;
    return out;
}

SliceMoments slice_moments(const StandardizedColumn& z, const SlicePartition& partition) {
    if (z.z.size() != partition.n()) {
        throw Error(ErrorCode::DimensionMismatch, "column length differs from partition size");
    }
    const std::size_t slices = partition.slice_count();
    std::vector<CompensatedSum> su(slices);
    std::vector<CompensatedSum> sv(slices);
    for (std::size_t i = 0; i < z.z.size(); ++i) {
        const auto s = static_cast<std::size_t>(partition.membership[i]);
        su[s].add(z.z[i]);
        sv[s].add(z.z[i] * z.z[i]);
    }
    const auto n = static_cast<double>(partition.n());
    SliceMoments m;
    m.u.resize(slices);
    m.v.resize(slices);
    for (std::size_t s = 0; s < slices; ++s) {
        m.u[s] = su[s].value() / n;
        m.v[s] = sv[s].value() / n;
    }
    return m;
}

double mdr_index(const SliceMoments& moments, std::span<const double> probs) {
    if (moments.u.size() != probs.size() || moments.v.size() != probs.size()) {
        throw Error(ErrorCode::DimensionMismatch, "moments and probabilities are not aligned");
    }
    CompensatedSum second;
    CompensatedSum first;
    for (std::size_t s = 0; s < probs.size(); ++s) {
        const double p = probs[s];
        if (!(p > 0.0)) throw Error(ErrorCode::InvalidArgument, "slice probability must be positive");
        const double dv = moments.v[s] / p - 1.0;
        second.add(p * dv * dv);
        first.add(moments.u[s] * moments.u[s] / p);
    }
    const double f = first.value();
    return 2.0 * second.value() + 4.0 * f * f;
}

double mdr_index(std::span<const double> column, const SlicePartition& partition) {
    return mdr_index(slice_moments(standardize(column), partition), partition.probs);
}

double mdr_index_bruteforce(const StandardizedColumn& z, const SlicePartition& partition) {
    if (z.z.size() != partition.n()) {
        throw Error(ErrorCode::DimensionMismatch, "column length differs from partition size");
    }
    const std::size_t slices = partition.slice_count();
    std::vector<std::vector<double>> members(slices);
    for (std::size_t i = 0; i < z.z.size(); ++i) {
        members[static_cast<std::size_t>(partition.membership[i])].push_back(z.z[i]);
    }
    CompensatedSum total;
    for (std::size_t s = 0; s < slices; ++s) {
        for (std::size_t t = 0; t < slices; ++t) {
            CompensatedSum d;
            for (double a : members[s]) {
                for (double b : members[t]) d.add((a - b) * (a - b));
            }
            const double mean_d =
                d.value() / static_cast<double>(members[s].size() * members[t].size());
            const double r = 2.0 - mean_d;
            total.add(partition.probs[s] * partition.probs[t] * r * r);
        }
    }
    return total.value();
}

IndexBatch mdr_index_all(const SurvivalDataset& data, const SlicePartition& partition, int threads) {
    if (partition.n() != data.n()) {
        throw Error(ErrorCode::DimensionMismatch, "partition and dataset sizes differ");
    }
    std::vector<double> values(data.p(), 0.0);
    std::vector<char> constant(data.p(), 0);

    detail::parallel_for(data.p(), threads, [&](std::size_t k) {
        try {
            values[k] = mdr_index(data.column(static_cast<CovariateId>(k + 1)), partition);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::ZeroVariance) throw;
            constant[k] = 1;
        }
    });

    IndexBatch batch;
    std::vector<CovariateId> ids(data.p());
    for (std::size_t k = 0; k < data.p(); ++k) {
        ids[k] = static_cast<CovariateId>(k + 1);
        if (constant[k]) batch.warnings.push_back({ids[k], "constant column scored 0"});
    }
    batch.indices = IndexVector(std::move(values), std::move(ids));
    return batch;
}

}  // namespace mdr
