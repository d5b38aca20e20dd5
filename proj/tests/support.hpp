#pragma once

// Hand-rolled generators and property checks shared by the unit tests and the
// acceptance binary. Each check returns an empty string on success and a
// description of the first counterexample otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mdrscreen/core_types.hpp"
#include "mdrscreen/iterative.hpp"
#include "mdrscreen/mdr_index.hpp"
#include "mdrscreen/rng.hpp"
#include "mdrscreen/screening.hpp"
#include "mdrscreen/slicing.hpp"
#include "mdrscreen/stability.hpp"

namespace mdrtest {

using mdr::Rng;

inline int uniform_int(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Covariates are a mix of normal, heavy-tailed, discrete and time-dependent
/// columns; times are rounded to a grid so that ties occur.
struct RandomCase {
    mdr::SurvivalDataset data;
    int h_event = 2;
    int h_censored = 1;
};

inline RandomCase random_case(Rng& rng, int n_lo = 20, int n_hi = 200, int p_lo = 1, int p_hi = 10) {
    const int n = uniform_int(rng, n_lo, n_hi);
    const int p = uniform_int(rng, p_lo, p_hi);
    std::normal_distribution<double> normal;
    std::vector<double> time(static_cast<std::size_t>(n));
    std::vector<int> status(static_cast<std::size_t>(n));
    const double censor_rate = uniform_real(rng, 0.2, 0.7);
    const double grid = uniform_int(rng, 0, 1) == 0 ? 0.0 : 0.25;
    for (int i = 0; i < n; ++i) {
        double t = std::exp(normal(rng));
        if (grid > 0) t = std::round(t / grid) * grid + grid;
        time[static_cast<std::size_t>(i)] = t;
        status[static_cast<std::size_t>(i)] = uniform_real(rng, 0, 1) < censor_rate ? 0 : 1;
    }
    // Keep at least four observations in each status group.
    for (int i = 0; i < 4; ++i) {
        status[static_cast<std::size_t>(i)] = 0;
        status[static_cast<std::size_t>(n - 1 - i)] = 1;
    }
    Eigen::MatrixXd x(n, p);
    for (int j = 0; j < p; ++j) {
        const int kind = uniform_int(rng, 0, 3);
        for (int i = 0; i < n; ++i) {
            const double e = normal(rng);
            switch (kind) {
                case 0: x(i, j) = e; break;
                case 1: x(i, j) = e * e * e; break;
                case 2: x(i, j) = static_cast<double>(uniform_int(rng, 0, 2)); break;
                default: x(i, j) = std::log(time[static_cast<std::size_t>(i)]) + 0.5 * e; break;
            }
        }
        // A discrete column may come out constant at small n.
        x(0, j) += 1.0;
    }
    RandomCase c;
    c.data = mdr::validate_dataset(x, time, status);
    const std::size_t n1 = c.data.count_status(1);
    const std::size_t n0 = c.data.count_status(0);
    c.h_event = uniform_int(rng, 2, static_cast<int>(std::min<std::size_t>(8, n1)));
    c.h_censored = uniform_int(rng, 1, static_cast<int>(std::min<std::size_t>(8, n0)));
    return c;
}

/// Partition that tolerates ties: falls back to fewer slices until every
/// slice is non-empty.
inline mdr::SlicePartition robust_partition(const RandomCase& c) {
    for (int he = c.h_event; he >= 2; --he) {
        for (int hc = c.h_censored; hc >= 1; --hc) {
            try {
                return mdr::partition_slices(c.data, he, hc);
            } catch (const mdr::Error&) {
            }
        }
    }
    return mdr::partition_slices(c.data, 2, 1);
}

inline mdr::SurvivalDataset with_covariates(const mdr::SurvivalDataset& d, const Eigen::MatrixXd& x) {
    return mdr::validate_dataset(x, d.observed_time(), d.status());
}

inline bool relative_close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// |mdr_index - mdr_index_bruteforce| over every covariate of `cases` random datasets.
inline std::string check_oracle_identity(std::uint64_t seed, int cases, double tol, double* worst = nullptr) {
    double max_diff = 0.0;
    for (int r = 0; r < cases; ++r) {
        Rng rng = mdr::keyed_rng(seed, static_cast<std::uint64_t>(r));
        const RandomCase c = random_case(rng);
        const mdr::SlicePartition part = robust_partition(c);
        for (int k = 1; k <= static_cast<int>(c.data.p()); ++k) {
            const auto col = c.data.column(k);
            mdr::StandardizedColumn z;
            try {
                z = mdr::standardize(col);
            } catch (const mdr::Error&) {
                continue;
            }
            const double fast = mdr::mdr_index(mdr::slice_moments(z, part), part.probs);
            const double slow = mdr::mdr_index_bruteforce(z, part);
            const double diff = std::abs(fast - slow);
            max_diff = std::max(max_diff, diff);
            if (!(diff <= tol)) {
                std::ostringstream os;
                os << "case " << r << " covariate " << k << ": " << fast << " vs " << slow;
                return os.str();
            }
        }
    }
    if (worst) *worst = max_diff;
    return {};
}

/// g(a x + b) against g(x). Power-of-two scales and sign flips leave the
/// standardized column bit-identical, so equality is exact there; other
/// affine maps agree to a relative 1e-10.
inline std::string check_affine_invariance(std::uint64_t seed, int cases) {
    for (int r = 0; r < cases; ++r) {
        Rng rng = mdr::keyed_rng(seed, static_cast<std::uint64_t>(r));
        const RandomCase c = random_case(rng);
        const mdr::SlicePartition part = robust_partition(c);
        const int k = uniform_int(rng, 1, static_cast<int>(c.data.p()));
        const auto col = c.data.column(k);
        double base = 0.0;
        try {
            base = mdr::mdr_index(col, part);
        } catch (const mdr::Error&) {
            continue;
        }
        const double exact_scales[] = {-1.0, 2.0, -4.0, 0.5, 1024.0};
        for (double a : exact_scales) {
            std::vector<double> y(col.begin(), col.end());
            for (double& v : y) v *= a;
            const double g = mdr::mdr_index(y, part);
            if (g != base) {
                std::ostringstream os;
                os << "case " << r << ": scale " << a << " gives " << g << " vs " << base;
                return os.str();
            }
        }
        for (int t = 0; t < 4; ++t) {
            double a = uniform_real(rng, 0.01, 100.0);
            if (uniform_int(rng, 0, 1) == 1) a = -a;
            const double b = uniform_real(rng, -50.0, 50.0);
            std::vector<double> y(col.begin(), col.end());
            for (double& v : y) v = a * v + b;
            const double g = mdr::mdr_index(y, part);
            if (!relative_close(g, base, 1e-10)) {
                std::ostringstream os;
                os << "case " << r << ": map " << a << "x+" << b << " gives " << g << " vs " << base;
                return os.str();
            }
        }
    }
    return {};
}

/// Relabeling slices (reordering the flat slice list) leaves g unchanged up
/// to summation order.
inline std::string check_slice_label_invariance(std::uint64_t seed, int cases) {
    for (int r = 0; r < cases; ++r) {
        Rng rng = mdr::keyed_rng(seed, static_cast<std::uint64_t>(r));
        const RandomCase c = random_case(rng);
        const mdr::SlicePartition part = robust_partition(c);
        std::vector<int> perm(part.slice_count());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        mdr::SlicePartition relabeled = part;
        for (std::size_t s = 0; s < perm.size(); ++s) {
            const auto to = static_cast<std::size_t>(perm[s]);
            relabeled.labels[to] = part.labels[s];
            relabeled.counts[to] = part.counts[s];
            relabeled.probs[to] = part.probs[s];
        }
        for (auto& m : relabeled.membership) m = perm[static_cast<std::size_t>(m)];
        for (int k = 1; k <= static_cast<int>(c.data.p()); ++k) {
            double a = 0.0;
            try {
                a = mdr::mdr_index(c.data.column(k), part);
            } catch (const mdr::Error&) {
                continue;
            }
            const double b = mdr::mdr_index(c.data.column(k), relabeled);
            if (!relative_close(a, b, 1e-12)) {
                std::ostringstream os;
                os << "case " << r << " covariate " << k << ": " << a << " vs " << b;
                return os.str();
            }
        }
    }
    return {};
}

/// select_top depends only on the ranks of the values: a strictly increasing
/// transform or a shuffle of the candidate order selects the same ids.
inline std::string check_select_top_rank_invariance(std::uint64_t seed, int cases) {
    for (int r = 0; r < cases; ++r) {
        Rng rng = mdr::keyed_rng(seed, static_cast<std::uint64_t>(r));
        const int p = uniform_int(rng, 1, 60);
        std::vector<double> values(static_cast<std::size_t>(p));
        std::vector<mdr::CovariateId> ids(static_cast<std::size_t>(p));
        for (int k = 0; k < p; ++k) {
            // Coarse grid to force ties.
            values[static_cast<std::size_t>(k)] = static_cast<double>(uniform_int(rng, 0, 12)) / 4.0;
            ids[static_cast<std::size_t>(k)] = k + 1;
        }
        const auto d = static_cast<std::size_t>(uniform_int(rng, 1, p));
        auto sorted_ids = [](std::vector<mdr::CovariateId> v) {
            std::sort(v.begin(), v.end());
            return v;
        };
        const auto base = mdr::select_top(mdr::IndexVector(values, ids), d);

        std::vector<double> mono(values);
        for (double& v : mono) v = std::exp(3.0 * v) + std::sqrt(v);
        const auto t1 = mdr::select_top(mdr::IndexVector(mono, ids), d);

        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<double> sv;
        std::vector<mdr::CovariateId> si;
        for (std::size_t i : order) {
            sv.push_back(values[i]);
            si.push_back(ids[i]);
        }
        const auto t2 = mdr::select_top(mdr::IndexVector(sv, si), d);

        if (base.selected.size() != d || t1.selected != base.selected ||
            sorted_ids(t2.selected) != sorted_ids(base.selected) || t1.boundary_ties != base.boundary_ties ||
            t2.boundary_ties != base.boundary_ties) {
            std::ostringstream os;
            os << "case " << r << ": selections differ under a rank-preserving change (d=" << d << ")";
            return os.str();
        }
    }
    return {};
}

/// With x_e orthogonal to every centered column of X_F, the coefficients are
/// zero and g_{e|F} equals the marginal g_e.
inline std::string check_orthogonal_noop(std::uint64_t seed, int cases) {
    for (int r = 0; r < cases; ++r) {
        Rng rng = mdr::keyed_rng(seed, static_cast<std::uint64_t>(r));
        // Walsh-type +-1 columns of length n = 2^m are exactly orthogonal and
        // centered in floating point.
        const int m = uniform_int(rng, 4, 7);
        const int n = 1 << m;
        const int p = uniform_int(rng, 2, std::min(m, 5));
        Eigen::MatrixXd x(n, p);
        std::vector<int> bits(static_cast<std::size_t>(p));
        std::iota(bits.begin(), bits.end(), 0);
        std::shuffle(bits.begin(), bits.end(), rng);
        for (int j = 0; j < p; ++j) {
            const double scale = std::ldexp(1.0, uniform_int(rng, -2, 2));
            const double shift = static_cast<double>(uniform_int(rng, -3, 3));
            for (int i = 0; i < n; ++i) x(i, j) = ((i >> bits[static_cast<std::size_t>(j)]) & 1 ? scale : -scale) + shift;
        }
        std::vector<double> time(static_cast<std::size_t>(n));
        std::vector<int> status(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            time[static_cast<std::size_t>(i)] = static_cast<double>(uniform_int(rng, 1, 1000)) + 1e-3 * i;
            status[static_cast<std::size_t>(i)] = i % 3 == 0 ? 0 : 1;
        }
        const auto data = mdr::validate_dataset(x, time, status);
        const auto part = mdr::partition_slices(data, 2, 2);
        const mdr::CovariateId e = uniform_int(rng, 1, p);
        std::vector<mdr::CovariateId> f;
        for (int k = 1; k <= p; ++k) {
            if (k != e) f.push_back(k);
        }
        const auto params = mdr::residual_params(data, f, e);
        if (params.coef.cwiseAbs().maxCoeff() != 0.0) return "case " + std::to_string(r) + ": nonzero coefficients";
        const double cond = mdr::conditional_index(data, part, f, e);
        const double marg = mdr::mdr_index(data.column(e), part);
        if (!relative_close(cond, marg, 1e-12)) {
            std::ostringstream os;
            os << "case " << r << ": conditional " << cond << " vs marginal " << marg;
            return os.str();
        }
    }
    return {};
}

/// Raising pi0 can only shrink the MDR-SS selection.
inline std::string check_pi0_monotone(std::uint64_t seed, int cases) {
    for (int r = 0; r < cases; ++r) {
        Rng rng = mdr::keyed_rng(seed, static_cast<std::uint64_t>(r));
        const RandomCase c = random_case(rng, 40, 80, 6, 12);
        mdr::StabilityConfig config;
        config.b = 12;
        config.seed = static_cast<std::uint64_t>(r) + 1;
        config.stage_sizes = {2, 2};
        config.h_event = 2;
        config.h_censored = 2;
        std::vector<mdr::CovariateId> previous;
        bool first = true;
        for (double pi0 : {0.1, 0.25, 0.4, 0.6, 0.8, 1.0}) {
            config.pi0 = pi0;
            mdr::ScreeningResult result;
            try {
                result = mdr::mdr_ss(c.data, config);
            } catch (const mdr::Error&) {
                break;
            }
            std::vector<mdr::CovariateId> sel = result.selected;
            std::sort(sel.begin(), sel.end());
            if (!first && !std::includes(previous.begin(), previous.end(), sel.begin(), sel.end())) {
                std::ostringstream os;
                os << "case " << r << ": selection at pi0=" << pi0 << " not a subset of the previous one";
                return os.str();
            }
            previous = std::move(sel);
            first = false;
        }
    }
    return {};
}

}  // namespace mdrtest
