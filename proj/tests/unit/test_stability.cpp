#include <doctest.h>

#include <set>

#include "../support.hpp"
#include "mdrscreen/simulation.hpp"
#include "mdrscreen/stability.hpp"

using namespace mdr;

namespace {

SurvivalDataset simulated(Model m, std::size_t n, std::size_t p, double rho, std::uint64_t seed) {
    Rng rng = keyed_rng(seed, 0);
    const Eigen::MatrixXd x = gen_covariates(n, p, rho, rng);
    const auto resp = gen_response(m, x, rng);
    return validate_dataset(x, resp.t_obs, resp.status);
}

}  // namespace

TEST_CASE("subsample of size n-1 leaves out exactly one row") {
    const auto data = simulated(Model::M1, 30, 6, 0.0, 61);
    for (std::uint64_t r = 0; r < 20; ++r) {
        Rng rng = keyed_rng(62, r);
        const auto rows = subsample_rows(data, 29, rng);
        CHECK(rows.size() == 29);
        CHECK(std::set<std::size_t>(rows.begin(), rows.end()).size() == 29);
        CHECK(std::is_sorted(rows.begin(), rows.end()));
        CHECK(rows.back() < 30);
    }
}

TEST_CASE("fixed seed reproduces the subsample sequence") {
    const auto data = simulated(Model::M1, 50, 6, 0.0, 63);
    Rng a = keyed_rng(64, 3);
    Rng b = keyed_rng(64, 3);
    for (int i = 0; i < 5; ++i) CHECK(subsample_rows(data, 40, a) == subsample_rows(data, 40, b));
    Rng c = keyed_rng(64, 3);
    const auto sub = subsample_without_replacement(data, 40, c);
    Rng d = keyed_rng(64, 3);
    CHECK(sub == data.select_rows(subsample_rows(data, 40, d)));
}

TEST_CASE("every row is equally likely to be drawn") {
    // Balanced groups: rejecting single-group draws keeps rows exchangeable.
    const auto base = simulated(Model::M1, 20, 6, 0.0, 65);
    std::vector<int> status(20);
    for (int i = 0; i < 20; ++i) status[static_cast<std::size_t>(i)] = i % 2;
    const auto data = validate_dataset(base.covariates(), base.observed_time(), status);
    std::vector<int> hits(20, 0);
    Rng rng = keyed_rng(66, 0);
    const int draws = 20000;
    for (int i = 0; i < draws; ++i) {
        for (std::size_t r : subsample_rows(data, 5, rng)) ++hits[r];
    }
    // Expected 5000 per row; the binomial sd is about 61.
    for (int h : hits) CHECK(std::abs(h - 5000) < 350);
}

TEST_CASE("a subsample that cannot contain both groups fails") {
    const auto data = simulated(Model::M1, 30, 6, 0.0, 67);
    Rng rng = keyed_rng(68, 0);
    try {
        subsample_rows(data, 1, rng);
        FAIL("expected SubsampleDegenerate");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SubsampleDegenerate);
    }
    StabilityConfig config;
    config.n_s = 1;
    config.b = 5;
    config.stage_sizes = {1};
    try {
        mdr_ss(data, config);
        FAIL("expected the run to abort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SubsampleDegenerate);
    }
}

TEST_CASE("configuration validation") {
    const auto data = simulated(Model::M1, 30, 6, 0.0, 69);
    StabilityConfig c;
    CHECK(resolved_subsample_size(c, 200) == 160);
    CHECK_NOTHROW(validate_config(c, 30));
    c.n_s = 30;
    CHECK_THROWS_AS(validate_config(c, 30), Error);
    c = {};
    c.b = 0;
    CHECK_THROWS_AS(validate_config(c, 30), Error);
    c = {};
    c.pi0 = 0.0;
    CHECK_THROWS_AS(validate_config(c, 30), Error);
    c.pi0 = 1.5;
    CHECK_THROWS_AS(validate_config(c, 30), Error);
    c = {};
    c.stage_sizes = {2, -1};
    CHECK_THROWS_AS(mdr_ss(data, c), Error);
}

TEST_CASE("a single subsample reproduces one MDR-IS run") {
    const auto data = simulated(Model::M3, 100, 40, 0.4, 70);
    StabilityConfig config;
    config.b = 1;
    config.seed = 71;
    config.pi0 = 1.0;
    const auto ss = mdr_ss(data, config);
    for (double f : ss.frequencies) CHECK((f == 0.0 || f == 1.0));
    CHECK_NOTHROW(check_invariants(ss, config.pi0));

    Rng rng = keyed_rng(71, 0);
    const auto sub = subsample_without_replacement(data, 80, rng);
    const auto stages = default_stage_plan(default_dn(80));
    const auto is = mdr_is(sub, partition_slices_default(sub), stages);
    std::vector<CovariateId> a = ss.selected;
    std::vector<CovariateId> b = is.selected;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    CHECK(ss.stage_sizes == stages);
}

TEST_CASE("frequencies, selection order and echo") {
    const auto data = simulated(Model::M4, 120, 60, 0.8, 72);
    StabilityConfig config;
    config.b = 20;
    config.seed = 73;
    const auto r = mdr_ss(data, config);
    CHECK(r.frequencies.size() == 60);
    CHECK(r.indices.values() == r.frequencies);
    CHECK_NOTHROW(check_invariants(r, config.pi0));
    for (std::size_t i = 1; i < r.selected.size(); ++i) {
        const double prev = r.frequencies[static_cast<std::size_t>(r.selected[i - 1] - 1)];
        const double cur = r.frequencies[static_cast<std::size_t>(r.selected[i] - 1)];
        CHECK(prev >= cur);
        if (prev == cur) CHECK(r.selected[i - 1] < r.selected[i]);
    }
    CHECK(r.config_echo["B"] == 20);
    CHECK(r.config_echo["n_s"] == 96);
    CHECK(r.failed_subsamples == 0);

    const auto again = mdr_ss(data, config, 4);
    CHECK(again.frequencies == r.frequencies);
    CHECK(again.selected == r.selected);
}

TEST_CASE("property: raising pi0 never adds covariates") {
    CHECK(mdrtest::check_pi0_monotone(74, 15).empty());
}
