#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "testutil.hpp"
#include "tft/interpret.hpp"

using namespace tft;

namespace {

TFTConfig small_config(int k, int tau, int m_past) {
    TFTConfig cfg;
    cfg.lookback = k;
    cfg.horizon = tau;
    cfg.d_model = 8;
    cfg.num_heads = 2;
    cfg.dropout = 0.0;
    cfg.variables.push_back({"amp", false, 0});
    cfg.static_ids.push_back(0);
    for (int j = 0; j < m_past; ++j) {
        cfg.variables.push_back({"p" + std::to_string(j), false, 0});
        cfg.past_ids.push_back(static_cast<int>(cfg.variables.size()) - 1);
    }
    cfg.variables.push_back({"xk", false, 0});
    cfg.past_ids.push_back(static_cast<int>(cfg.variables.size()) - 1);
    cfg.future_ids.push_back(static_cast<int>(cfg.variables.size()) - 1);
    cfg.validate();
    return cfg;
}

WindowedSample random_sample(const TFTConfig& cfg, RngState& rng) {
    WindowedSample s;
    s.entity = "e0";
    s.statics = Mat::Zero(1, cfg.static_ids.size());
    s.past = Mat(cfg.lookback + 1, cfg.past_ids.size());
    s.future = Mat(cfg.horizon, cfg.future_ids.size());
    s.targets = Eigen::VectorXd(cfg.horizon);
    for (int i = 0; i < s.statics.size(); ++i) s.statics(0, i) = rng.next_gaussian();
    for (int i = 0; i < s.past.size(); ++i) s.past.data()[i] = rng.next_gaussian();
    for (int i = 0; i < s.future.size(); ++i) s.future.data()[i] = rng.next_gaussian();
    for (int i = 0; i < s.targets.size(); ++i) s.targets[i] = rng.next_gaussian();
    return s;
}

Eigen::VectorXd simplex(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<int>(v.size()));
    int i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

}  // namespace

TEST_CASE("percentile interpolation") {
    CHECK(percentile({4.0}, 0.1) == 4.0);
    CHECK(percentile({4.0}, 0.9) == 4.0);
    CHECK(percentile({1.0, 2.0, 3.0}, 0.5) == 2.0);
    CHECK(percentile({1.0, 2.0}, 0.5) == doctest::Approx(1.5));
    CHECK(percentile({0.0, 10.0}, 0.25) == doctest::Approx(2.5));
    CHECK_THROWS_AS(percentile({}, 0.5), ContractError);
}

TEST_CASE("aggregate importance degenerate cases") {
    TFTConfig cfg = small_config(2, 1, 1);
    ForecastOutput o;
    o.vsn_static = Mat::Constant(1, 1, 1.0);
    o.vsn_past = Mat(1, 2);
    o.vsn_past << 0.3, 0.7;
    o.vsn_future = Mat::Constant(1, 1, 1.0);
    ImportanceReport r = aggregate_importance({o}, cfg);
    REQUIRE(r.statics.size() == 1);
    CHECK(r.statics[0].p10 == 1.0);
    CHECK(r.statics[0].p50 == 1.0);
    CHECK(r.statics[0].p90 == 1.0);
    REQUIRE(r.past.size() == 2);
    CHECK(r.past[0].p10 == 0.3);
    CHECK(r.past[0].p50 == 0.3);
    CHECK(r.past[0].p90 == 0.3);
    CHECK_THROWS_AS(aggregate_importance({}, cfg), ContractError);
}

TEST_CASE("aggregate importance matches an independent percentile routine") {
    TFTConfig cfg = small_config(2, 1, 1);
    RngState rng(7);
    std::vector<ForecastOutput> outputs;
    std::vector<double> col0;
    for (int i = 0; i < 100; ++i) {
        ForecastOutput o;
        o.vsn_static = Mat::Constant(1, 1, 1.0);
        const double w = rng.next_uniform();
        o.vsn_past = Mat(1, 2);
        o.vsn_past << w, 1.0 - w;
        o.vsn_future = Mat::Constant(1, 1, 1.0);
        outputs.push_back(o);
        col0.push_back(w);
    }
    ImportanceReport r = aggregate_importance(outputs, cfg);

    // independent linear-interpolation percentile
    auto ref_pct = [&](double q) {
        std::vector<double> xs = col0;
        std::sort(xs.begin(), xs.end());
        const double rank = q * (xs.size() - 1);
        const int lo = static_cast<int>(rank);
        const int hi = std::min<int>(lo + 1, xs.size() - 1);
        return xs[lo] * (1.0 - (rank - lo)) + xs[hi] * (rank - lo);
    };
    CHECK(r.past[0].p10 == doctest::Approx(ref_pct(0.10)).epsilon(1e-12));
    CHECK(r.past[0].p50 == doctest::Approx(ref_pct(0.50)).epsilon(1e-12));
    CHECK(r.past[0].p90 == doctest::Approx(ref_pct(0.90)).epsilon(1e-12));
    CHECK(r.past[0].p10 <= r.past[0].p50);
    CHECK(r.past[0].p50 <= r.past[0].p90);
}

TEST_CASE("attention decomposition identity") {
    RngState rng(9);
    TFTConfig cfg = small_config(2, 1, 2);  // N = 4
    TFTModel m = build_model(cfg, 11);
    for (int i = 0; i < 5; ++i) {
        WindowedSample s = random_sample(cfg, rng);
        CHECK(attention_decomposition_check(m, s) < 1e-10);
    }

    TFTConfig fixed_cfg = cfg;
    fixed_cfg.ablation.fixed_attention = true;
    TFTModel fixed = build_model(fixed_cfg, 11);
    WindowedSample s = random_sample(cfg, rng);
    CHECK(attention_decomposition_check(fixed, s) < 1e-10);

    // brute-force recomputation with explicit loops
    ForwardTrace trace;
    RngContext eval_ctx{RngState(0), 0.0, false};
    ForwardTensors f = tft_forward(m, s, eval_ctx, &trace);
    const int n = cfg.positions();
    const int dv = m.attention.Wv.cols();
    Mat manual = Mat::Zero(n, dv);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int c = 0; c < dv; ++c) {
                double theta_wv = 0.0;
                for (int d = 0; d < cfg.d_model; ++d) {
                    theta_wv += trace.theta(j, d) * m.attention.Wv.at(d, c);
                }
                manual(i, c) += f.attention.at(i, j) * theta_wv;
            }
        }
    }
    CHECK((manual - trace.pre_output).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("mean patterns") {
    TFTConfig cfg = small_config(2, 2, 1);  // N = 5
    RngState rng(13);
    auto random_attention = [&] {
        ForecastOutput o;
        o.attention = Mat::Zero(5, 5);
        for (int i = 0; i < 5; ++i) {
            double total = 0.0;
            for (int j = 0; j <= i; ++j) {
                o.attention(i, j) = rng.next_uniform() + 1e-3;
                total += o.attention(i, j);
            }
            for (int j = 0; j <= i; ++j) o.attention(i, j) /= total;
        }
        o.vsn_past = Mat::Ones(3, 2);
        o.vsn_future = Mat::Ones(2, 1);
        return o;
    };

    ForecastOutput single = random_attention();
    Mat one = mean_patterns({single}, cfg);
    CHECK((one.row(0).transpose() - single.attention.row(3).transpose()).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((one.row(1).transpose() - single.attention.row(4).transpose()).cwiseAbs().maxCoeff() ==
          0.0);

    std::vector<ForecastOutput> ten;
    for (int i = 0; i < 10; ++i) ten.push_back(random_attention());
    Mat mean = mean_patterns(ten, cfg);
    for (int tau = 1; tau <= 2; ++tau) {
        Eigen::VectorXd manual = Eigen::VectorXd::Zero(5);
        for (const auto& o : ten) manual += o.attention.row(cfg.lookback + tau).transpose();
        manual /= 10.0;
        CHECK((mean.row(tau - 1).transpose() - manual).cwiseAbs().maxCoeff() < 1e-15);
        CHECK(mean.row(tau - 1).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("bhattacharyya distance unit values") {
    CHECK(bhattacharyya_distance(simplex({0.2, 0.3, 0.5}), simplex({0.2, 0.3, 0.5})) == 0.0);
    CHECK(bhattacharyya_distance(simplex({1.0, 0.0}), simplex({0.0, 1.0})) == 1.0);
    const double expected = std::sqrt(1.0 - std::sqrt(0.5));
    CHECK(bhattacharyya_distance(simplex({0.5, 0.5}), simplex({1.0, 0.0})) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK_THROWS_AS(bhattacharyya_distance(simplex({-0.1, 1.1}), simplex({0.5, 0.5})),
                    ContractError);
}

TEST_CASE("bhattacharyya distance symmetry and range") {
    RngState rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::VectorXd p(6), q(6);
        for (int i = 0; i < 6; ++i) {
            p[i] = rng.next_uniform() + 1e-6;
            q[i] = rng.next_uniform() + 1e-6;
        }
        p /= p.sum();
        q /= q.sum();
        const double pq = bhattacharyya_distance(p, q);
        const double qp = bhattacharyya_distance(q, p);
        CHECK(std::abs(pq - qp) < 1e-12);
        CHECK(pq >= 0.0);
        CHECK(pq <= 1.0);
    }
}

TEST_CASE("constant attention gives zero regime distance") {
    TFTConfig cfg = small_config(2, 2, 1);
    Mat attention = Mat::Zero(5, 5);
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j <= i; ++j) attention(i, j) = 1.0 / (i + 1);
    }
    std::vector<ForecastOutput> outputs;
    std::vector<double> times;
    for (int t = 0; t < 8; ++t) {
        ForecastOutput o;
        o.attention = attention;
        o.vsn_past = Mat::Ones(3, 2);
        o.vsn_future = Mat::Ones(2, 1);
        outputs.push_back(o);
        times.push_back(t);
    }
    RegimeSeries r = regime_distance(outputs, times, cfg, 0.3);
    for (double d : r.dist) CHECK(d < 1e-9);
    CHECK(r.intervals.empty());
}

TEST_CASE("regime intervals merge consecutive flagged points") {
    TFTConfig cfg = small_config(1, 1, 1);  // N = 3
    auto make_out = [&](double left_mass) {
        ForecastOutput o;
        o.attention = Mat::Zero(3, 3);
        o.attention(0, 0) = 1.0;
        o.attention(1, 0) = 0.5;
        o.attention(1, 1) = 0.5;
        o.attention(2, 0) = left_mass;
        o.attention(2, 1) = (1.0 - left_mass) / 2;
        o.attention(2, 2) = (1.0 - left_mass) / 2;
        o.vsn_past = Mat::Ones(2, 2);
        o.vsn_future = Mat::Ones(1, 1);
        return o;
    };
    std::vector<ForecastOutput> outputs;
    std::vector<double> times;
    for (int t = 0; t < 9; ++t) {
        // three middle points deviate hard from the average pattern
        outputs.push_back(make_out(t >= 3 && t <= 5 ? 0.98 : 0.1));
        times.push_back(10.0 + t);
    }
    RegimeSeries r = regime_distance(outputs, times, cfg, 0.3);
    REQUIRE(r.intervals.size() == 1);
    CHECK(r.intervals[0].first == 13.0);
    CHECK(r.intervals[0].second == 15.0);
}

TEST_CASE("temporal patterns summarize the one-step row") {
    TFTConfig cfg = small_config(2, 2, 1);
    std::vector<ForecastOutput> outputs;
    for (int t = 0; t < 4; ++t) {
        ForecastOutput o;
        o.attention = Mat::Zero(5, 5);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j <= i; ++j) o.attention(i, j) = 1.0 / (i + 1);
        }
        o.vsn_past = Mat::Ones(3, 2);
        o.vsn_future = Mat::Ones(2, 1);
        outputs.push_back(o);
    }
    TemporalPattern p = temporal_patterns(outputs, cfg);
    REQUIRE(p.lags.size() == 3);  // n in {-2, -1, 0}
    CHECK(p.lags.front() == -2);
    CHECK(p.lags.back() == 0);
    for (std::size_t i = 0; i < p.lags.size(); ++i) {
        CHECK(p.mean[i] == doctest::Approx(0.25));  // one-step row has 4 visible positions
        CHECK(p.p50[i] == doctest::Approx(0.25));
    }
    CHECK(p.horizons == std::vector<int>{1, 2});
    CHECK(p.horizon_curves.rows() == 2);
}
