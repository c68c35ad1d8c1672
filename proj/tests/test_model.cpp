#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <limits>

#include "reference_impl.hpp"
#include "testutil.hpp"
#include "tft/model.hpp"

using namespace tft;
using testutil::random_tensor;

namespace {

TFTConfig test_config(int k, int tau, int d, int heads) {
    TFTConfig cfg;
    cfg.lookback = k;
    cfg.horizon = tau;
    cfg.d_model = d;
    cfg.num_heads = heads;
    cfg.dropout = 0.1;
    cfg.variables = {
        {"amp", false, 0}, {"loc", true, 5},  {"y", false, 0},
        {"z", false, 0},   {"kc", true, 3},   {"xk", false, 0},
    };
    cfg.static_ids = {0, 1};
    cfg.past_ids = {2, 3, 4, 5};
    cfg.future_ids = {4, 5};
    cfg.validate();
    return cfg;
}

WindowedSample random_sample(const TFTConfig& cfg, RngState& rng) {
    WindowedSample s;
    s.entity = "e0";
    s.statics = Mat(1, cfg.static_ids.size());
    for (std::size_t j = 0; j < cfg.static_ids.size(); ++j) {
        const auto& v = cfg.variables[cfg.static_ids[j]];
        s.statics(0, j) = v.categorical ? static_cast<double>(rng.next_below(v.cardinality))
                                        : rng.next_gaussian();
    }
    s.past = Mat(cfg.lookback + 1, cfg.past_ids.size());
    for (int r = 0; r <= cfg.lookback; ++r) {
        for (std::size_t j = 0; j < cfg.past_ids.size(); ++j) {
            const auto& v = cfg.variables[cfg.past_ids[j]];
            s.past(r, j) = v.categorical ? static_cast<double>(rng.next_below(v.cardinality))
                                         : rng.next_gaussian();
        }
    }
    s.future = Mat(cfg.horizon, cfg.future_ids.size());
    for (int r = 0; r < cfg.horizon; ++r) {
        for (std::size_t j = 0; j < cfg.future_ids.size(); ++j) {
            const auto& v = cfg.variables[cfg.future_ids[j]];
            s.future(r, j) = v.categorical ? static_cast<double>(rng.next_below(v.cardinality))
                                           : rng.next_gaussian();
        }
    }
    s.targets = Eigen::VectorXd(cfg.horizon);
    for (int r = 0; r < cfg.horizon; ++r) s.targets[r] = rng.next_gaussian();
    return s;
}

RngContext eval_ctx() { return {RngState(0), 0.0, false}; }

}  // namespace

TEST_CASE("constant quantile heads ignore the input") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    TFTModel m = build_model(cfg, 7);
    for (auto& W : m.head.W) W.values_mut().setZero();
    for (auto& b : m.head.b) b.values_mut().setConstant(2.5);
    RngState rng(3);
    for (int i = 0; i < 3; ++i) {
        WindowedSample s = random_sample(cfg, rng);
        ForwardTensors f = tft_forward(m, s, eval_ctx());
        for (int j = 0; j < f.yhat.size(); ++j) CHECK(f.yhat.value(j) == 2.5);
    }
}

TEST_CASE("forward output shapes and causal mask") {
    TFTConfig cfg = test_config(4, 3, 8, 2);
    TFTModel m = build_model(cfg, 11);
    RngState rng(5);
    WindowedSample s = random_sample(cfg, rng);
    ForwardTensors f = tft_forward(m, s, eval_ctx());
    CHECK(f.yhat.shape() == std::vector<int>{3, 3});
    const int n = cfg.positions();
    CHECK(f.attention.shape() == std::vector<int>{n, n});
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) CHECK(f.attention.at(i, j) == 0.0);
    }
    CHECK(f.vsn_past.shape() == std::vector<int>{5, 4});
    CHECK(f.vsn_future.shape() == std::vector<int>{3, 2});
    CHECK(f.vsn_static.shape() == std::vector<int>{1, 2});
}

TEST_CASE("forward matches the straight-line reference") {
    RngState rng(17);
    TFTConfig base = test_config(4, 2, 8, 2);
    std::vector<AblationFlags> variants(6);
    variants[1].no_gating = true;
    variants[2].no_static_encoders = true;
    variants[3].fixed_variable_weights = true;
    variants[4].fixed_attention = true;
    variants[5].positional_encoding = true;
    for (const auto& flags : variants) {
        TFTConfig cfg = base;
        cfg.ablation = flags;
        TFTModel m = build_model(cfg, 23);
        WindowedSample s = random_sample(cfg, rng);
        ForwardTensors f = tft_forward(m, s, eval_ctx());
        refimpl::TftRef ref = refimpl::tft_forward(m, s);
        CAPTURE(flags.to_string());
        CHECK(testutil::max_abs_diff(f.yhat, ref.yhat) < 1e-10);
        CHECK(testutil::max_abs_diff(f.attention, ref.attention) < 1e-10);
        CHECK(testutil::max_abs_diff(f.vsn_past, ref.vsn_past) < 1e-10);
        CHECK(testutil::max_abs_diff(f.vsn_future, ref.vsn_future) < 1e-10);
    }
}

TEST_CASE("ablation with no flags reproduces the base model bit-exactly") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    TFTModel base = build_model(cfg, 41);
    TFTModel again = apply_ablation(base, AblationFlags{});
    auto pa = base.parameters();
    auto pb = again.parameters();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].first == pb[i].first);
        REQUIRE(pa[i].second.size() == pb[i].second.size());
        CHECK(std::memcmp(pa[i].second.array().data(), pb[i].second.array().data(),
                          sizeof(double) * pa[i].second.size()) == 0);
    }
    RngState rng(42);
    WindowedSample s = random_sample(cfg, rng);
    ForwardTensors fa = tft_forward(base, s, eval_ctx());
    ForwardTensors fb = tft_forward(again, s, eval_ctx());
    CHECK(std::memcmp(fa.yhat.array().data(), fb.yhat.array().data(),
                      sizeof(double) * fa.yhat.size()) == 0);
}

TEST_CASE("fixed attention is input independent") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    cfg.ablation.fixed_attention = true;
    TFTModel m = build_model(cfg, 9);
    RngState rng(10);
    WindowedSample s1 = random_sample(cfg, rng);
    WindowedSample s2 = random_sample(cfg, rng);
    ForwardTensors f1 = tft_forward(m, s1, eval_ctx());
    ForwardTensors f2 = tft_forward(m, s2, eval_ctx());
    CHECK((f1.attention.mat() - f2.attention.mat()).cwiseAbs().maxCoeff() == 0.0);
    // rows on the simplex over the unmasked prefix
    for (int i = 0; i < cfg.positions(); ++i) {
        double total = 0.0;
        for (int j = 0; j <= i; ++j) total += f1.attention.at(i, j);
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("gating ablation makes the removed gate parameters inert") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    cfg.ablation.no_gating = true;
    TFTModel m = build_model(cfg, 13);
    RngState rng(14);
    WindowedSample s = random_sample(cfg, rng);
    ForwardTensors before = tft_forward(m, s, eval_ctx());
    m.gate_seq.W4.values_mut().setRandom();
    m.gate_attn.b4.values_mut().setConstant(5.0);
    m.gate_final.W4.values_mut() *= 3.0;
    m.enrichment.glu.W4.values_mut().setConstant(-2.0);
    ForwardTensors after = tft_forward(m, s, eval_ctx());
    CHECK(std::memcmp(before.yhat.array().data(), after.yhat.array().data(),
                      sizeof(double) * before.yhat.size()) == 0);
}

TEST_CASE("identical static inputs give identical context vectors") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    TFTModel m = build_model(cfg, 15);
    RngState rng(16);
    WindowedSample s1 = random_sample(cfg, rng);
    WindowedSample s2 = random_sample(cfg, rng);
    s2.statics = s1.statics;
    ForwardTrace t1, t2;
    tft_forward(m, s1, eval_ctx(), &t1);
    tft_forward(m, s2, eval_ctx(), &t2);
    CHECK((t1.cs - t2.cs).cwiseAbs().maxCoeff() == 0.0);
    CHECK((t1.ce - t2.ce).cwiseAbs().maxCoeff() == 0.0);
    CHECK((t1.cc - t2.cc).cwiseAbs().maxCoeff() == 0.0);
    CHECK((t1.ch - t2.ch).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("opening the final gate exposes the direct skip path") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    TFTModel m = build_model(cfg, 19);
    m.gate_final.b4.values_mut().setConstant(30.0);  // sigmoid ~ 1
    RngState rng(20);
    WindowedSample s = random_sample(cfg, rng);
    ForwardTrace trace;
    tft_forward(m, s, eval_ctx(), &trace);
    Mat linear_path = refimpl::linear(trace.psi, m.gate_final.W5, m.gate_final.b5);
    Mat expected = refimpl::layer_norm(trace.phi_tilde + linear_path, m.ln_final_gain,
                                       m.ln_final_bias);
    CHECK((trace.psi_tilde - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("permuting past variables permutes weights and leaves forecasts unchanged") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    TFTModel a = build_model(cfg, 31);
    const std::vector<int> perm = {2, 0, 3, 1};  // new j holds old perm[j]
    const int m_vars = 4, d = cfg.d_model;

    TFTConfig pcfg = cfg;
    for (int j = 0; j < m_vars; ++j) pcfg.past_ids[j] = cfg.past_ids[perm[j]];
    TFTModel b = build_model(pcfg, 31);
    // Copy every parameter from a, permuting the past-VSN pieces.
    {
        auto pa = a.parameters();
        auto pb = b.parameters();
        REQUIRE(pa.size() == pb.size());
        for (std::size_t i = 0; i < pa.size(); ++i) {
            pb[i].second.values_mut() = pa[i].second.array();
        }
    }
    for (int j = 0; j < m_vars; ++j) {
        auto copy_grn = [&](const GrnParams& src, GrnParams& dst) {
            dst.W2.values_mut() = src.W2.array();
            dst.b2.values_mut() = src.b2.array();
            dst.W1.values_mut() = src.W1.array();
            dst.b1.values_mut() = src.b1.array();
            dst.glu.W4.values_mut() = src.glu.W4.array();
            dst.glu.b4.values_mut() = src.glu.b4.array();
            dst.glu.W5.values_mut() = src.glu.W5.array();
            dst.glu.b5.values_mut() = src.glu.b5.array();
            dst.ln_gain.values_mut() = src.ln_gain.array();
            dst.ln_bias.values_mut() = src.ln_bias.array();
        };
        copy_grn(a.past_vsn.per_var[perm[j]], b.past_vsn.per_var[j]);
    }
    {
        const GrnParams& src = a.past_vsn.weight_grn;
        GrnParams& dst = b.past_vsn.weight_grn;
        Mat w2 = src.W2.mat(), skip = src.skip_W.mat();
        Mat w2p = w2, skipp = skip;
        Mat w4 = src.glu.W4.mat(), w5 = src.glu.W5.mat();
        Mat w4p = w4, w5p = w5;
        for (int j = 0; j < m_vars; ++j) {
            w2p.middleCols(j * d, d) = w2.middleCols(perm[j] * d, d);
            w4p.row(j) = w4.row(perm[j]);
            w5p.row(j) = w5.row(perm[j]);
            for (int i = 0; i < m_vars; ++i) {
                skipp.block(j, i * d, 1, d) = skip.block(perm[j], perm[i] * d, 1, d);
            }
            dst.glu.b4.values_mut()[j] = src.glu.b4.value(perm[j]);
            dst.glu.b5.values_mut()[j] = src.glu.b5.value(perm[j]);
            dst.ln_gain.values_mut()[j] = src.ln_gain.value(perm[j]);
            dst.ln_bias.values_mut()[j] = src.ln_bias.value(perm[j]);
        }
        dst.W2.values_mut() = Eigen::Map<const Arr>(w2p.data(), w2p.size());
        dst.skip_W.values_mut() = Eigen::Map<const Arr>(skipp.data(), skipp.size());
        dst.glu.W4.values_mut() = Eigen::Map<const Arr>(w4p.data(), w4p.size());
        dst.glu.W5.values_mut() = Eigen::Map<const Arr>(w5p.data(), w5p.size());
    }

    RngState rng(32);
    WindowedSample s = random_sample(cfg, rng);
    WindowedSample sp = s;
    for (int j = 0; j < m_vars; ++j) sp.past.col(j) = s.past.col(perm[j]);

    ForwardTensors fa = tft_forward(a, s, eval_ctx());
    ForwardTensors fb = tft_forward(b, sp, eval_ctx());
    CHECK(testutil::max_abs_diff(fb.yhat, fa.yhat.mat()) < 1e-12);
    for (int j = 0; j < m_vars; ++j) {
        CHECK((fb.vsn_past.mat().col(j) - fa.vsn_past.mat().col(perm[j])).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("gradient check per ablation variant") {
    std::vector<AblationFlags> variants(6);
    variants[1].no_gating = true;
    variants[2].no_static_encoders = true;
    variants[3].fixed_variable_weights = true;
    variants[4].fixed_attention = true;
    variants[5].positional_encoding = true;
    RngState rng(51);
    for (const auto& flags : variants) {
        TFTConfig cfg = test_config(2, 1, 4, 2);
        cfg.ablation = flags;
        TFTModel m = build_model(cfg, 52);
        WindowedSample s = random_sample(cfg, rng);
        Tensor w = random_tensor({cfg.horizon, cfg.num_quantiles()}, rng);
        std::vector<Tensor> params;
        for (auto& [name, t] : m.parameters()) params.push_back(t);
        // Probe against the unperturbed forecasts so the finite differences
        // subtract near-zero values instead of two large sums.
        Tensor baseline = tft_forward(m, s, eval_ctx()).yhat.detach();
        auto loss = [&] {
            return sum(hadamard(sub(tft_forward(m, s, eval_ctx()).yhat, baseline), w));
        };
        auto res = testutil::finite_diff_check(params, loss, 1e-5, 1e-5);
        CAPTURE(flags.to_string());
        CHECK(res.checked > 100);
        CHECK(res.max_rel < 1e-4);
    }
}

TEST_CASE("training-mode forward is deterministic under a fixed stream") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    TFTModel m = build_model(cfg, 61);
    RngState rng(62);
    WindowedSample s = random_sample(cfg, rng);
    RngContext ctx{RngState(99).stream(4), 0.3, true};
    ForwardTensors f1 = tft_forward(m, s, ctx);
    ForwardTensors f2 = tft_forward(m, s, ctx);
    CHECK(std::memcmp(f1.yhat.array().data(), f2.yhat.array().data(),
                      sizeof(double) * f1.yhat.size()) == 0);
}

TEST_CASE("numeric failures name the pipeline stage") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    TFTModel m = build_model(cfg, 71);
    m.gate_final.b5.values_mut().setConstant(std::numeric_limits<double>::infinity());
    RngState rng(72);
    WindowedSample s = random_sample(cfg, rng);
    try {
        tft_forward(m, s, eval_ctx());
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("final_gate") != std::string::npos);
    }
}

TEST_CASE("sample shape mismatches are rejected") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    TFTModel m = build_model(cfg, 81);
    RngState rng(82);
    WindowedSample s = random_sample(cfg, rng);
    s.past = Mat::Zero(2, 4);
    CHECK_THROWS_AS(tft_forward(m, s, eval_ctx()), DimensionError);
}

TEST_CASE("checkpoint round trip is bit-exact") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    cfg.ablation.fixed_attention = true;  // exercise the extra tensor too
    TFTModel m = build_model(cfg, 91);

    DatasetSchema schema;
    schema.columns = {{"entity", ColumnRole::EntityId, ColumnKind::Real, 0},
                      {"t", ColumnRole::TimeIndex, ColumnKind::Real, 0},
                      {"amp", ColumnRole::Static, ColumnKind::Real, 0},
                      {"loc", ColumnRole::Static, ColumnKind::Categorical, 5},
                      {"y", ColumnRole::Target, ColumnKind::Real, 0},
                      {"z", ColumnRole::Observed, ColumnKind::Real, 0},
                      {"kc", ColumnRole::Known, ColumnKind::Categorical, 3},
                      {"xk", ColumnRole::Known, ColumnKind::Real, 0}};
    schema.lookback = 3;
    schema.horizon = 2;

    EntitySeries series;
    series.entity = "e0";
    series.values = Mat::Random(12, 8);
    for (int r = 0; r < 12; ++r) {
        series.times.push_back(r);
        series.values(r, 1) = r;
        series.values(r, 2) = 1.5;
        series.values(r, 3) = 2;
    }
    Normalizer norm = Normalizer::fit({series}, schema, 9.0);

    const std::string path = "/tmp/tft_test_checkpoint.bin";
    save_checkpoint(path, m, schema, norm);
    Checkpoint loaded = load_checkpoint(path);

    auto pa = m.parameters();
    auto pb = loaded.model.parameters();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].first == pb[i].first);
        CHECK(std::memcmp(pa[i].second.array().data(), pb[i].second.array().data(),
                          sizeof(double) * pa[i].second.size()) == 0);
    }
    CHECK(loaded.model.config.ablation.fixed_attention);
    CHECK(loaded.normalizer.denormalize_target("e0", 1.0) == norm.denormalize_target("e0", 1.0));

    RngState rng(92);
    WindowedSample s = random_sample(cfg, rng);
    ForwardTensors fa = tft_forward(m, s, eval_ctx());
    ForwardTensors fb = tft_forward(loaded.model, s, eval_ctx());
    CHECK(std::memcmp(fa.yhat.array().data(), fb.yhat.array().data(),
                      sizeof(double) * fa.yhat.size()) == 0);

    std::ofstream bad("/tmp/tft_bad_checkpoint.bin", std::ios::binary);
    bad << "NOPE";
    bad.close();
    CHECK_THROWS_AS(load_checkpoint("/tmp/tft_bad_checkpoint.bin"), DataError);
}

TEST_CASE("config text round trip") {
    TFTConfig cfg = test_config(3, 2, 8, 2);
    cfg.ablation.no_gating = true;
    cfg.ablation.positional_encoding = true;
    ConfigText text;
    config_to_text(cfg, text);
    TFTConfig back = config_from_text(ConfigText::parse(text.serialize()));
    CHECK(back.lookback == cfg.lookback);
    CHECK(back.horizon == cfg.horizon);
    CHECK(back.d_model == cfg.d_model);
    CHECK(back.quantiles == cfg.quantiles);
    CHECK(back.ablation.no_gating);
    CHECK(back.ablation.positional_encoding);
    CHECK_FALSE(back.ablation.fixed_attention);
    CHECK(back.static_ids == cfg.static_ids);
    CHECK(back.past_ids == cfg.past_ids);
    CHECK(back.future_ids == cfg.future_ids);
}
