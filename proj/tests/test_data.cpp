#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "tft/data.hpp"

using namespace tft;

namespace {

DatasetSchema tiny_schema() {
    ConfigText cfg = ConfigText::parse(R"(
[columns]
entity = entity_id
t = time_index
loc = static, categorical, 4
y = target, real
z = observed, real
x = known, real
[window]
k = 2
tau_max = 1
stride = 1
[split]
train_frac = 0.8
val_frac = 0.2
)");
    return parse_schema(cfg);
}

std::string write_temp(const std::string& body) {
    static int counter = 0;
    std::string path = "/tmp/tft_data_test_" + std::to_string(counter++) + ".csv";
    std::ofstream out(path);
    out << body;
    return path;
}

}  // namespace

TEST_CASE("schema parsing and validation") {
    DatasetSchema s = tiny_schema();
    CHECK(s.columns.size() == 6);
    CHECK(s.lookback == 2);
    CHECK(s.horizon == 1);
    CHECK(s.columns[2].kind == ColumnKind::Categorical);
    CHECK(s.columns[2].cardinality == 4);

    // round trip through text
    DatasetSchema again = parse_schema(schema_to_config(s));
    CHECK(again.columns.size() == s.columns.size());
    CHECK(again.train_frac == s.train_frac);

    DatasetSchema bad = s;
    bad.columns[3].role = ColumnRole::Observed;  // no target left
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("load_csv on an empty file with a valid header") {
    std::string path = write_temp("entity,t,loc,y,z,x\n");
    LoadedData d = load_csv(path, tiny_schema());
    CHECK(d.series.empty());
    CHECK(d.schema.has_column("present"));
}

TEST_CASE("load_csv groups interleaved entities and sorts by time") {
    std::string path = write_temp(
        "entity,t,loc,y,z,x\n"
        "a,2,1,0.2,1,0\n"
        "b,1,2,1.1,2,0\n"
        "a,1,1,0.1,1,0\n"
        "b,2,2,1.2,2,0\n");
    LoadedData d = load_csv(path, tiny_schema());
    REQUIRE(d.series.size() == 2);
    CHECK(d.series[0].entity == "a");
    CHECK(d.series[1].entity == "b");
    CHECK(d.series[0].times == std::vector<double>{1, 2});
    CHECK(d.series[0].values(0, 3) == 0.1);
    CHECK(d.series[0].values(1, 3) == 0.2);
}

TEST_CASE("load_csv imputes gaps with last value and presence flag zero") {
    std::string path = write_temp(
        "entity,t,loc,y,z,x\n"
        "a,1,1,0.5,7,1\n"
        "a,5,1,0.9,8,2\n");
    LoadedData d = load_csv(path, tiny_schema());
    REQUIRE(d.series.size() == 1);
    const EntitySeries& s = d.series[0];
    REQUIRE(s.length() == 5);
    const int present = d.schema.col_index("present");
    const int y = d.schema.col_index("y");
    CHECK(s.times == std::vector<double>{1, 2, 3, 4, 5});
    for (int r = 1; r <= 3; ++r) {
        CHECK(s.values(r, y) == 0.5);  // carried forward
        CHECK(s.values(r, present) == 0.0);
    }
    CHECK(s.values(0, present) == 1.0);
    CHECK(s.values(4, present) == 1.0);
    CHECK(s.values(4, y) == 0.9);
}

TEST_CASE("load_csv error paths") {
    DatasetSchema schema = tiny_schema();
    CHECK_THROWS_AS(load_csv("/nonexistent/file.csv", schema), DataError);

    std::string bad_header = write_temp("entity,t,loc,y,z\n");
    CHECK_THROWS_AS(load_csv(bad_header, schema), DataError);

    std::string bad_cell = write_temp("entity,t,loc,y,z,x\na,1,1,hello,1,0\n");
    try {
        load_csv(bad_cell, schema);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    std::string unknown_cat = write_temp("entity,t,loc,y,z,x\na,1,9,0.5,1,0\n");
    LoadedData d = load_csv(unknown_cat, schema);
    CHECK(d.series[0].values(0, 2) == 0.0);  // reserved index
}

TEST_CASE("normalizer round trip and per-entity statistics") {
    std::string path = write_temp(
        "entity,t,loc,y,z,x\n"
        "a,0,1,10,1,0\na,1,1,12,2,1\na,2,1,14,3,2\na,3,1,16,4,3\n"
        "b,0,2,-5,1,0\nb,1,2,-7,2,1\nb,2,2,-9,3,2\nb,3,2,-11,4,3\n");
    LoadedData d = load_csv(path, tiny_schema());
    Normalizer norm = Normalizer::fit(d.series, d.schema, 4.0);
    auto normalized = norm.apply(d.series);

    const int y = d.schema.col_index("y");
    for (const auto& s : normalized) {
        double mean = s.values.col(y).mean();
        CHECK(std::abs(mean) < 1e-9);
    }

    auto restored = norm.invert(normalized);
    for (std::size_t i = 0; i < restored.size(); ++i) {
        CHECK((restored[i].values - d.series[i].values).cwiseAbs().maxCoeff() < 1e-10);
    }

    // constant column (x=5 everywhere) normalizes to zero under the std guard
    std::string cpath = write_temp(
        "entity,t,loc,y,z,x\n"
        "a,0,1,1,1,5\na,1,1,2,1,5\na,2,1,3,1,5\n");
    LoadedData cd = load_csv(cpath, tiny_schema());
    Normalizer cnorm = Normalizer::fit(cd.series, cd.schema, 3.0);
    auto cn = cnorm.apply(cd.series);
    const int x = cd.schema.col_index("x");
    for (int r = 0; r < 3; ++r) CHECK(cn[0].values(r, x) == 0.0);
}

TEST_CASE("normalizer text serialization round trips") {
    std::string path = write_temp(
        "entity,t,loc,y,z,x\n"
        "a,0,1,10,1,0\na,1,1,12,2,1\na,2,1,14,3,2\n");
    LoadedData d = load_csv(path, tiny_schema());
    Normalizer norm = Normalizer::fit(d.series, d.schema, 3.0);
    ConfigText cfg;
    cfg.sections.push_back(norm.serialize());
    Normalizer back = Normalizer::deserialize(ConfigText::parse(cfg.serialize()).require("normalizer"),
                                              d.schema);
    CHECK(back.denormalize_target("a", 0.5) == norm.denormalize_target("a", 0.5));
    CHECK(back.normalize_target("a", 11.0) == norm.normalize_target("a", 11.0));
}

TEST_CASE("window counts follow the closed form") {
    SynthParams p;
    p.entities = 1;
    p.period = 8;
    const int k = 4, tau = 2;
    for (int len : {k + 1 + tau, k + 1 + tau + 5, k + tau}) {
        p.steps = len;
        p.lookback = k;
        p.horizon = tau;
        SynthData d = synth_generate(SynthKind::Seasonal, p, 5);
        for (int stride : {1, 2, 3}) {
            auto windows = make_windows(d.series[0], d.schema, k, tau, stride);
            const int expected = len < k + 1 + tau ? 0 : (len - (k + 1 + tau)) / stride + 1;
            CHECK(static_cast<int>(windows.size()) == expected);
        }
    }
}

TEST_CASE("windows never leak future values into the past") {
    SynthParams p;
    p.entities = 3;
    p.steps = 60;
    p.period = 8;
    p.lookback = 6;
    p.horizon = 3;
    SynthData d = synth_generate(SynthKind::Seasonal, p, 6);
    DataSplit split = chrono_split(d.series, d.schema);
    SplitBounds bounds = resolve_split(d.series, d.schema);
    CHECK(count_leakage_violations(d.series, split, d.schema, bounds) == 0);
    CHECK(!split.train.empty());
    CHECK(!split.val.empty());

    for (const auto& w : split.train) {
        CHECK(w.past_start_time <= w.forecast_time);
        CHECK(w.forecast_time < w.target_end_time);
    }
}

TEST_CASE("chronological split fractions and failure modes") {
    SynthParams p;
    p.entities = 1;
    p.steps = 100;
    p.period = 10;
    p.lookback = 4;
    p.horizon = 2;
    p.train_frac = 0.9;
    p.val_frac = 0.1;
    SynthData d = synth_generate(SynthKind::Seasonal, p, 7);

    SplitBounds bounds = resolve_split(d.series, d.schema);
    CHECK(bounds.train_end.at("e0") == 90.0);  // first 90 steps are training rows

    DataSplit split = chrono_split(d.series, d.schema);
    for (const auto& w : split.train) CHECK(w.target_end_time < 90.0);
    for (const auto& w : split.val) CHECK(w.target_end_time >= 90.0);
    CHECK(split.test.empty());

    DatasetSchema no_val = d.schema;
    no_val.train_frac = 1.0;
    no_val.val_frac = 0.0;
    CHECK_THROWS_AS(chrono_split(d.series, no_val), ConfigError);
}

TEST_CASE("seasonal generator is exactly periodic without noise") {
    SynthParams p;
    p.entities = 2;
    p.steps = 96;
    p.period = 24;
    p.noise_std = 0.0;
    SynthData d = synth_generate(SynthKind::Seasonal, p, 11);
    const int y = d.schema.col_index("y");
    for (const auto& s : d.series) {
        for (int t = 0; t + p.period < p.steps; ++t) {
            CHECK(s.values(t, y) == s.values(t + p.period, y));
        }
    }
}

TEST_CASE("same seed reproduces bit-identical synthetic series") {
    SynthParams p;
    p.entities = 3;
    p.steps = 50;
    SynthData a = synth_generate(SynthKind::RegimeSwitch, p, 1234);
    SynthData b = synth_generate(SynthKind::RegimeSwitch, p, 1234);
    REQUIRE(a.series.size() == b.series.size());
    for (std::size_t i = 0; i < a.series.size(); ++i) {
        CHECK((a.series[i].values - b.series[i].values).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK(a.switch_begin_row == b.switch_begin_row);
}

TEST_CASE("seasonal autocorrelation at the period lag") {
    SynthParams p;
    p.entities = 5;
    p.steps = 400;
    p.period = 24;
    p.noise_std = 0.1;
    p.amp_min = 1.0;
    p.amp_max = 1.0;
    SynthData d = synth_generate(SynthKind::Seasonal, p, 21);
    const int y = d.schema.col_index("y");
    for (const auto& s : d.series) {
        Eigen::VectorXd series = s.values.col(y);
        const int n = static_cast<int>(series.size()) - p.period;
        const double mean = series.mean();
        double num = 0.0, den = 0.0;
        for (int t = 0; t < n; ++t) {
            num += (series[t] - mean) * (series[t + p.period] - mean);
        }
        for (int t = 0; t < series.size(); ++t) den += (series[t] - mean) * (series[t] - mean);
        CHECK(num / den > 0.9);
    }
}

TEST_CASE("csv round trip through write and load") {
    SynthParams p;
    p.entities = 2;
    p.steps = 30;
    p.period = 6;
    p.lookback = 4;
    p.horizon = 2;
    SynthData d = synth_generate(SynthKind::Seasonal, p, 31);
    std::string path = "/tmp/tft_data_roundtrip.csv";
    write_csv(path, d.schema, d.series);
    LoadedData back = load_csv(path, d.schema);
    REQUIRE(back.series.size() == d.series.size());
    for (std::size_t i = 0; i < d.series.size(); ++i) {
        const int cols = static_cast<int>(d.schema.columns.size());
        CHECK((back.series[i].values.leftCols(cols) - d.series[i].values).cwiseAbs().maxCoeff() ==
              0.0);
    }
}
