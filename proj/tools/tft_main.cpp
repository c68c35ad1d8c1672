// Command-line front end: synthetic data generation, training, prediction,
// evaluation, ablation sweeps and interpretability reports.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include "tft/interpret.hpp"
#include "tft/model.hpp"
#include "tft/training.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace tft;

namespace {

constexpr const char* kToolVersion = "0.1.0";

std::uint64_t resolve_seed(const CLI::Option* seed_opt, std::uint64_t cli_seed,
                           std::uint64_t config_seed) {
    if (seed_opt->count() > 0) return cli_seed;
    if (const char* env = std::getenv("TFT_SEED")) {
        return static_cast<std::uint64_t>(parse_int(env, "TFT_SEED"));
    }
    return config_seed;
}

void require_file(const std::string& path, const char* what) {
    if (!fs::exists(path)) {
        throw ConfigError(std::string(what) + " file does not exist: " + path);
    }
}

struct NetworkSettings {
    int d_model = 16;
    int num_heads = 1;
    double dropout = 0.1;
    std::vector<double> quantiles{0.1, 0.5, 0.9};
    AblationFlags ablation;
};

NetworkSettings read_network(const ConfigText& cfg) {
    NetworkSettings n;
    if (const auto* s = cfg.find("network")) {
        n.d_model = static_cast<int>(s->get_int_or("d_model", n.d_model));
        n.num_heads = static_cast<int>(s->get_int_or("num_heads", n.num_heads));
        n.dropout = s->get_double_or("dropout", n.dropout);
        if (s->has("quantiles")) {
            n.quantiles.clear();
            for (const auto& q : split_list(s->get("quantiles"))) {
                n.quantiles.push_back(parse_double(q, "quantile"));
            }
        }
        n.ablation = AblationFlags::parse(s->get_or("ablation", "none"));
    }
    return n;
}

TrainConfig read_training(const ConfigText& cfg) {
    TrainConfig t;
    if (const auto* s = cfg.find("training")) {
        t.learning_rate = s->get_double_or("learning_rate", t.learning_rate);
        t.minibatch_size = static_cast<int>(s->get_int_or("minibatch_size", t.minibatch_size));
        t.max_grad_norm = s->get_double_or("max_grad_norm", t.max_grad_norm);
        t.max_epochs = static_cast<int>(s->get_int_or("max_epochs", t.max_epochs));
        t.patience = static_cast<int>(s->get_int_or("patience", t.patience));
        t.seed = static_cast<std::uint64_t>(s->get_int_or("seed", 42));
        t.samples_per_epoch =
            static_cast<int>(s->get_int_or("samples_per_epoch", t.samples_per_epoch));
        t.max_val_samples = static_cast<int>(s->get_int_or("max_val_samples", t.max_val_samples));
    }
    return t;
}

// Prepared training inputs: normalized windows plus the fitted normalizer.
struct Prepared {
    DatasetSchema schema;  // effective schema (with the presence column)
    Normalizer normalizer;
    DataSplit split;
    std::vector<EntitySeries> normalized;
};

Prepared prepare(const std::string& data_path, const DatasetSchema& schema) {
    Prepared p;
    LoadedData loaded = load_csv(data_path, schema);
    if (loaded.series.empty()) throw DataError("no rows in data file: " + data_path);
    p.schema = loaded.schema;
    const SplitBounds bounds = resolve_split(loaded.series, p.schema);
    p.normalizer = Normalizer::fit(loaded.series, p.schema, bounds.train_end);
    p.normalized = p.normalizer.apply(loaded.series);
    p.split = chrono_split(p.normalized, p.schema);
    return p;
}

void write_history(const std::string& path, const FitResult& result) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write history file: " + path);
    for (const auto& e : result.history) {
        out << "epoch=" << e.epoch << " train=" << format_double(e.train_loss)
            << " val=" << format_double(e.val_loss) << "\n";
    }
}

json manifest_base(const std::string& command, std::uint64_t seed) {
    json m;
    m["tool_version"] = kToolVersion;
    m["command"] = command;
    m["seed"] = seed;
    return m;
}

void write_manifest(const std::string& path, const json& m) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest: " + path);
    out << m.dump(2) << "\n";
}

// Forward passes over a window list in eval mode.
struct Predictions {
    std::vector<const WindowedSample*> samples;
    std::vector<ForecastOutput> outputs;
};

Predictions predict_windows(const TFTModel& model, const std::vector<WindowedSample>& windows) {
    Predictions p;
    RngContext eval_ctx{RngState(0), 0.0, false};
    for (const auto& w : windows) {
        p.samples.push_back(&w);
        p.outputs.push_back(detach_output(tft_forward(model, w, eval_ctx)));
    }
    return p;
}

const std::vector<WindowedSample>& pick_partition(const DataSplit& split,
                                                  const std::string& name) {
    if (name == "train") return split.train;
    if (name == "val") return split.val;
    if (name == "test") return split.test;
    throw ConfigError("unknown partition '" + name + "'");
}

struct RiskReport {
    std::map<double, double> normalized;  // quantile -> q-risk; absent when undefined
    std::map<double, double> original;
};

RiskReport compute_risk(const TFTModel& model, const Normalizer& normalizer,
                        const Predictions& preds) {
    if (preds.samples.empty()) throw DataError("no forecast windows in the selected partition");
    RiskReport report;
    const auto& quantiles = model.config.quantiles;
    for (std::size_t qi = 0; qi < quantiles.size(); ++qi) {
        std::vector<Eigen::VectorXd> actual_n, forecast_n, actual_o, forecast_o;
        for (std::size_t i = 0; i < preds.samples.size(); ++i) {
            const WindowedSample& w = *preds.samples[i];
            const Mat& yhat = preds.outputs[i].yhat;
            Eigen::VectorXd fn = yhat.col(qi);
            Eigen::VectorXd an = w.targets;
            actual_n.push_back(an);
            forecast_n.push_back(fn);
            Eigen::VectorXd fo(fn.size()), ao(an.size());
            for (int t = 0; t < fn.size(); ++t) {
                fo[t] = normalizer.denormalize_target(w.entity, fn[t]);
                ao[t] = normalizer.denormalize_target(w.entity, an[t]);
            }
            actual_o.push_back(ao);
            forecast_o.push_back(fo);
        }
        try {
            report.normalized[quantiles[qi]] = q_risk(actual_n, forecast_n, quantiles[qi]);
        } catch (const DataError&) {
        }
        try {
            report.original[quantiles[qi]] = q_risk(actual_o, forecast_o, quantiles[qi]);
        } catch (const DataError&) {
        }
    }
    if (report.normalized.empty() && report.original.empty()) {
        throw DataError("q-risk is undefined on both scales: the actuals sum to zero magnitude");
    }
    return report;
}

// ---- subcommands ------------------------------------------------------------------

int cmd_synth(const std::string& kind, const std::string& out_dir, const SynthParams& params,
              std::uint64_t seed) {
    SynthData d = synth_generate(parse_synth_kind(kind), params, seed);
    fs::create_directories(out_dir);
    write_csv(out_dir + "/data.csv", d.schema, d.series);
    schema_to_config(d.schema).save(out_dir + "/schema.ini");
    json m = manifest_base("synth", seed);
    m["kind"] = kind;
    m["entities"] = params.entities;
    m["steps"] = params.steps;
    m["period"] = params.period;
    if (d.switch_begin_row >= 0) {
        m["switch_begin_row"] = d.switch_begin_row;
        m["switch_end_row"] = d.switch_end_row;
    }
    write_manifest(out_dir + "/manifest.json", m);
    std::cout << "wrote " << out_dir << "/data.csv (" << params.entities << " entities x "
              << params.steps << " steps)\n";
    return 0;
}

int cmd_train(const std::string& data_path, const std::string& schema_path,
              const std::string& config_path, const std::string& out_dir,
              const CLI::Option* seed_opt, std::uint64_t cli_seed) {
    require_file(schema_path, "schema");
    require_file(config_path, "config");
    const ConfigText run_cfg = ConfigText::load(config_path);
    const DatasetSchema schema = parse_schema(ConfigText::load(schema_path));
    const NetworkSettings net = read_network(run_cfg);
    TrainConfig train_cfg = read_training(run_cfg);
    train_cfg.seed = resolve_seed(seed_opt, cli_seed, train_cfg.seed);

    Prepared p = prepare(data_path, schema);
    TFTConfig model_cfg =
        TFTConfig::from_schema(p.schema, net.d_model, net.num_heads, net.dropout);
    model_cfg.quantiles = net.quantiles;
    model_cfg.ablation = net.ablation;
    model_cfg.validate();
    TFTModel model = build_model(model_cfg, train_cfg.seed);

    fs::create_directories(out_dir);
    ConfigText resolved;
    config_to_text(model_cfg, resolved);
    json manifest = manifest_base("train", train_cfg.seed);
    manifest["data"] = data_path;
    manifest["schema"] = schema_path;
    manifest["config"] = config_path;
    manifest["resolved_model_config"] = resolved.serialize();
    manifest["train_windows"] = p.split.train.size();
    manifest["val_windows"] = p.split.val.size();
    manifest["test_windows"] = p.split.test.size();
    manifest["artifacts"] = {out_dir + "/model.tftc", out_dir + "/history.txt"};
    write_manifest(out_dir + "/manifest.json", manifest);

    const auto t0 = std::chrono::steady_clock::now();
    FitResult result = fit(model, p.split.train, p.split.val, train_cfg);
    const double total_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string ckpt_path = out_dir + "/model.tftc";
    save_checkpoint(ckpt_path + ".tmp", model, p.schema, p.normalizer);
    fs::rename(ckpt_path + ".tmp", ckpt_path);
    write_history(out_dir + "/history.txt", result);

    json timings;
    timings["total_seconds"] = total_s;
    for (const auto& e : result.history) timings["epoch_seconds"].push_back(e.seconds);
    manifest["timings"] = timings;
    manifest["best_epoch"] = result.best_epoch;
    manifest["best_val_loss"] = result.best_val_loss;
    write_manifest(out_dir + "/manifest.json", manifest);

    std::cout << "trained " << result.history.size() << " epochs, best epoch "
              << result.best_epoch << " val loss " << format_double(result.best_val_loss) << "\n"
              << "checkpoint: " << ckpt_path << "\n";
    return 0;
}

int cmd_predict(const std::string& ckpt_path, const std::string& data_path,
                const std::string& out_path, const std::vector<double>& quantiles,
                bool normalized, const std::string& partition) {
    Checkpoint ckpt = load_checkpoint(ckpt_path);

    LoadedData loaded = load_csv(data_path, ckpt.schema);
    std::vector<EntitySeries> series = ckpt.normalizer.apply(loaded.series);

    std::vector<WindowedSample> windows;
    if (partition == "all") {
        for (const auto& s : series) {
            for (auto& w : make_windows(s, ckpt.schema, ckpt.schema.lookback, ckpt.schema.horizon,
                                        ckpt.schema.stride)) {
                windows.push_back(std::move(w));
            }
        }
    } else {
        windows = pick_partition(chrono_split(series, ckpt.schema), partition);
    }
    if (windows.empty()) throw DataError("no prediction windows in partition '" + partition + "'");

    std::vector<int> q_idx;
    if (quantiles.empty()) {
        for (int i = 0; i < ckpt.model.config.num_quantiles(); ++i) q_idx.push_back(i);
    } else {
        for (double q : quantiles) {
            const int idx = ckpt.model.config.quantile_index(q);
            if (idx < 0) {
                throw ConfigError("quantile " + format_double(q) +
                                  " is not part of the trained model");
            }
            q_idx.push_back(idx);
        }
    }

    Predictions preds = predict_windows(ckpt.model, windows);
    std::ofstream out(out_path + ".tmp");
    if (!out) throw DataError("cannot write forecasts: " + out_path);
    out << "entity,forecast_start,horizon";
    for (int idx : q_idx) {
        char label[32];
        std::snprintf(label, sizeof(label), ",q%g", ckpt.model.config.quantiles[idx]);
        out << label;
    }
    out << "\n";
    for (std::size_t i = 0; i < preds.samples.size(); ++i) {
        const WindowedSample& w = *preds.samples[i];
        for (int tau = 1; tau <= ckpt.schema.horizon; ++tau) {
            out << w.entity << "," << format_double(w.forecast_time) << "," << tau;
            for (int idx : q_idx) {
                double v = preds.outputs[i].yhat(tau - 1, idx);
                if (!normalized) v = ckpt.normalizer.denormalize_target(w.entity, v);
                out << "," << format_double(v);
            }
            out << "\n";
        }
    }
    out.close();
    fs::rename(out_path + ".tmp", out_path);
    std::cout << "wrote " << preds.samples.size() * ckpt.schema.horizon << " forecast rows to "
              << out_path << "\n";
    return 0;
}

int cmd_evaluate(const std::string& ckpt_path, const std::string& data_path,
                 const std::string& partition) {
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    LoadedData loaded = load_csv(data_path, ckpt.schema);
    std::vector<EntitySeries> series = ckpt.normalizer.apply(loaded.series);
    DataSplit split = chrono_split(series, ckpt.schema);
    Predictions preds = predict_windows(ckpt.model, pick_partition(split, partition));
    RiskReport report = compute_risk(ckpt.model, ckpt.normalizer, preds);
    std::printf("windows evaluated: %zu (%s partition)\n", preds.samples.size(),
                partition.c_str());
    for (double q : ckpt.model.config.quantiles) {
        if (report.normalized.count(q)) {
            std::printf("P%02.0f q-Risk (normalized): %.4f\n", q * 100.0, report.normalized.at(q));
        } else {
            std::printf("P%02.0f q-Risk (normalized): undefined (no target mass)\n", q * 100.0);
        }
    }
    for (double q : ckpt.model.config.quantiles) {
        if (report.original.count(q)) {
            std::printf("P%02.0f q-Risk (original units): %.4f\n", q * 100.0,
                        report.original.at(q));
        } else {
            std::printf("P%02.0f q-Risk (original units): undefined (no target mass)\n",
                        q * 100.0);
        }
    }
    return 0;
}

int cmd_ablate(const std::string& data_path, const std::string& schema_path,
               const std::string& config_path, const std::string& out_dir,
               const std::string& flags_spec, const CLI::Option* seed_opt,
               std::uint64_t cli_seed) {
    require_file(schema_path, "schema");
    require_file(config_path, "config");
    const ConfigText run_cfg = ConfigText::load(config_path);
    const DatasetSchema schema = parse_schema(ConfigText::load(schema_path));
    const NetworkSettings net = read_network(run_cfg);
    TrainConfig train_cfg = read_training(run_cfg);
    train_cfg.seed = resolve_seed(seed_opt, cli_seed, train_cfg.seed);

    std::vector<std::string> variants;
    if (flags_spec == "all") {
        variants = AblationFlags::names();
    } else if (!trim(flags_spec).empty() && flags_spec != "none") {
        for (const auto& f : split_list(flags_spec)) {
            AblationFlags probe;
            probe.by_name(f);  // validates the name
            variants.push_back(f);
        }
    }

    Prepared p = prepare(data_path, schema);
    const auto& eval_windows = p.split.test.empty() ? p.split.val : p.split.test;

    struct Row {
        std::string name;
        double p50 = 0.0, p90 = 0.0;
    };
    std::vector<Row> rows;
    auto run_variant = [&](const std::string& name, const AblationFlags& flags) {
        TFTConfig cfg = TFTConfig::from_schema(p.schema, net.d_model, net.num_heads, net.dropout);
        cfg.quantiles = net.quantiles;
        cfg.ablation = flags;
        TFTModel model = build_model(cfg, train_cfg.seed);
        fit(model, p.split.train, p.split.val, train_cfg);
        Predictions preds = predict_windows(model, eval_windows);
        RiskReport report = compute_risk(model, p.normalizer, preds);
        Row row;
        row.name = name;
        row.p50 = report.normalized.count(0.5) ? report.normalized.at(0.5)
                                               : report.normalized.begin()->second;
        row.p90 = report.normalized.count(0.9) ? report.normalized.at(0.9)
                                               : report.normalized.rbegin()->second;
        rows.push_back(row);
    };

    run_variant("base", AblationFlags{});
    for (const auto& name : variants) {
        AblationFlags flags;
        flags.by_name(name) = true;
        run_variant(name, flags);
    }

    fs::create_directories(out_dir);
    std::ofstream table(out_dir + "/ablation.txt");
    if (!table) throw DataError("cannot write ablation table");
    auto emit = [&](std::ostream& os) {
        os << "variant p50_risk p90_risk d_p50_pct d_p90_pct\n";
        for (const auto& r : rows) {
            const double d50 = 100.0 * (r.p50 - rows[0].p50) / rows[0].p50;
            const double d90 = 100.0 * (r.p90 - rows[0].p90) / rows[0].p90;
            char line[256];
            std::snprintf(line, sizeof(line), "%s %.6f %.6f %+.2f %+.2f\n", r.name.c_str(), r.p50,
                          r.p90, d50, d90);
            os << line;
        }
    };
    emit(table);
    emit(std::cout);

    json manifest = manifest_base("ablate", train_cfg.seed);
    manifest["variants"] = variants;
    write_manifest(out_dir + "/manifest.json", manifest);
    return 0;
}

int cmd_interpret(const std::string& ckpt_path, const std::string& data_path,
                  const std::string& report, const std::string& out_dir,
                  const std::string& partition, double threshold) {
    if (report != "importance" && report != "patterns" && report != "regimes") {
        throw ConfigError("unknown report kind '" + report + "'");
    }
    Checkpoint ckpt = load_checkpoint(ckpt_path);
    LoadedData loaded = load_csv(data_path, ckpt.schema);
    std::vector<EntitySeries> series = ckpt.normalizer.apply(loaded.series);
    DataSplit split = chrono_split(series, ckpt.schema);
    const auto& windows = pick_partition(split, partition);
    if (windows.empty()) throw DataError("no windows in partition '" + partition + "'");
    Predictions preds = predict_windows(ckpt.model, windows);
    fs::create_directories(out_dir);

    if (report == "importance") {
        ImportanceReport imp = aggregate_importance(preds.outputs, ckpt.model.config);
        auto dump = [&](const std::string& path, const std::vector<ImportanceRow>& rows) {
            std::ofstream out(path);
            out << "variable p10 p50 p90\n";
            for (const auto& r : rows) {
                char line[256];
                std::snprintf(line, sizeof(line), "%s %.6f %.6f %.6f\n", r.variable.c_str(),
                              r.p10, r.p50, r.p90);
                out << line;
            }
        };
        dump(out_dir + "/importance_static.txt", imp.statics);
        dump(out_dir + "/importance_past.txt", imp.past);
        dump(out_dir + "/importance_future.txt", imp.future);
        std::cout << "wrote importance tables to " << out_dir << "\n";
    } else if (report == "patterns") {
        TemporalPattern pat = temporal_patterns(preds.outputs, ckpt.model.config);
        {
            std::ofstream out(out_dir + "/patterns_onestep.txt");
            out << "lag mean p10 p50 p90\n";
            for (std::size_t i = 0; i < pat.lags.size(); ++i) {
                char line[256];
                std::snprintf(line, sizeof(line), "%d %.6f %.6f %.6f %.6f\n", pat.lags[i],
                              pat.mean[i], pat.p10[i], pat.p50[i], pat.p90[i]);
                out << line;
            }
        }
        {
            std::ofstream out(out_dir + "/patterns_horizons.txt");
            out << "position";
            for (int tau : pat.horizons) out << " tau" << tau;
            out << "\n";
            for (int col = 0; col < pat.horizon_curves.cols(); ++col) {
                out << (col - ckpt.schema.lookback);
                for (int row = 0; row < pat.horizon_curves.rows(); ++row) {
                    char cell[64];
                    std::snprintf(cell, sizeof(cell), " %.6f", pat.horizon_curves(row, col));
                    out << cell;
                }
                out << "\n";
            }
        }
        std::cout << "wrote pattern series to " << out_dir << "\n";
    } else {
        // Group outputs per entity, ordered by forecast time.
        std::vector<std::string> entity_order;
        std::map<std::string, std::vector<ForecastOutput>> by_entity;
        std::map<std::string, std::vector<double>> times;
        for (std::size_t i = 0; i < preds.samples.size(); ++i) {
            const std::string& e = preds.samples[i]->entity;
            if (by_entity.find(e) == by_entity.end()) entity_order.push_back(e);
            by_entity[e].push_back(preds.outputs[i]);
            times[e].push_back(preds.samples[i]->forecast_time);
        }
        std::ofstream series_out(out_dir + "/regimes.txt");
        series_out << "entity time dist flagged\n";
        std::ofstream intervals_out(out_dir + "/regime_intervals.txt");
        intervals_out << "entity begin end\n";
        for (const auto& e : entity_order) {
            RegimeSeries r = regime_distance(by_entity[e], times[e], ckpt.model.config, threshold);
            for (std::size_t i = 0; i < r.dist.size(); ++i) {
                char line[256];
                std::snprintf(line, sizeof(line), "%s %.17g %.6f %d\n", e.c_str(), r.times[i],
                              r.dist[i], r.dist[i] > threshold ? 1 : 0);
                series_out << line;
            }
            for (const auto& [b, en] : r.intervals) {
                char line[256];
                std::snprintf(line, sizeof(line), "%s %.17g %.17g\n", e.c_str(), b, en);
                intervals_out << line;
            }
        }
        std::cout << "wrote regime series to " << out_dir << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Temporal Fusion Transformer: training, forecasting and interpretability"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset (CSV + schema)");
    std::string synth_kind = "seasonal", synth_out = "synth_out";
    SynthParams sp;
    std::uint64_t synth_seed = 42;
    synth->add_option("--kind", synth_kind, "seasonal | regime_switch | noise_features");
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--entities", sp.entities);
    synth->add_option("--steps", sp.steps);
    synth->add_option("--period", sp.period);
    synth->add_option("--noise-std", sp.noise_std);
    synth->add_option("--noise-features", sp.noise_features);
    synth->add_option("--k", sp.lookback);
    synth->add_option("--tau", sp.horizon);
    synth->add_option("--train-frac", sp.train_frac);
    synth->add_option("--val-frac", sp.val_frac);
    synth->add_option("--switch-begin", sp.switch_begin_frac);
    synth->add_option("--switch-end", sp.switch_end_frac);
    synth->add_option("--switch-noise", sp.switch_noise_std);
    synth->add_option("--seed", synth_seed);

    // train
    auto* train = app.add_subcommand("train", "train a model and write a checkpoint");
    std::string train_data, train_schema, train_config, train_out = "run";
    std::uint64_t train_seed = 42;
    train->add_option("--data", train_data)->required();
    train->add_option("--schema", train_schema)->required();
    train->add_option("--config", train_config)->required();
    train->add_option("--out", train_out);
    auto* train_seed_opt = train->add_option("--seed", train_seed);

    // predict
    auto* predict = app.add_subcommand("predict", "write quantile forecasts as CSV");
    std::string pr_ckpt, pr_data, pr_out = "forecasts.csv", pr_partition = "all";
    std::vector<double> pr_quantiles;
    bool pr_normalized = false;
    predict->add_option("--checkpoint", pr_ckpt)->required();
    predict->add_option("--data", pr_data)->required();
    predict->add_option("--out", pr_out);
    predict->add_option("--quantiles", pr_quantiles)->delimiter(',');
    predict->add_option("--partition", pr_partition, "train | val | test | all");
    predict->add_flag("--normalized", pr_normalized, "emit normalized-scale forecasts");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "print q-Risk for a trained checkpoint");
    std::string ev_ckpt, ev_data, ev_partition = "test";
    evaluate->add_option("--checkpoint", ev_ckpt)->required();
    evaluate->add_option("--data", ev_data)->required();
    evaluate->add_option("--partition", ev_partition);

    // ablate
    auto* ablate = app.add_subcommand("ablate", "train base and ablated variants, report deltas");
    std::string ab_data, ab_schema, ab_config, ab_out = "ablation", ab_flags = "all";
    std::uint64_t ab_seed = 42;
    ablate->add_option("--data", ab_data)->required();
    ablate->add_option("--schema", ab_schema)->required();
    ablate->add_option("--config", ab_config)->required();
    ablate->add_option("--out", ab_out);
    ablate->add_option("--flags", ab_flags, "'all', 'none' or a comma list");
    auto* ab_seed_opt = ablate->add_option("--seed", ab_seed);

    // interpret
    auto* interpret = app.add_subcommand("interpret", "emit interpretability reports");
    std::string in_ckpt, in_data, in_report, in_out = "interpret", in_partition = "test";
    double in_threshold = 0.3;
    interpret->add_option("--checkpoint", in_ckpt)->required();
    interpret->add_option("--data", in_data)->required();
    interpret->add_option("--report", in_report, "importance | patterns | regimes")->required();
    interpret->add_option("--out", in_out);
    interpret->add_option("--partition", in_partition);
    interpret->add_option("--threshold", in_threshold, "regime flagging threshold");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_kind, synth_out, sp, synth_seed);
        if (train->parsed()) {
            return cmd_train(train_data, train_schema, train_config, train_out, train_seed_opt,
                             train_seed);
        }
        if (predict->parsed()) {
            return cmd_predict(pr_ckpt, pr_data, pr_out, pr_quantiles, pr_normalized,
                               pr_partition);
        }
        if (evaluate->parsed()) return cmd_evaluate(ev_ckpt, ev_data, ev_partition);
        if (ablate->parsed()) {
            return cmd_ablate(ab_data, ab_schema, ab_config, ab_out, ab_flags, ab_seed_opt,
                              ab_seed);
        }
        if (interpret->parsed()) {
            return cmd_interpret(in_ckpt, in_data, in_report, in_out, in_partition, in_threshold);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ContractError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
