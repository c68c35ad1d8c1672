#include "tft/interpret.hpp"

#include <algorithm>
#include <cmath>

namespace tft {

double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw ContractError("percentile of an empty sample");
    if (q < 0.0 || q > 1.0) throw ContractError("percentile fraction must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const double h = q * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

namespace {

std::vector<ImportanceRow> pool_columns(const std::vector<const Mat*>& weight_blocks,
                                         const std::vector<std::string>& names) {
    std::vector<ImportanceRow> rows;
    for (std::size_t j = 0; j < names.size(); ++j) {
        std::vector<double> pooled;
        for (const Mat* block : weight_blocks) {
            for (int r = 0; r < block->rows(); ++r) pooled.push_back((*block)(r, j));
        }
        ImportanceRow row;
        row.variable = names[j];
        row.p10 = percentile(pooled, 0.10);
        row.p50 = percentile(pooled, 0.50);
        row.p90 = percentile(pooled, 0.90);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

ImportanceReport aggregate_importance(const std::vector<ForecastOutput>& outputs,
                                      const TFTConfig& config) {
    if (outputs.empty()) throw ContractError("aggregate_importance needs a non-empty stream");
    ImportanceReport report;
    std::vector<const Mat*> statics, past, future;
    for (const auto& o : outputs) {
        if (o.vsn_static.size() > 0) statics.push_back(&o.vsn_static);
        past.push_back(&o.vsn_past);
        future.push_back(&o.vsn_future);
    }
    if (!statics.empty()) {
        report.statics = pool_columns(statics, config.group_names(config.static_ids));
    }
    report.past = pool_columns(past, config.past_weight_names());
    report.future = pool_columns(future, config.future_weight_names());
    return report;
}

double attention_decomposition_check(const TFTModel& model, const WindowedSample& sample) {
    ForwardTrace trace;
    RngContext eval_ctx{RngState(0), 0.0, false};
    ForwardTensors f = tft_forward(model, sample, eval_ctx, &trace);
    const Mat value_features = trace.theta * model.attention.Wv.mat();
    const Mat recomputed = f.attention.mat() * value_features;
    return (recomputed - trace.pre_output).cwiseAbs().maxCoeff();
}

Mat mean_patterns(const std::vector<ForecastOutput>& outputs, const TFTConfig& config) {
    if (outputs.empty()) throw ContractError("mean_patterns needs at least one output");
    const int n = config.positions();
    Mat mean = Mat::Zero(config.horizon, n);
    for (const auto& o : outputs) {
        for (int tau = 1; tau <= config.horizon; ++tau) {
            mean.row(tau - 1) += o.attention.row(config.lookback + tau);
        }
    }
    return mean / static_cast<double>(outputs.size());
}

double bhattacharyya_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    if (p.size() != q.size()) {
        throw ContractError("bhattacharyya_distance: length mismatch " +
                            std::to_string(p.size()) + " vs " + std::to_string(q.size()));
    }
    double sp = 0.0, sq = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0 || q[i] < 0.0) {
            throw ContractError("bhattacharyya_distance: negative probability entry");
        }
        sp += p[i];
        sq += q[i];
    }
    if (sp <= 0.0 || sq <= 0.0) {
        throw ContractError("bhattacharyya_distance: zero-mass distribution");
    }
    // 1 - rho written as the Hellinger sum: exact zero for identical inputs.
    double radicand = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        const double d = std::sqrt(p[i] / sp) - std::sqrt(q[i] / sq);
        radicand += 0.5 * d * d;
    }
    return std::sqrt(std::min(1.0, radicand));
}

RegimeSeries regime_distance(const std::vector<ForecastOutput>& outputs,
                             const std::vector<double>& forecast_times, const TFTConfig& config,
                             double threshold) {
    if (outputs.size() != forecast_times.size()) {
        throw ContractError("regime_distance: " + std::to_string(outputs.size()) +
                            " outputs vs " + std::to_string(forecast_times.size()) + " times");
    }
    RegimeSeries series;
    series.mean_pattern = mean_patterns(outputs, config);
    series.times = forecast_times;
    for (const auto& o : outputs) {
        double total = 0.0;
        for (int tau = 1; tau <= config.horizon; ++tau) {
            const int row = config.lookback + tau;
            const int support = row + 1;  // causal prefix
            const Eigen::VectorXd avg = series.mean_pattern.row(tau - 1).head(support);
            const Eigen::VectorXd cur = o.attention.row(row).head(support);
            total += bhattacharyya_distance(avg, cur);
        }
        series.dist.push_back(total / config.horizon);
    }
    // Merge consecutive above-threshold points into closed intervals.
    int begin = -1;
    for (std::size_t i = 0; i <= series.dist.size(); ++i) {
        const bool above = i < series.dist.size() && series.dist[i] > threshold;
        if (above && begin < 0) begin = static_cast<int>(i);
        if (!above && begin >= 0) {
            series.intervals.emplace_back(series.times[begin], series.times[i - 1]);
            begin = -1;
        }
    }
    return series;
}

TemporalPattern temporal_patterns(const std::vector<ForecastOutput>& outputs,
                                  const TFTConfig& config) {
    if (outputs.empty()) throw ContractError("temporal_patterns needs a non-empty stream");
    TemporalPattern pattern;
    const int one_step_row = config.lookback + 1;
    for (int n = -config.lookback; n <= 0; ++n) {
        std::vector<double> pooled;
        for (const auto& o : outputs) pooled.push_back(o.attention(one_step_row, n + config.lookback));
        pattern.lags.push_back(n);
        double mean = 0.0;
        for (double v : pooled) mean += v;
        pattern.mean.push_back(mean / pooled.size());
        pattern.p10.push_back(percentile(pooled, 0.10));
        pattern.p50.push_back(percentile(pooled, 0.50));
        pattern.p90.push_back(percentile(pooled, 0.90));
    }
    if (config.horizon <= 4) {
        for (int tau = 1; tau <= config.horizon; ++tau) pattern.horizons.push_back(tau);
    } else {
        for (int quarter = 1; quarter <= 4; ++quarter) {
            const int tau = std::max(1, config.horizon * quarter / 4);
            if (pattern.horizons.empty() || pattern.horizons.back() != tau) {
                pattern.horizons.push_back(tau);
            }
        }
    }
    const Mat means = mean_patterns(outputs, config);
    pattern.horizon_curves = Mat(pattern.horizons.size(), config.positions());
    for (std::size_t i = 0; i < pattern.horizons.size(); ++i) {
        pattern.horizon_curves.row(i) = means.row(pattern.horizons[i] - 1);
    }
    return pattern;
}

}  // namespace tft
