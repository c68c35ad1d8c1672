#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tft/model.hpp"

namespace tft {

// Percentile with linear interpolation between order statistics; q in [0, 1].
double percentile(std::vector<double> values, double q);

struct ImportanceRow {
    std::string variable;
    double p10 = 0.0, p50 = 0.0, p90 = 0.0;
};

struct ImportanceReport {
    std::vector<ImportanceRow> statics, past, future;
};

// Pools selection weights over every sample and time step of the stream and
// records the 10th/50th/90th percentiles per variable.
ImportanceReport aggregate_importance(const std::vector<ForecastOutput>& outputs,
                                      const TFTConfig& config);

// Max deviation of the attention output from the attention-weighted sum of
// value-projected features; the identity holds by construction and this
// recomputes it independently.
double attention_decomposition_check(const TFTModel& model, const WindowedSample& sample);

// Mean attention row per forecast horizon: row tau-1 holds the average of
// attention row (k + tau) over all outputs.
Mat mean_patterns(const std::vector<ForecastOutput>& outputs, const TFTConfig& config);

// kappa(p, q) = sqrt(1 - sum_j sqrt(p_j q_j)); inputs are renormalized and the
// radicand computed as the Hellinger sum so kappa(p, p) is exactly zero.
double bhattacharyya_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

struct RegimeSeries {
    std::vector<double> times;
    std::vector<double> dist;                         // in [0, 1]
    Mat mean_pattern;                                 // [tau x N]
    std::vector<std::pair<double, double>> intervals;  // closed [begin, end] above threshold
};

// Distance between each forecast time's attention rows and the entity's
// average pattern, averaged over horizons; above-threshold runs are merged
// into flagged intervals.
RegimeSeries regime_distance(const std::vector<ForecastOutput>& outputs,
                             const std::vector<double>& forecast_times, const TFTConfig& config,
                             double threshold = 0.3);

struct TemporalPattern {
    std::vector<int> lags;  // position index n in [-k, 0] for one-step-ahead forecasts
    std::vector<double> mean, p10, p50, p90;
    std::vector<int> horizons;
    Mat horizon_curves;  // [|horizons| x N] mean attention rows
};

TemporalPattern temporal_patterns(const std::vector<ForecastOutput>& outputs,
                                  const TFTConfig& config);

}  // namespace tft
