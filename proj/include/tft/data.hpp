#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tft/config_text.hpp"
#include "tft/errors.hpp"
#include "tft/rng.hpp"
#include "tft/tensor.hpp"

namespace tft {

enum class ColumnRole { Static, Known, Observed, Target, EntityId, TimeIndex };
enum class ColumnKind { Real, Categorical };

std::string role_name(ColumnRole role);
ColumnRole parse_role(const std::string& s);

struct ColumnSpec {
    std::string name;
    ColumnRole role = ColumnRole::Observed;
    ColumnKind kind = ColumnKind::Real;
    int cardinality = 0;  // categorical only; index 0 is reserved for unknown values
};

// Column roles plus the windowing and split parameters that travel with a
// dataset. Time indices must be integral and unit-spaced after imputation.
struct DatasetSchema {
    std::vector<ColumnSpec> columns;
    int lookback = 0;  // past steps before the forecast start (window holds lookback+1)
    int horizon = 0;
    int stride = 1;
    double train_frac = 0.8;
    double val_frac = 0.1;
    bool has_explicit_split = false;
    double train_end_time = 0.0;  // exclusive, used when has_explicit_split
    double val_end_time = 0.0;

    void validate() const;
    int col_index(const std::string& name) const;  // -1 when absent
    std::vector<int> role_indices(ColumnRole role) const;
    int target_col() const;
    int entity_col() const;
    int time_col() const;
    bool has_column(const std::string& name) const { return col_index(name) >= 0; }
    // Appends the "present" observed flag column emitted by CSV imputation.
    DatasetSchema with_presence_flag() const;
};

DatasetSchema parse_schema(const ConfigText& cfg);
ConfigText schema_to_config(const DatasetSchema& schema);

// Model-facing variable ordering derived from the schema: past variables are
// target first, then observed, then known; future variables are the known set.
struct VariableLayout {
    std::vector<int> static_cols;
    std::vector<int> past_cols;
    std::vector<int> future_cols;
};

VariableLayout make_layout(const DatasetSchema& schema);

struct EntitySeries {
    std::string entity;
    std::vector<double> times;  // strictly increasing, unit-spaced after imputation
    Mat values;                 // [T x columns.size()], entity column unused

    int length() const { return static_cast<int>(times.size()); }
};

struct LoadedData {
    DatasetSchema schema;  // input schema plus the presence flag column
    std::vector<EntitySeries> series;
};

// Groups rows by entity (first-appearance order), sorts by time, fills gaps
// with the last available observation and flags imputed rows with present=0.
LoadedData load_csv(const std::string& path, const DatasetSchema& schema);

void write_csv(const std::string& path, const DatasetSchema& schema,
               const std::vector<EntitySeries>& series);

// ---- normalization ------------------------------------------------------------

struct ColumnStats {
    double mean = 0.0;
    double std = 1.0;
};

// Per-entity z-score statistics for every real temporal column, fitted on the
// training range only. Static real columns and unseen entities fall back to
// dataset-level statistics.
class Normalizer {
public:
    static Normalizer fit(const std::vector<EntitySeries>& series, const DatasetSchema& schema,
                          const std::map<std::string, double>& train_cutoff);
    static Normalizer fit(const std::vector<EntitySeries>& series, const DatasetSchema& schema,
                          double global_cutoff);

    std::vector<EntitySeries> apply(const std::vector<EntitySeries>& series) const;
    std::vector<EntitySeries> invert(const std::vector<EntitySeries>& series) const;

    const ColumnStats& stats_for(const std::string& entity, int col) const;
    double denormalize_target(const std::string& entity, double value) const;
    double normalize_target(const std::string& entity, double value) const;

    ConfigText::Section serialize() const;
    static Normalizer deserialize(const ConfigText::Section& section, const DatasetSchema& schema);

private:
    std::vector<int> per_entity_cols_;  // temporal real columns
    std::vector<int> dataset_cols_;     // static real columns
    int target_col_ = -1;
    std::map<std::string, std::map<int, ColumnStats>> entity_stats_;
    std::map<int, ColumnStats> fallback_;
    friend struct NormalizerAccess;
};

// ---- windowing ------------------------------------------------------------------

struct WindowedSample {
    std::string entity;
    int first_row = 0;            // index of the first past row in the source series
    double forecast_time = 0.0;   // time value at the forecast start t
    double past_start_time = 0.0;
    double target_end_time = 0.0;
    Mat statics;                  // [1 x m_static]
    Mat past;                     // [(lookback+1) x m_past]
    Mat future;                   // [horizon x m_future]
    Eigen::VectorXd targets;      // [horizon]
};

std::vector<WindowedSample> make_windows(const EntitySeries& series, const DatasetSchema& schema,
                                         int lookback, int horizon, int stride);

// ---- chronological split ----------------------------------------------------------

struct SplitBounds {
    std::map<std::string, double> train_end;  // exclusive time boundary per entity
    std::map<std::string, double> val_end;
};

SplitBounds resolve_split(const std::vector<EntitySeries>& series, const DatasetSchema& schema);

struct DataSplit {
    std::vector<WindowedSample> train, val, test;
};

// Windows whose target range crosses a partition boundary land in the later
// partition. Empty train or validation partitions raise ConfigError.
DataSplit chrono_split(const std::vector<EntitySeries>& series, const DatasetSchema& schema);

// Returns the number of samples violating the causal layout (past after the
// forecast start, targets before it, or training targets past the boundary).
int count_leakage_violations(const std::vector<EntitySeries>& series, const DataSplit& split,
                             const DatasetSchema& schema, const SplitBounds& bounds);

// ---- synthetic data -----------------------------------------------------------------

enum class SynthKind { Seasonal, RegimeSwitch, NoiseFeatures };

SynthKind parse_synth_kind(const std::string& s);

struct SynthParams {
    int entities = 10;
    int steps = 200;
    int period = 24;
    // Shape of the repeating pattern: 1 = pure sinusoid, n > 1 = random mix of
    // the first n harmonics, 0 = independent random value per period slot
    // (forces cross-period retrieval instead of local extrapolation).
    int profile_harmonics = 1;
    double noise_std = 0.1;
    double amp_min = 0.8;
    double amp_max = 1.2;
    int noise_features = 2;
    double switch_begin_frac = 0.45;  // regime segment, fraction of steps
    double switch_end_frac = 0.75;
    double switch_noise_std = 1.0;
    int lookback = 48;
    int horizon = 12;
    double train_frac = 0.8;
    double val_frac = 0.1;
};

struct SynthData {
    DatasetSchema schema;
    std::vector<EntitySeries> series;
    int switch_begin_row = -1;  // regime bounds when kind == RegimeSwitch
    int switch_end_row = -1;
};

SynthData synth_generate(SynthKind kind, const SynthParams& params, std::uint64_t seed);

}  // namespace tft
