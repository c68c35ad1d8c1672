#include "tft/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

namespace tft {

namespace {

constexpr const char* kPresenceColumn = "present";

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    cells.push_back(cur);
    return cells;
}

double parse_cell(const std::string& cell, int line_no, const std::string& col) {
    try {
        return parse_double(cell, col);
    } catch (const ConfigError&) {
        throw DataError("line " + std::to_string(line_no) + ": column '" + col +
                        "' has unparseable value '" + trim(cell) + "'");
    }
}

}  // namespace

std::string role_name(ColumnRole role) {
    switch (role) {
        case ColumnRole::Static: return "static";
        case ColumnRole::Known: return "known";
        case ColumnRole::Observed: return "observed";
        case ColumnRole::Target: return "target";
        case ColumnRole::EntityId: return "entity_id";
        case ColumnRole::TimeIndex: return "time_index";
    }
    return "?";
}

ColumnRole parse_role(const std::string& s) {
    if (s == "static") return ColumnRole::Static;
    if (s == "known") return ColumnRole::Known;
    if (s == "observed") return ColumnRole::Observed;
    if (s == "target") return ColumnRole::Target;
    if (s == "entity_id") return ColumnRole::EntityId;
    if (s == "time_index") return ColumnRole::TimeIndex;
    throw ConfigError("unknown column role '" + s + "'");
}

void DatasetSchema::validate() const {
    int targets = 0, entities = 0, times = 0;
    for (const auto& c : columns) {
        if (c.name.empty()) throw ConfigError("schema has a column without a name");
        if (c.kind == ColumnKind::Categorical && c.cardinality < 1) {
            throw ConfigError("categorical column '" + c.name + "' needs cardinality >= 1");
        }
        if (c.role == ColumnRole::Target) {
            ++targets;
            if (c.kind != ColumnKind::Real) {
                throw ConfigError("target column '" + c.name + "' must be real-valued");
            }
        }
        if (c.role == ColumnRole::EntityId) ++entities;
        if (c.role == ColumnRole::TimeIndex) ++times;
    }
    if (targets != 1) throw ConfigError("schema needs exactly one target column");
    if (entities != 1) throw ConfigError("schema needs exactly one entity_id column");
    if (times != 1) throw ConfigError("schema needs exactly one time_index column");
    if (lookback < 1) throw ConfigError("lookback k must be >= 1");
    if (horizon < 1) throw ConfigError("horizon tau_max must be >= 1");
    if (stride < 1) throw ConfigError("stride must be >= 1");
    if (!has_explicit_split) {
        if (train_frac <= 0.0 || val_frac < 0.0 || train_frac + val_frac > 1.0 + 1e-12) {
            throw ConfigError("split fractions must satisfy train > 0, val >= 0, train+val <= 1");
        }
    }
}

int DatasetSchema::col_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) return static_cast<int>(i);
    }
    return -1;
}

std::vector<int> DatasetSchema::role_indices(ColumnRole role) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].role == role) out.push_back(static_cast<int>(i));
    }
    return out;
}

int DatasetSchema::target_col() const { return role_indices(ColumnRole::Target).at(0); }
int DatasetSchema::entity_col() const { return role_indices(ColumnRole::EntityId).at(0); }
int DatasetSchema::time_col() const { return role_indices(ColumnRole::TimeIndex).at(0); }

DatasetSchema DatasetSchema::with_presence_flag() const {
    if (has_column(kPresenceColumn)) return *this;
    DatasetSchema out = *this;
    out.columns.push_back({kPresenceColumn, ColumnRole::Observed, ColumnKind::Real, 0});
    return out;
}

DatasetSchema parse_schema(const ConfigText& cfg) {
    DatasetSchema schema;
    for (const auto& [name, spec] : cfg.require("columns").entries) {
        ColumnSpec col;
        col.name = name;
        auto parts = split_list(spec);
        if (parts.empty()) throw ConfigError("column '" + name + "' is missing a role");
        col.role = parse_role(parts[0]);
        if (parts.size() > 1) {
            if (parts[1] == "categorical") {
                col.kind = ColumnKind::Categorical;
                if (parts.size() < 3) {
                    throw ConfigError("categorical column '" + name + "' needs a cardinality");
                }
                col.cardinality = static_cast<int>(parse_int(parts[2], "cardinality of " + name));
            } else if (parts[1] != "real") {
                throw ConfigError("unknown column kind '" + parts[1] + "' for '" + name + "'");
            }
        }
        schema.columns.push_back(col);
    }
    const auto& window = cfg.require("window");
    schema.lookback = static_cast<int>(window.get_int("k"));
    schema.horizon = static_cast<int>(window.get_int("tau_max"));
    schema.stride = static_cast<int>(window.get_int_or("stride", 1));
    if (const auto* split = cfg.find("split")) {
        if (split->has("train_end_time") || split->has("val_end_time")) {
            schema.has_explicit_split = true;
            schema.train_end_time = split->get_double("train_end_time");
            schema.val_end_time = split->get_double("val_end_time");
        } else {
            schema.train_frac = split->get_double_or("train_frac", schema.train_frac);
            schema.val_frac = split->get_double_or("val_frac", schema.val_frac);
        }
    }
    schema.validate();
    return schema;
}

ConfigText schema_to_config(const DatasetSchema& schema) {
    ConfigText cfg;
    auto& cols = cfg.add("columns");
    for (const auto& c : schema.columns) {
        std::string spec = role_name(c.role);
        spec += c.kind == ColumnKind::Categorical
                    ? ", categorical, " + std::to_string(c.cardinality)
                    : ", real";
        cols.entries.emplace_back(c.name, spec);
    }
    auto& window = cfg.add("window");
    window.set_int("k", schema.lookback);
    window.set_int("tau_max", schema.horizon);
    window.set_int("stride", schema.stride);
    auto& split = cfg.add("split");
    if (schema.has_explicit_split) {
        split.set_double("train_end_time", schema.train_end_time);
        split.set_double("val_end_time", schema.val_end_time);
    } else {
        split.set_double("train_frac", schema.train_frac);
        split.set_double("val_frac", schema.val_frac);
    }
    return cfg;
}

VariableLayout make_layout(const DatasetSchema& schema) {
    VariableLayout layout;
    layout.static_cols = schema.role_indices(ColumnRole::Static);
    layout.past_cols.push_back(schema.target_col());
    for (int c : schema.role_indices(ColumnRole::Observed)) layout.past_cols.push_back(c);
    std::vector<int> known = schema.role_indices(ColumnRole::Known);
    for (int c : known) layout.past_cols.push_back(c);
    layout.future_cols = known;
    return layout;
}

// ---- CSV ------------------------------------------------------------------

LoadedData load_csv(const std::string& path, const DatasetSchema& schema_in) {
    schema_in.validate();
    const DatasetSchema schema = schema_in.with_presence_flag();
    const int presence_col = schema.col_index(kPresenceColumn);
    const bool presence_was_declared = schema_in.has_column(kPresenceColumn);

    std::ifstream in(path);
    if (!in) throw DataError("cannot open data file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError(path + ": missing header row");
    const std::vector<std::string> header = split_csv_line(line);
    std::vector<int> csv_col(schema.columns.size(), -1);
    for (std::size_t i = 0; i < schema.columns.size(); ++i) {
        const std::string& want = schema.columns[i].name;
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (trim(header[j]) == want) {
                csv_col[i] = static_cast<int>(j);
                break;
            }
        }
        if (csv_col[i] < 0 && static_cast<int>(i) != presence_col) {
            throw DataError(path + ": header is missing schema column '" + want + "'");
        }
    }

    const int entity_col = schema.entity_col();
    const int time_col = schema.time_col();
    const int ncols = static_cast<int>(schema.columns.size());

    struct RawRow {
        double time;
        Eigen::VectorXd values;
    };
    std::vector<std::string> entity_order;
    std::map<std::string, std::vector<RawRow>> by_entity;
    int unknown_category_warnings = 0;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        const std::string entity = trim(cells.at(csv_col[entity_col]));
        if (entity.empty() || entity.find('|') != std::string::npos) {
            throw DataError("line " + std::to_string(line_no) + ": invalid entity id '" + entity +
                            "'");
        }
        RawRow row;
        row.values = Eigen::VectorXd::Zero(ncols);
        for (int c = 0; c < ncols; ++c) {
            if (c == entity_col) continue;
            if (csv_col[c] < 0) {  // absent presence column: rows present by definition
                row.values[c] = 1.0;
                continue;
            }
            if (csv_col[c] >= static_cast<int>(cells.size())) {
                throw DataError("line " + std::to_string(line_no) + ": too few cells");
            }
            double v = parse_cell(cells[csv_col[c]], line_no, schema.columns[c].name);
            if (schema.columns[c].kind == ColumnKind::Categorical) {
                const double rounded = std::round(v);
                if (rounded < 0 || rounded >= schema.columns[c].cardinality ||
                    std::abs(v - rounded) > 1e-9) {
                    if (++unknown_category_warnings <= 5) {
                        std::cerr << "warning: line " << line_no << ": unknown category " << v
                                  << " in '" << schema.columns[c].name
                                  << "', using reserved index 0\n";
                    }
                    v = 0.0;
                } else {
                    v = rounded;
                }
            }
            row.values[c] = v;
        }
        row.time = row.values[time_col];
        if (std::abs(row.time - std::round(row.time)) > 1e-9) {
            throw DataError("line " + std::to_string(line_no) + ": time index " +
                            format_double(row.time) + " is not an integer");
        }
        row.time = std::round(row.time);
        row.values[time_col] = row.time;
        if (by_entity.find(entity) == by_entity.end()) entity_order.push_back(entity);
        by_entity[entity].push_back(std::move(row));
    }

    LoadedData out;
    out.schema = schema;
    for (const std::string& entity : entity_order) {
        auto& rows = by_entity[entity];
        std::stable_sort(rows.begin(), rows.end(),
                         [](const RawRow& a, const RawRow& b) { return a.time < b.time; });
        for (std::size_t i = 1; i < rows.size(); ++i) {
            if (rows[i].time == rows[i - 1].time) {
                throw DataError("entity '" + entity + "': duplicate time index " +
                                format_double(rows[i].time));
            }
        }
        EntitySeries series;
        series.entity = entity;
        std::vector<Eigen::VectorXd> filled;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i > 0) {
                // Impute gaps with the last available observation, present = 0.
                for (double t = rows[i - 1].time + 1; t < rows[i].time - 0.5; t += 1.0) {
                    Eigen::VectorXd imputed = rows[i - 1].values;
                    imputed[time_col] = t;
                    imputed[presence_col] = 0.0;
                    series.times.push_back(t);
                    filled.push_back(std::move(imputed));
                }
            }
            Eigen::VectorXd v = rows[i].values;
            if (!presence_was_declared) v[presence_col] = 1.0;
            series.times.push_back(rows[i].time);
            filled.push_back(std::move(v));
        }
        series.values = Mat(filled.size(), ncols);
        for (std::size_t i = 0; i < filled.size(); ++i) series.values.row(i) = filled[i];
        // Static columns must be constant within an entity.
        for (int c : schema.role_indices(ColumnRole::Static)) {
            for (int r = 1; r < series.values.rows(); ++r) {
                if (series.values(r, c) != series.values(0, c)) {
                    throw DataError("entity '" + entity + "': static column '" +
                                    schema.columns[c].name + "' varies over time");
                }
            }
        }
        out.series.push_back(std::move(series));
    }
    return out;
}

void write_csv(const std::string& path, const DatasetSchema& schema,
               const std::vector<EntitySeries>& series) {
    std::ofstream outf(path);
    if (!outf) throw DataError("cannot write data file: " + path);
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        outf << (c ? "," : "") << schema.columns[c].name;
    }
    outf << "\n";
    const int entity_col = schema.entity_col();
    for (const auto& s : series) {
        for (int r = 0; r < s.values.rows(); ++r) {
            for (int c = 0; c < s.values.cols(); ++c) {
                if (c) outf << ",";
                if (c == entity_col) {
                    outf << s.entity;
                } else {
                    outf << format_double(s.values(r, c));
                }
            }
            outf << "\n";
        }
    }
}

// ---- normalization -----------------------------------------------------------

namespace {

ColumnStats stats_of(const std::vector<double>& xs) {
    ColumnStats st;
    if (xs.empty()) return st;
    st.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
    double var = 0.0;
    for (double x : xs) var += (x - st.mean) * (x - st.mean);
    var /= xs.size();
    st.std = std::sqrt(var);
    return st;
}

ColumnStats guard_std(ColumnStats st, const std::string& what) {
    if (st.std < 1e-12) {
        std::cerr << "warning: " << what << " has zero variance, using std = 1\n";
        st.std = 1.0;
    }
    return st;
}

}  // namespace

Normalizer Normalizer::fit(const std::vector<EntitySeries>& series, const DatasetSchema& schema,
                           double global_cutoff) {
    std::map<std::string, double> cutoffs;
    for (const auto& s : series) cutoffs[s.entity] = global_cutoff;
    return fit(series, schema, cutoffs);
}

Normalizer Normalizer::fit(const std::vector<EntitySeries>& series, const DatasetSchema& schema,
                           const std::map<std::string, double>& train_cutoff) {
    Normalizer n;
    n.target_col_ = schema.target_col();
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto& col = schema.columns[c];
        if (col.kind != ColumnKind::Real) continue;
        if (col.role == ColumnRole::Known || col.role == ColumnRole::Observed ||
            col.role == ColumnRole::Target) {
            n.per_entity_cols_.push_back(static_cast<int>(c));
        } else if (col.role == ColumnRole::Static) {
            n.dataset_cols_.push_back(static_cast<int>(c));
        }
    }

    std::map<int, std::vector<double>> pooled;
    for (const auto& s : series) {
        const auto it = train_cutoff.find(s.entity);
        if (it == train_cutoff.end()) {
            throw ConfigError("no training cutoff for entity '" + s.entity + "'");
        }
        const double cutoff = it->second;
        if (cutoff <= s.times.front()) {
            std::cerr << "warning: entity '" << s.entity
                      << "' has no training rows, it will use fallback statistics\n";
            continue;
        }
        for (int c : n.per_entity_cols_) {
            std::vector<double> xs;
            for (int r = 0; r < s.length() && s.times[r] < cutoff; ++r) {
                xs.push_back(s.values(r, c));
            }
            ColumnStats st = guard_std(stats_of(xs), "entity '" + s.entity + "' column '" +
                                                         schema.columns[c].name + "'");
            n.entity_stats_[s.entity][c] = st;
            auto& pool = pooled[c];
            for (double x : xs) pool.push_back(x);
        }
        for (int c : n.dataset_cols_) pooled[c].push_back(s.values(0, c));
    }
    for (auto& [c, xs] : pooled) {
        n.fallback_[c] = guard_std(stats_of(xs), "dataset column " + std::to_string(c));
    }
    return n;
}

const ColumnStats& Normalizer::stats_for(const std::string& entity, int col) const {
    if (std::find(dataset_cols_.begin(), dataset_cols_.end(), col) == dataset_cols_.end()) {
        const auto eit = entity_stats_.find(entity);
        if (eit != entity_stats_.end()) {
            const auto cit = eit->second.find(col);
            if (cit != eit->second.end()) return cit->second;
        }
    }
    const auto fit_ = fallback_.find(col);
    if (fit_ == fallback_.end()) {
        throw ContractError("no statistics for column " + std::to_string(col));
    }
    return fit_->second;
}

std::vector<EntitySeries> Normalizer::apply(const std::vector<EntitySeries>& series) const {
    std::vector<EntitySeries> out = series;
    for (auto& s : out) {
        if (entity_stats_.find(s.entity) == entity_stats_.end() && !per_entity_cols_.empty()) {
            std::cerr << "warning: entity '" << s.entity
                      << "' was not seen in training, normalizing with fallback statistics\n";
        }
        for (int c : per_entity_cols_) {
            const ColumnStats& st = stats_for(s.entity, c);
            s.values.col(c) = (s.values.col(c).array() - st.mean) / st.std;
        }
        for (int c : dataset_cols_) {
            const ColumnStats& st = stats_for(s.entity, c);
            s.values.col(c) = (s.values.col(c).array() - st.mean) / st.std;
        }
    }
    return out;
}

std::vector<EntitySeries> Normalizer::invert(const std::vector<EntitySeries>& series) const {
    std::vector<EntitySeries> out = series;
    for (auto& s : out) {
        for (int c : per_entity_cols_) {
            const ColumnStats& st = stats_for(s.entity, c);
            s.values.col(c) = s.values.col(c).array() * st.std + st.mean;
        }
        for (int c : dataset_cols_) {
            const ColumnStats& st = stats_for(s.entity, c);
            s.values.col(c) = s.values.col(c).array() * st.std + st.mean;
        }
    }
    return out;
}

double Normalizer::denormalize_target(const std::string& entity, double value) const {
    const ColumnStats& st = stats_for(entity, target_col_);
    return value * st.std + st.mean;
}

double Normalizer::normalize_target(const std::string& entity, double value) const {
    const ColumnStats& st = stats_for(entity, target_col_);
    return (value - st.mean) / st.std;
}

ConfigText::Section Normalizer::serialize() const {
    ConfigText::Section s;
    s.name = "normalizer";
    auto join = [](const std::vector<int>& xs) {
        std::string out;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(xs[i]);
        }
        return out;
    };
    s.set("per_entity_cols", join(per_entity_cols_));
    s.set("dataset_cols", join(dataset_cols_));
    s.set_int("target_col", target_col_);
    for (const auto& [c, st] : fallback_) {
        s.set("stat|*|" + std::to_string(c), format_double(st.mean) + "," + format_double(st.std));
    }
    for (const auto& [entity, cols] : entity_stats_) {
        for (const auto& [c, st] : cols) {
            s.set("stat|" + entity + "|" + std::to_string(c),
                  format_double(st.mean) + "," + format_double(st.std));
        }
    }
    return s;
}

Normalizer Normalizer::deserialize(const ConfigText::Section& section,
                                   const DatasetSchema& schema) {
    (void)schema;
    Normalizer n;
    for (const std::string& tok : split_list(section.get("per_entity_cols"))) {
        if (!tok.empty()) n.per_entity_cols_.push_back(static_cast<int>(parse_int(tok, "per_entity_cols")));
    }
    for (const std::string& tok : split_list(section.get("dataset_cols"))) {
        if (!tok.empty()) n.dataset_cols_.push_back(static_cast<int>(parse_int(tok, "dataset_cols")));
    }
    n.target_col_ = static_cast<int>(section.get_int("target_col"));
    for (const auto& [key, value] : section.entries) {
        if (key.rfind("stat|", 0) != 0) continue;
        const std::size_t second = key.find('|', 5);
        if (second == std::string::npos) throw ConfigError("malformed normalizer key: " + key);
        const std::string entity = key.substr(5, second - 5);
        const int col = static_cast<int>(parse_int(key.substr(second + 1), "normalizer column"));
        const auto parts = split_list(value);
        if (parts.size() != 2) throw ConfigError("malformed normalizer stats: " + value);
        ColumnStats st{parse_double(parts[0], "mean"), parse_double(parts[1], "std")};
        if (entity == "*") {
            n.fallback_[col] = st;
        } else {
            n.entity_stats_[entity][col] = st;
        }
    }
    return n;
}

// ---- windowing -----------------------------------------------------------------

std::vector<WindowedSample> make_windows(const EntitySeries& series, const DatasetSchema& schema,
                                         int lookback, int horizon, int stride) {
    std::vector<WindowedSample> out;
    const int total = lookback + 1 + horizon;
    if (series.length() < total) return out;
    const VariableLayout layout = make_layout(schema);
    const int target_col = schema.target_col();
    for (int start = 0; start + total <= series.length(); start += stride) {
        WindowedSample w;
        w.entity = series.entity;
        w.first_row = start;
        const int t = start + lookback;  // forecast start position
        w.forecast_time = series.times[t];
        w.past_start_time = series.times[start];
        w.target_end_time = series.times[t + horizon];
        w.statics = Mat(1, layout.static_cols.size());
        for (std::size_t j = 0; j < layout.static_cols.size(); ++j) {
            w.statics(0, static_cast<int>(j)) = series.values(start, layout.static_cols[j]);
        }
        w.past = Mat(lookback + 1, layout.past_cols.size());
        for (int r = 0; r <= lookback; ++r) {
            for (std::size_t j = 0; j < layout.past_cols.size(); ++j) {
                w.past(r, static_cast<int>(j)) = series.values(start + r, layout.past_cols[j]);
            }
        }
        w.future = Mat(horizon, layout.future_cols.size());
        w.targets = Eigen::VectorXd(horizon);
        for (int r = 0; r < horizon; ++r) {
            for (std::size_t j = 0; j < layout.future_cols.size(); ++j) {
                w.future(r, static_cast<int>(j)) = series.values(t + 1 + r, layout.future_cols[j]);
            }
            w.targets[r] = series.values(t + 1 + r, target_col);
        }
        out.push_back(std::move(w));
    }
    return out;
}

// ---- chronological split ---------------------------------------------------------

SplitBounds resolve_split(const std::vector<EntitySeries>& series, const DatasetSchema& schema) {
    SplitBounds bounds;
    for (const auto& s : series) {
        if (schema.has_explicit_split) {
            bounds.train_end[s.entity] = schema.train_end_time;
            bounds.val_end[s.entity] = schema.val_end_time;
            continue;
        }
        const int n = s.length();
        const int train_rows = static_cast<int>(std::floor(schema.train_frac * n));
        const int val_rows = static_cast<int>(std::floor((schema.train_frac + schema.val_frac) * n));
        const double after_last = s.times.back() + 1.0;
        bounds.train_end[s.entity] = train_rows < n ? s.times[train_rows] : after_last;
        bounds.val_end[s.entity] = val_rows < n ? s.times[val_rows] : after_last;
    }
    return bounds;
}

DataSplit chrono_split(const std::vector<EntitySeries>& series, const DatasetSchema& schema) {
    schema.validate();
    const SplitBounds bounds = resolve_split(series, schema);
    DataSplit split;
    for (const auto& s : series) {
        const double train_end = bounds.train_end.at(s.entity);
        const double val_end = bounds.val_end.at(s.entity);
        for (auto& w : make_windows(s, schema, schema.lookback, schema.horizon, schema.stride)) {
            if (w.target_end_time < train_end) {
                split.train.push_back(std::move(w));
            } else if (w.target_end_time < val_end) {
                split.val.push_back(std::move(w));
            } else {
                split.test.push_back(std::move(w));
            }
        }
    }
    if (split.train.empty()) throw ConfigError("chronological split left the training partition empty");
    if (split.val.empty()) throw ConfigError("chronological split left the validation partition empty");
    return split;
}

int count_leakage_violations(const std::vector<EntitySeries>& series, const DataSplit& split,
                             const DatasetSchema& schema, const SplitBounds& bounds) {
    std::map<std::string, const EntitySeries*> by_entity;
    for (const auto& s : series) by_entity[s.entity] = &s;
    const VariableLayout layout = make_layout(schema);
    const int target_col = schema.target_col();
    int violations = 0;

    auto check = [&](const std::vector<WindowedSample>& samples, int partition) {
        for (const auto& w : samples) {
            const EntitySeries& s = *by_entity.at(w.entity);
            const int t = w.first_row + schema.lookback;
            bool ok = true;
            // Past values must carry timestamps <= forecast start, targets after it.
            for (int r = 0; r <= schema.lookback; ++r) {
                ok = ok && s.times[w.first_row + r] <= w.forecast_time;
                for (std::size_t j = 0; j < layout.past_cols.size(); ++j) {
                    ok = ok && w.past(r, static_cast<int>(j)) ==
                                   s.values(w.first_row + r, layout.past_cols[j]);
                }
            }
            for (int r = 0; r < schema.horizon; ++r) {
                ok = ok && s.times[t + 1 + r] > w.forecast_time;
                ok = ok && w.targets[r] == s.values(t + 1 + r, target_col);
            }
            ok = ok && s.times[t] == w.forecast_time;
            // Partition rule: the whole target range stays inside its partition
            // (later partitions may reach back for lookback only).
            const double train_end = bounds.train_end.at(w.entity);
            const double val_end = bounds.val_end.at(w.entity);
            if (partition == 0) ok = ok && w.target_end_time < train_end;
            if (partition == 1) ok = ok && w.target_end_time >= train_end && w.target_end_time < val_end;
            if (partition == 2) ok = ok && w.target_end_time >= val_end;
            if (!ok) ++violations;
        }
    };
    check(split.train, 0);
    check(split.val, 1);
    check(split.test, 2);
    return violations;
}

// ---- synthetic data ----------------------------------------------------------------

SynthKind parse_synth_kind(const std::string& s) {
    if (s == "seasonal") return SynthKind::Seasonal;
    if (s == "regime_switch") return SynthKind::RegimeSwitch;
    if (s == "noise_features") return SynthKind::NoiseFeatures;
    throw ConfigError("unknown synthetic dataset kind '" + s + "'");
}

SynthData synth_generate(SynthKind kind, const SynthParams& params, std::uint64_t seed) {
    if (params.entities < 1 || params.steps < 2 || params.period < 1) {
        throw ConfigError("synthetic generator needs entities >= 1, steps >= 2, period >= 1");
    }
    SynthData out;
    DatasetSchema& schema = out.schema;
    schema.columns.push_back({"entity", ColumnRole::EntityId, ColumnKind::Real, 0});
    schema.columns.push_back({"t", ColumnRole::TimeIndex, ColumnKind::Real, 0});
    schema.columns.push_back({"amp", ColumnRole::Static, ColumnKind::Real, 0});
    schema.columns.push_back({"y", ColumnRole::Target, ColumnKind::Real, 0});
    schema.columns.push_back({"signal", ColumnRole::Observed, ColumnKind::Real, 0});
    for (int j = 0; j < params.noise_features; ++j) {
        schema.columns.push_back(
            {"noise" + std::to_string(j + 1), ColumnRole::Observed, ColumnKind::Real, 0});
    }
    schema.columns.push_back({"phase", ColumnRole::Known, ColumnKind::Real, 0});
    schema.lookback = params.lookback;
    schema.horizon = params.horizon;
    schema.train_frac = params.train_frac;
    schema.val_frac = params.val_frac;

    const int signal_col = schema.col_index("signal");
    const int phase_col = schema.col_index("phase");
    const int amp_col = schema.col_index("amp");
    const int y_col = schema.col_index("y");
    const int time_col = schema.time_col();
    const int ncols = static_cast<int>(schema.columns.size());
    const double two_pi = 6.283185307179586;

    if (kind == SynthKind::RegimeSwitch) {
        out.switch_begin_row = static_cast<int>(std::floor(params.switch_begin_frac * params.steps));
        out.switch_end_row = static_cast<int>(std::floor(params.switch_end_frac * params.steps));
    }

    RngState root(seed);
    for (int e = 0; e < params.entities; ++e) {
        RngState rng = root.stream(static_cast<std::uint64_t>(e));
        const double amp = rng.next_uniform(params.amp_min, params.amp_max);
        const double phase = rng.next_uniform(0.0, static_cast<double>(params.period));
        EntitySeries s;
        s.entity = "e" + std::to_string(e);
        s.values = Mat::Zero(params.steps, ncols);
        for (int t = 0; t < params.steps; ++t) {
            s.times.push_back(t);
            s.values(t, time_col) = t;
            s.values(t, amp_col) = amp;
            const int tc = t % params.period;
            s.values(t, phase_col) = tc;
            const double clean = amp * std::sin(two_pi * (tc + phase) / params.period);
            const bool in_regime = kind == SynthKind::RegimeSwitch && t >= out.switch_begin_row &&
                                   t < out.switch_end_row;
            double y, sig;
            if (kind == SynthKind::NoiseFeatures) {
                y = rng.next_gaussian();
                sig = rng.next_gaussian();
            } else if (in_regime) {
                y = params.switch_noise_std * rng.next_gaussian();
                sig = 0.0;
            } else {
                y = clean + params.noise_std * rng.next_gaussian();
                sig = clean;
            }
            s.values(t, y_col) = y;
            s.values(t, signal_col) = sig;
            for (int j = 0; j < params.noise_features; ++j) {
                s.values(t, schema.col_index("noise" + std::to_string(j + 1))) =
                    rng.next_gaussian();
            }
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

}  // namespace tft
