#include "tft/model.hpp"

#include <algorithm>
#include <cmath>

namespace tft {

// ---- ablation flags -----------------------------------------------------------

const std::vector<std::string>& AblationFlags::names() {
    static const std::vector<std::string> kNames = {
        "no_gating", "no_static_encoders", "fixed_variable_weights", "fixed_attention",
        "positional_encoding"};
    return kNames;
}

bool& AblationFlags::by_name(const std::string& name) {
    if (name == "no_gating") return no_gating;
    if (name == "no_static_encoders") return no_static_encoders;
    if (name == "fixed_variable_weights") return fixed_variable_weights;
    if (name == "fixed_attention") return fixed_attention;
    if (name == "positional_encoding") return positional_encoding;
    throw ConfigError("unknown ablation flag '" + name + "'");
}

std::string AblationFlags::to_string() const {
    std::string out;
    AblationFlags copy = *this;
    for (const auto& n : names()) {
        if (copy.by_name(n)) {
            if (!out.empty()) out += ",";
            out += n;
        }
    }
    return out.empty() ? "none" : out;
}

AblationFlags AblationFlags::parse(const std::string& spec) {
    AblationFlags flags;
    const std::string t = trim(spec);
    if (t.empty() || t == "none") return flags;
    for (const std::string& name : split_list(t)) flags.by_name(name) = true;
    return flags;
}

// ---- config ---------------------------------------------------------------------

int TFTConfig::quantile_index(double q) const {
    for (std::size_t i = 0; i < quantiles.size(); ++i) {
        if (std::abs(quantiles[i] - q) < 1e-12) return static_cast<int>(i);
    }
    return -1;
}

int TFTConfig::effective_past_vars() const {
    return static_cast<int>(past_ids.size()) +
           (ablation.no_static_encoders ? static_cast<int>(static_ids.size()) : 0);
}

int TFTConfig::effective_future_vars() const {
    return static_cast<int>(future_ids.size()) +
           (ablation.no_static_encoders ? static_cast<int>(static_ids.size()) : 0);
}

std::vector<std::string> TFTConfig::group_names(const std::vector<int>& ids) const {
    std::vector<std::string> out;
    for (int id : ids) out.push_back(variables[id].name);
    return out;
}

std::vector<std::string> TFTConfig::past_weight_names() const {
    std::vector<std::string> out = group_names(past_ids);
    if (ablation.no_static_encoders) {
        for (const auto& n : group_names(static_ids)) out.push_back(n);
    }
    return out;
}

std::vector<std::string> TFTConfig::future_weight_names() const {
    std::vector<std::string> out = group_names(future_ids);
    if (ablation.no_static_encoders) {
        for (const auto& n : group_names(static_ids)) out.push_back(n);
    }
    return out;
}

void TFTConfig::validate() const {
    if (lookback < 1) throw ConfigError("lookback k must be >= 1");
    if (horizon < 1) throw ConfigError("horizon tau_max must be >= 1");
    if (d_model < 1) throw ConfigError("d_model must be positive");
    if (num_heads < 1 || d_model % num_heads != 0) {
        throw ConfigError("d_model " + std::to_string(d_model) + " must be divisible by num_heads " +
                          std::to_string(num_heads));
    }
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
    if (quantiles.empty()) throw ConfigError("at least one quantile is required");
    for (std::size_t i = 0; i < quantiles.size(); ++i) {
        if (quantiles[i] <= 0.0 || quantiles[i] >= 1.0) {
            throw ConfigError("quantiles must lie strictly inside (0, 1)");
        }
        if (i > 0 && quantiles[i] <= quantiles[i - 1]) {
            throw ConfigError("quantiles must be strictly increasing");
        }
    }
    if (past_ids.empty()) throw ConfigError("the model needs at least one past input");
    if (future_ids.empty()) {
        throw ConfigError("the model needs at least one known (future-available) input");
    }
    for (int id : static_ids) {
        if (variables[id].categorical && variables[id].cardinality < 1) {
            throw ConfigError("categorical variable '" + variables[id].name +
                              "' needs cardinality >= 1");
        }
    }
}

TFTConfig TFTConfig::from_schema(const DatasetSchema& schema, int d_model, int num_heads,
                                 double dropout) {
    schema.validate();
    TFTConfig cfg;
    cfg.lookback = schema.lookback;
    cfg.horizon = schema.horizon;
    cfg.d_model = d_model;
    cfg.num_heads = num_heads;
    cfg.dropout = dropout;
    const VariableLayout layout = make_layout(schema);
    auto add_var = [&](int col) {
        const ColumnSpec& c = schema.columns[col];
        cfg.variables.push_back(
            {c.name, c.kind == ColumnKind::Categorical, c.cardinality});
        return static_cast<int>(cfg.variables.size()) - 1;
    };
    for (int col : layout.static_cols) cfg.static_ids.push_back(add_var(col));
    for (int col : layout.past_cols) cfg.past_ids.push_back(add_var(col));
    for (int col : layout.future_cols) {
        // Known inputs already live in the past set; reuse the same variable.
        const std::string& name = schema.columns[col].name;
        int found = -1;
        for (std::size_t i = 0; i < cfg.variables.size(); ++i) {
            if (cfg.variables[i].name == name) found = static_cast<int>(i);
        }
        cfg.future_ids.push_back(found);
    }
    cfg.validate();
    return cfg;
}

void config_to_text(const TFTConfig& config, ConfigText& out) {
    auto& model = out.add("model");
    model.set_int("k", config.lookback);
    model.set_int("tau_max", config.horizon);
    model.set_int("d_model", config.d_model);
    model.set_int("num_heads", config.num_heads);
    model.set_double("dropout", config.dropout);
    std::string qs;
    for (std::size_t i = 0; i < config.quantiles.size(); ++i) {
        if (i) qs += ",";
        qs += format_double(config.quantiles[i]);
    }
    model.set("quantiles", qs);
    model.set("ablation", config.ablation.to_string());

    auto& vars = out.add("variables");
    for (std::size_t id = 0; id < config.variables.size(); ++id) {
        std::string groups;
        auto in = [&](const std::vector<int>& ids) {
            return std::find(ids.begin(), ids.end(), static_cast<int>(id)) != ids.end();
        };
        if (in(config.static_ids)) groups = "static";
        if (in(config.past_ids)) groups += groups.empty() ? "past" : "+past";
        if (in(config.future_ids)) groups += groups.empty() ? "future" : "+future";
        const VariableSpec& v = config.variables[id];
        std::string spec = groups + (v.categorical
                                         ? ", categorical, " + std::to_string(v.cardinality)
                                         : ", real");
        vars.entries.emplace_back(v.name, spec);
    }
}

TFTConfig config_from_text(const ConfigText& cfg) {
    TFTConfig config;
    const auto& model = cfg.require("model");
    config.lookback = static_cast<int>(model.get_int("k"));
    config.horizon = static_cast<int>(model.get_int("tau_max"));
    config.d_model = static_cast<int>(model.get_int("d_model"));
    config.num_heads = static_cast<int>(model.get_int("num_heads"));
    config.dropout = model.get_double("dropout");
    config.quantiles.clear();
    for (const std::string& q : split_list(model.get("quantiles"))) {
        config.quantiles.push_back(parse_double(q, "quantile"));
    }
    config.ablation = AblationFlags::parse(model.get_or("ablation", "none"));

    for (const auto& [name, spec] : cfg.require("variables").entries) {
        auto parts = split_list(spec);
        if (parts.empty()) throw ConfigError("variable '" + name + "' is missing its groups");
        VariableSpec v;
        v.name = name;
        if (parts.size() > 1 && parts[1] == "categorical") {
            v.categorical = true;
            if (parts.size() < 3) {
                throw ConfigError("categorical variable '" + name + "' needs a cardinality");
            }
            v.cardinality = static_cast<int>(parse_int(parts[2], "cardinality"));
        }
        config.variables.push_back(v);
        const int id = static_cast<int>(config.variables.size()) - 1;
        std::stringstream groups(parts[0]);
        std::string g;
        while (std::getline(groups, g, '+')) {
            if (g == "static") config.static_ids.push_back(id);
            else if (g == "past") config.past_ids.push_back(id);
            else if (g == "future") config.future_ids.push_back(id);
            else throw ConfigError("unknown variable group '" + g + "'");
        }
    }
    config.validate();
    return config;
}

// ---- model construction ------------------------------------------------------------

namespace {

VarEmbedding make_embedding(const VariableSpec& v, int d_model, RngState& rng) {
    VarEmbedding e;
    e.categorical = v.categorical;
    if (v.categorical) {
        e.table = glorot_uniform(v.cardinality, d_model, rng);
    } else {
        e.w = glorot_uniform(1, d_model, rng);
        e.b = Tensor::zeros({d_model}, true);
    }
    return e;
}

void for_each_glu(TFTModel& m, const std::function<void(GluParams&)>& fn) {
    auto grn = [&](GrnParams& g) { fn(g.glu); };
    auto vsn = [&](VsnParams& v) {
        if (!v.fixed_weights) grn(v.weight_grn);
        for (auto& g : v.per_var) grn(g);
    };
    if (!m.config.static_ids.empty()) vsn(m.static_vsn);
    vsn(m.past_vsn);
    vsn(m.future_vsn);
    grn(m.static_encoder.cs);
    grn(m.static_encoder.ce);
    grn(m.static_encoder.cc);
    grn(m.static_encoder.ch);
    fn(m.gate_seq);
    grn(m.enrichment);
    fn(m.gate_attn);
    grn(m.position_ff);
    fn(m.gate_final);
}

}  // namespace

TFTModel build_model(const TFTConfig& config, std::uint64_t seed) {
    config.validate();
    TFTModel m;
    m.config = config;
    m.init_seed = seed;
    RngState rng = RngState(seed).stream(0);
    const int d = config.d_model;
    int site = 0;

    for (const auto& v : config.variables) m.embeddings.push_back(make_embedding(v, d, rng));

    const bool has_static = !config.static_ids.empty();
    if (has_static) {
        m.static_vsn = make_vsn(static_cast<int>(config.static_ids.size()), d,
                                /*with_context=*/false, config.ablation.fixed_variable_weights,
                                site, rng);
    }
    const bool temporal_ctx = has_static && !config.ablation.no_static_encoders;
    m.past_vsn = make_vsn(config.effective_past_vars(), d, temporal_ctx,
                          config.ablation.fixed_variable_weights, site, rng);
    m.future_vsn = make_vsn(config.effective_future_vars(), d, temporal_ctx,
                            config.ablation.fixed_variable_weights, site, rng);
    if (has_static) {
        m.static_encoder = make_static_encoder(d, site, rng);
    }
    m.lstm = make_lstm(d, d, rng);
    m.gate_seq = make_glu(d, d, rng);
    m.ln_seq_gain = Tensor::full({d}, 1.0, true);
    m.ln_seq_bias = Tensor::zeros({d}, true);
    m.enrichment = make_grn(d, d, d, temporal_ctx ? d : 0, site, rng);
    m.attention = make_attention(d, config.num_heads, rng);
    m.gate_attn = make_glu(d, d, rng);
    m.ln_attn_gain = Tensor::full({d}, 1.0, true);
    m.ln_attn_bias = Tensor::zeros({d}, true);
    m.position_ff = make_grn(d, d, d, 0, site, rng);
    m.gate_final = make_glu(d, d, rng);
    m.ln_final_gain = Tensor::full({d}, 1.0, true);
    m.ln_final_bias = Tensor::zeros({d}, true);
    for (int q = 0; q < config.num_quantiles(); ++q) {
        m.head.W.push_back(glorot_uniform(1, d, rng));
        m.head.b.push_back(Tensor::zeros({1}, true));
    }

    // Ablation-specific replacements draw from a separate stream so the base
    // initialization is unchanged when a flag is toggled.
    RngState extra = RngState(seed).stream(1);
    if (config.ablation.fixed_attention) {
        m.fixed_attention_logits = glorot_uniform(config.positions(), config.positions(), extra);
    }
    if (config.ablation.no_gating) {
        for_each_glu(m, [](GluParams& g) { g.gated = false; });
    }

    m.mask = make_causal_mask(config.positions());
    if (config.ablation.positional_encoding) {
        m.positional = Tensor::from_matrix(sinusoidal_encoding(config.positions(), d));
    }
    return m;
}

TFTModel apply_ablation(const TFTModel& model, const AblationFlags& flags) {
    TFTConfig cfg = model.config;
    cfg.ablation = flags;
    return build_model(cfg, model.init_seed);
}

Mat sinusoidal_encoding(int positions, int d_model) {
    Mat pe(positions, d_model);
    for (int pos = 0; pos < positions; ++pos) {
        for (int i = 0; i < d_model; ++i) {
            const double exponent = static_cast<double>(2 * (i / 2)) / d_model;
            const double angle = pos / std::pow(10000.0, exponent);
            pe(pos, i) = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    }
    return pe;
}

// ---- parameter registry --------------------------------------------------------------

namespace {

using NamedParams = std::vector<std::pair<std::string, Tensor>>;

void add(NamedParams& out, const std::string& name, const Tensor& t) {
    if (t.defined()) out.emplace_back(name, t);
}

void add_glu(NamedParams& out, const std::string& prefix, const GluParams& g) {
    add(out, prefix + ".W4", g.W4);
    add(out, prefix + ".b4", g.b4);
    add(out, prefix + ".W5", g.W5);
    add(out, prefix + ".b5", g.b5);
}

void add_grn(NamedParams& out, const std::string& prefix, const GrnParams& g) {
    add(out, prefix + ".W2", g.W2);
    add(out, prefix + ".b2", g.b2);
    add(out, prefix + ".W3", g.W3);
    add(out, prefix + ".W1", g.W1);
    add(out, prefix + ".b1", g.b1);
    add_glu(out, prefix + ".glu", g.glu);
    add(out, prefix + ".skip_W", g.skip_W);
    add(out, prefix + ".ln_gain", g.ln_gain);
    add(out, prefix + ".ln_bias", g.ln_bias);
}

void add_vsn(NamedParams& out, const std::string& prefix, const VsnParams& v) {
    if (v.fixed_weights) {
        add(out, prefix + ".fixed_logits", v.fixed_logits);
    } else {
        add_grn(out, prefix + ".weight_grn", v.weight_grn);
    }
    for (std::size_t j = 0; j < v.per_var.size(); ++j) {
        add_grn(out, prefix + ".var" + std::to_string(j), v.per_var[j]);
    }
}

void add_lstm_cell(NamedParams& out, const std::string& prefix, const LstmCellParams& c) {
    add(out, prefix + ".Wi", c.Wi);
    add(out, prefix + ".Ui", c.Ui);
    add(out, prefix + ".bi", c.bi);
    add(out, prefix + ".Wf", c.Wf);
    add(out, prefix + ".Uf", c.Uf);
    add(out, prefix + ".bf", c.bf);
    add(out, prefix + ".Wg", c.Wg);
    add(out, prefix + ".Ug", c.Ug);
    add(out, prefix + ".bg", c.bg);
    add(out, prefix + ".Wo", c.Wo);
    add(out, prefix + ".Uo", c.Uo);
    add(out, prefix + ".bo", c.bo);
}

}  // namespace

NamedParams TFTModel::parameters() const {
    NamedParams out;
    for (std::size_t id = 0; id < embeddings.size(); ++id) {
        const std::string prefix = "embed." + config.variables[id].name;
        add(out, prefix + ".table", embeddings[id].table);
        add(out, prefix + ".w", embeddings[id].w);
        add(out, prefix + ".b", embeddings[id].b);
    }
    if (!config.static_ids.empty()) {
        add_vsn(out, "static_vsn", static_vsn);
        add_grn(out, "static_encoder.cs", static_encoder.cs);
        add_grn(out, "static_encoder.ce", static_encoder.ce);
        add_grn(out, "static_encoder.cc", static_encoder.cc);
        add_grn(out, "static_encoder.ch", static_encoder.ch);
    }
    add_vsn(out, "past_vsn", past_vsn);
    add_vsn(out, "future_vsn", future_vsn);
    add_lstm_cell(out, "lstm.encoder", lstm.encoder);
    add_lstm_cell(out, "lstm.decoder", lstm.decoder);
    add_glu(out, "gate_seq", gate_seq);
    add(out, "ln_seq.gain", ln_seq_gain);
    add(out, "ln_seq.bias", ln_seq_bias);
    add_grn(out, "enrichment", enrichment);
    for (std::size_t h = 0; h < attention.Wq.size(); ++h) {
        add(out, "attention.head" + std::to_string(h) + ".Wq", attention.Wq[h]);
        add(out, "attention.head" + std::to_string(h) + ".Wk", attention.Wk[h]);
    }
    add(out, "attention.Wv", attention.Wv);
    add(out, "attention.Wh", attention.Wh);
    add(out, "attention.fixed_logits", fixed_attention_logits);
    add_glu(out, "gate_attn", gate_attn);
    add(out, "ln_attn.gain", ln_attn_gain);
    add(out, "ln_attn.bias", ln_attn_bias);
    add_grn(out, "position_ff", position_ff);
    add_glu(out, "gate_final", gate_final);
    add(out, "ln_final.gain", ln_final_gain);
    add(out, "ln_final.bias", ln_final_bias);
    for (std::size_t q = 0; q < head.W.size(); ++q) {
        add(out, "head.q" + std::to_string(q) + ".W", head.W[q]);
        add(out, "head.q" + std::to_string(q) + ".b", head.b[q]);
    }
    return out;
}

// ---- forward ---------------------------------------------------------------------------

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const NumericError& e) {
        throw NumericError(std::string("stage ") + name + ": " + e.what());
    }
}

Tensor embed_static(const VarEmbedding& e, double value) {
    if (e.categorical) {
        return gather_rows(e.table, {static_cast<int>(value)});
    }
    return rowwise_add(scale(e.w, value), e.b);
}

Tensor embed_column(const VarEmbedding& e, const Eigen::Ref<const Eigen::VectorXd>& column) {
    if (e.categorical) {
        std::vector<int> idx(column.size());
        for (int i = 0; i < column.size(); ++i) idx[i] = static_cast<int>(column[i]);
        return gather_rows(e.table, idx);
    }
    Tensor col = Tensor::from_matrix(column);
    return rowwise_add(matmul(col, e.w), e.b);
}

}  // namespace

ForwardTensors tft_forward(const TFTModel& model, const WindowedSample& sample,
                           const RngContext& rng, ForwardTrace* trace) {
    const TFTConfig& cfg = model.config;
    const int k1 = cfg.lookback + 1;
    const int tau = cfg.horizon;
    const int n = cfg.positions();
    if (sample.past.rows() != k1 || sample.past.cols() != static_cast<int>(cfg.past_ids.size()) ||
        sample.future.rows() != tau ||
        sample.future.cols() != static_cast<int>(cfg.future_ids.size()) ||
        sample.statics.cols() != static_cast<int>(cfg.static_ids.size())) {
        throw DimensionError("sample does not match the model schema: past " +
                             std::to_string(sample.past.rows()) + "x" +
                             std::to_string(sample.past.cols()) + ", future " +
                             std::to_string(sample.future.rows()) + "x" +
                             std::to_string(sample.future.cols()) + ", statics 1x" +
                             std::to_string(sample.statics.cols()));
    }
    const bool has_static = !cfg.static_ids.empty();
    const bool use_static_path = has_static && !cfg.ablation.no_static_encoders;

    ForwardTensors out;

    // Embeddings.
    std::vector<Tensor> static_emb;
    for (std::size_t j = 0; j < cfg.static_ids.size(); ++j) {
        static_emb.push_back(stage("embed_static", [&] {
            return embed_static(model.embeddings[cfg.static_ids[j]], sample.statics(0, j));
        }));
    }
    std::vector<Tensor> past_emb, future_emb;
    for (std::size_t j = 0; j < cfg.past_ids.size(); ++j) {
        past_emb.push_back(stage("embed_past", [&] {
            return embed_column(model.embeddings[cfg.past_ids[j]], sample.past.col(j));
        }));
    }
    for (std::size_t j = 0; j < cfg.future_ids.size(); ++j) {
        future_emb.push_back(stage("embed_future", [&] {
            return embed_column(model.embeddings[cfg.future_ids[j]], sample.future.col(j));
        }));
    }
    if (cfg.ablation.no_static_encoders) {
        for (const Tensor& e : static_emb) {
            past_emb.push_back(tile_rows(e, k1));
            future_emb.push_back(tile_rows(e, tau));
        }
    }

    // Static covariate path.
    Tensor cs, ce, cc, ch;
    if (use_static_path) {
        VsnResult static_sel = stage("static_vsn", [&] {
            return vsn_forward(model.static_vsn, static_emb, nullptr, rng);
        });
        out.vsn_static = static_sel.weights;
        StaticContexts ctx = stage("static_encoders", [&] {
            return static_encode(model.static_encoder, static_sel.combined, rng);
        });
        cs = ctx.cs;
        ce = ctx.ce;
        cc = ctx.cc;
        ch = ctx.ch;
        if (trace != nullptr) {
            trace->cs = cs.mat();
            trace->ce = ce.mat();
            trace->cc = cc.mat();
            trace->ch = ch.mat();
        }
    }

    // Temporal variable selection; the static context conditions the weights.
    VsnResult past_sel = stage("past_vsn", [&] {
        return vsn_forward(model.past_vsn, past_emb, cs.defined() ? &cs : nullptr, rng);
    });
    VsnResult future_sel = stage("future_vsn", [&] {
        return vsn_forward(model.future_vsn, future_emb, cs.defined() ? &cs : nullptr, rng);
    });
    out.vsn_past = past_sel.weights;
    out.vsn_future = future_sel.weights;

    // Local processing with its gated skip connection.
    Tensor xi_all = concat_rows({past_sel.combined, future_sel.combined});
    Tensor phi;
    if (cfg.ablation.positional_encoding) {
        phi = stage("positional_encoding", [&] { return add(xi_all, model.positional); });
    } else {
        Tensor zero = Tensor::zeros({1, cfg.d_model});
        phi = stage("lstm", [&] {
            return lstm_seq2seq(model.lstm, past_sel.combined, future_sel.combined,
                                cc.defined() ? cc : zero, ch.defined() ? ch : zero);
        });
    }
    Tensor phi_tilde = stage("seq_gate", [&] {
        return layer_norm(add(xi_all, glu_forward(model.gate_seq, phi)), model.ln_seq_gain,
                          model.ln_seq_bias, 1);
    });

    if (trace != nullptr) trace->phi_tilde = phi_tilde.mat();

    // Static enrichment.
    Tensor theta = stage("enrichment", [&] {
        return grn_forward(model.enrichment, phi_tilde, ce.defined() ? &ce : nullptr, rng);
    });

    // Temporal self-attention (or its trainable replacement).
    Tensor attn_out, attn_weights, pre_output;
    if (cfg.ablation.fixed_attention) {
        stage("fixed_attention", [&] {
            Tensor weights = softmax(add(model.fixed_attention_logits, model.mask.bias), 1);
            attn_weights = hadamard(weights, model.mask.keep);
            pre_output = matmul(attn_weights, matmul(theta, model.attention.Wv));
            attn_out = matmul(pre_output, model.attention.Wh);
            return 0;
        });
    } else {
        AttnResult r = stage("attention", [&] {
            return interpretable_mha(model.attention, theta, theta, theta, model.mask);
        });
        attn_out = r.out;
        attn_weights = r.attention;
        pre_output = r.pre_output;
    }
    out.attention = attn_weights;
    if (trace != nullptr) {
        trace->theta = theta.mat();
        trace->pre_output = pre_output.mat();
    }

    Tensor delta = stage("attn_gate", [&] {
        return layer_norm(add(theta, glu_forward(model.gate_attn, attn_out)), model.ln_attn_gain,
                          model.ln_attn_bias, 1);
    });
    Tensor psi = stage("position_ff", [&] {
        return grn_forward(model.position_ff, delta, nullptr, rng);
    });
    Tensor psi_tilde = stage("final_gate", [&] {
        return layer_norm(add(phi_tilde, glu_forward(model.gate_final, psi)), model.ln_final_gain,
                          model.ln_final_bias, 1);
    });
    if (trace != nullptr) {
        trace->psi = psi.mat();
        trace->psi_tilde = psi_tilde.mat();
    }

    // Quantile heads over the future positions only.
    Tensor future_features = slice_rows(psi_tilde, k1, n);
    std::vector<Tensor> per_quantile;
    for (int q = 0; q < cfg.num_quantiles(); ++q) {
        per_quantile.push_back(linear(future_features, model.head.W[q], model.head.b[q]));
    }
    out.yhat = stage("quantile_heads", [&] { return concat_cols(per_quantile); });
    return out;
}

ForecastOutput detach_output(const ForwardTensors& f) {
    ForecastOutput o;
    o.yhat = f.yhat.mat();
    o.attention = f.attention.mat();
    if (f.vsn_static.defined()) o.vsn_static = f.vsn_static.mat();
    o.vsn_past = f.vsn_past.mat();
    o.vsn_future = f.vsn_future.mat();
    return o;
}

}  // namespace tft
