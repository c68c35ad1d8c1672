#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tft/data.hpp"
#include "tft/layers.hpp"

namespace tft {

struct VariableSpec {
    std::string name;
    bool categorical = false;
    int cardinality = 0;
};

struct AblationFlags {
    bool no_gating = false;
    bool no_static_encoders = false;
    bool fixed_variable_weights = false;
    bool fixed_attention = false;
    bool positional_encoding = false;

    bool any() const {
        return no_gating || no_static_encoders || fixed_variable_weights || fixed_attention ||
               positional_encoding;
    }
    std::string to_string() const;
    static AblationFlags parse(const std::string& spec);  // "none" or comma list
    static const std::vector<std::string>& names();
    bool& by_name(const std::string& name);
};

struct TFTConfig {
    int lookback = 0;
    int horizon = 0;
    int d_model = 16;
    int num_heads = 1;
    double dropout = 0.1;
    std::vector<double> quantiles{0.1, 0.5, 0.9};
    std::vector<VariableSpec> variables;  // unique registry; groups index into it
    std::vector<int> static_ids, past_ids, future_ids;
    AblationFlags ablation;

    int positions() const { return lookback + 1 + horizon; }
    int num_quantiles() const { return static_cast<int>(quantiles.size()); }
    int quantile_index(double q) const;  // -1 when absent
    // Effective per-VSN variable counts; static inputs join the temporal sets
    // under the no_static_encoders ablation.
    int effective_past_vars() const;
    int effective_future_vars() const;
    std::vector<std::string> group_names(const std::vector<int>& ids) const;
    std::vector<std::string> past_weight_names() const;
    std::vector<std::string> future_weight_names() const;
    void validate() const;

    static TFTConfig from_schema(const DatasetSchema& schema, int d_model, int num_heads,
                                 double dropout);
};

void config_to_text(const TFTConfig& config, ConfigText& out);  // [model] + [variables]
TFTConfig config_from_text(const ConfigText& cfg);

// ---- model ------------------------------------------------------------------

struct VarEmbedding {
    bool categorical = false;
    Tensor table;  // [cardinality x d_model]
    Tensor w;      // [1 x d_model]   continuous: value * w + b
    Tensor b;      // [d_model]
};

struct QuantileHead {
    std::vector<Tensor> W;  // per quantile [1 x d_model]
    std::vector<Tensor> b;  // per quantile [1]
};

struct TFTModel {
    TFTConfig config;
    std::uint64_t init_seed = 0;

    std::vector<VarEmbedding> embeddings;  // one per config variable
    VsnParams static_vsn;
    VsnParams past_vsn, future_vsn;
    StaticEncoderParams static_encoder;
    LstmParams lstm;
    GluParams gate_seq;  // gated skip over the sequence-to-sequence layer
    Tensor ln_seq_gain, ln_seq_bias;
    GrnParams enrichment;  // static enrichment, context c_e
    InterpAttnParams attention;
    Tensor fixed_attention_logits;  // [N x N], fixed_attention ablation only
    GluParams gate_attn;
    Tensor ln_attn_gain, ln_attn_bias;
    GrnParams position_ff;
    GluParams gate_final;
    Tensor ln_final_gain, ln_final_bias;
    QuantileHead head;

    CausalMask mask;            // constants
    Tensor positional;          // [N x d_model] constant, positional_encoding ablation

    std::vector<std::pair<std::string, Tensor>> parameters() const;
};

TFTModel build_model(const TFTConfig& config, std::uint64_t seed);
// Fresh instance with the given flags, initialized from the model's seed.
TFTModel apply_ablation(const TFTModel& model, const AblationFlags& flags);

// ---- forward ------------------------------------------------------------------

struct ForwardTensors {
    Tensor yhat;        // [horizon x |Q|]
    Tensor attention;   // [N x N]
    Tensor vsn_static;  // [1 x m_s]; undefined under no_static_encoders
    Tensor vsn_past;    // [(k+1) x m_past_eff]
    Tensor vsn_future;  // [horizon x m_future_eff]
};

struct ForecastOutput {
    Mat yhat;
    Mat attention;
    Mat vsn_static;  // 0x0 under no_static_encoders
    Mat vsn_past;
    Mat vsn_future;
};

// Hooks for structural checks: enriched features, the attention output before
// the final linear map, the static contexts and the decoder skip path.
struct ForwardTrace {
    Mat theta;
    Mat pre_output;
    Mat cs, ce, cc, ch;
    Mat phi_tilde;
    Mat psi;
    Mat psi_tilde;
};

ForwardTensors tft_forward(const TFTModel& model, const WindowedSample& sample,
                           const RngContext& rng, ForwardTrace* trace = nullptr);
ForecastOutput detach_output(const ForwardTensors& f);

Mat sinusoidal_encoding(int positions, int d_model);

// ---- checkpoint -----------------------------------------------------------------

struct Checkpoint {
    TFTModel model;
    DatasetSchema schema;
    Normalizer normalizer;
};

void save_checkpoint(const std::string& path, const TFTModel& model, const DatasetSchema& schema,
                     const Normalizer& normalizer);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace tft
