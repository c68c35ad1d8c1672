#pragma once

#include <vector>

#include "tft/tensor.hpp"

namespace tft {

// Shared forward-pass context: dropout configuration plus the base RNG from
// which every dropout site derives its own fixed stream.
struct RngContext {
    RngState base;
    double dropout_rate = 0.0;
    bool training = false;

    RngState stream_for(int site) const { return base.stream(static_cast<std::uint64_t>(site)); }
};

// ---- gated linear unit ------------------------------------------------------

struct GluParams {
    Tensor W4, b4;  // gate path  [d_out x d_in], [d_out]
    Tensor W5, b5;  // value path [d_out x d_in], [d_out]
    bool gated = true;  // false replaces the unit with linear + ELU (gating ablation)
};

GluParams make_glu(int d_out, int d_in, RngState& rng);
Tensor glu_forward(const GluParams& p, const Tensor& x);

// ---- gated residual network -------------------------------------------------

struct GrnParams {
    int site = 0;             // dropout stream id, unique per GRN instance
    Tensor W2, b2;            // primary projection   [d_hidden x d_in]
    Tensor W3;                // context projection   [d_hidden x d_ctx], no bias;
                              // undefined for context-free GRNs
    Tensor W1, b1;            // hidden projection    [d_hidden x d_hidden]
    GluParams glu;            // output gate          [d_out x d_hidden]
    Tensor skip_W;            // residual projection  [d_out x d_in] iff d_in != d_out
    Tensor ln_gain, ln_bias;  // [d_out]
};

GrnParams make_grn(int d_in, int d_hidden, int d_out, int d_ctx, int& site_counter,
                   RngState& rng);
// a: [n x d_in]; context: null or a single row [1 x d_ctx] broadcast over rows.
Tensor grn_forward(const GrnParams& p, const Tensor& a, const Tensor* context,
                   const RngContext& rng);

// ---- variable selection network ----------------------------------------------

struct VsnParams {
    GrnParams weight_grn;            // flattened inputs -> m selection logits
    std::vector<GrnParams> per_var;  // per-variable d_model -> d_model GRNs,
                                     // shared across all time steps
    Tensor fixed_logits;             // [1 x m]; replaces the weight GRN when fixed
    bool fixed_weights = false;
};

struct VsnResult {
    Tensor combined;  // [n x d_model]
    Tensor weights;   // [n x m], rows on the probability simplex
};

VsnParams make_vsn(int num_vars, int d_model, bool with_context, bool fixed_weights,
                   int& site_counter, RngState& rng);
VsnResult vsn_forward(const VsnParams& p, const std::vector<Tensor>& xi,
                      const Tensor* context, const RngContext& rng);

// ---- static covariate encoder --------------------------------------------------

struct StaticEncoderParams {
    GrnParams cs, ce, cc, ch;  // four independent encoders, no weight sharing
};

struct StaticContexts {
    Tensor cs, ce, cc, ch;  // [1 x d_model] each
};

StaticEncoderParams make_static_encoder(int d_model, int& site_counter, RngState& rng);
StaticContexts static_encode(const StaticEncoderParams& p, const Tensor& zeta,
                             const RngContext& rng);

// ---- LSTM encoder/decoder pair -------------------------------------------------

struct LstmCellParams {
    Tensor Wi, Ui, bi;  // input gate      W: [d x d_in], U: [d x d], b: [d]
    Tensor Wf, Uf, bf;  // forget gate (bias initialized to 1)
    Tensor Wg, Ug, bg;  // candidate
    Tensor Wo, Uo, bo;  // output gate
};

struct LstmParams {
    LstmCellParams encoder;
    LstmCellParams decoder;
};

LstmParams make_lstm(int d_in, int d_model, RngState& rng);
// Encoder starts from cell state c_c / hidden state c_h and consumes `past`
// left to right; the decoder continues from the encoder's final state over
// `future` (which may be undefined or empty). Returns all hidden states,
// one row per position.
Tensor lstm_seq2seq(const LstmParams& p, const Tensor& past, const Tensor& future,
                    const Tensor& c_c, const Tensor& c_h);

// ---- interpretable multi-head attention ----------------------------------------

struct InterpAttnParams {
    std::vector<Tensor> Wq, Wk;  // per head [d_model x d_attn]
    Tensor Wv;                   // shared value projection [d_model x d_v]
    Tensor Wh;                   // output map [d_v x d_model]
};

// Constant decoder mask: position i may attend to positions j <= i.
struct CausalMask {
    Tensor bias;  // 0 on allowed entries, -1e9 above the diagonal
    Tensor keep;  // 1 on allowed entries, 0 above the diagonal
};

CausalMask make_causal_mask(int n);
InterpAttnParams make_attention(int d_model, int num_heads, RngState& rng);

struct AttnResult {
    Tensor out;         // [N x d_model]
    Tensor attention;   // head-averaged weights [N x N]; masked entries exactly 0
    Tensor pre_output;  // attention * V * Wv, before the output map
};

AttnResult interpretable_mha(const InterpAttnParams& p, const Tensor& Q, const Tensor& K,
                             const Tensor& V, const CausalMask& mask);

constexpr double kMaskLogit = -1e9;

}  // namespace tft
