#include "tft/layers.hpp"

#include <cmath>

namespace tft {

namespace {

int last_axis(const Tensor& t) { return t.rank() == 2 ? 1 : 0; }

Tensor zeros_param(int n) { return Tensor::zeros({n}, true); }

}  // namespace

// ---- GLU --------------------------------------------------------------------

GluParams make_glu(int d_out, int d_in, RngState& rng) {
    GluParams p;
    p.W4 = glorot_uniform(d_out, d_in, rng);
    p.b4 = zeros_param(d_out);
    p.W5 = glorot_uniform(d_out, d_in, rng);
    p.b5 = zeros_param(d_out);
    return p;
}

Tensor glu_forward(const GluParams& p, const Tensor& x) {
    if (!p.gated) return elu(linear(x, p.W5, p.b5));
    return hadamard(sigmoid(linear(x, p.W4, p.b4)), linear(x, p.W5, p.b5));
}

// ---- GRN --------------------------------------------------------------------

GrnParams make_grn(int d_in, int d_hidden, int d_out, int d_ctx, int& site_counter,
                   RngState& rng) {
    GrnParams p;
    p.site = site_counter++;
    p.W2 = glorot_uniform(d_hidden, d_in, rng);
    p.b2 = zeros_param(d_hidden);
    if (d_ctx > 0) p.W3 = glorot_uniform(d_hidden, d_ctx, rng);
    p.W1 = glorot_uniform(d_hidden, d_hidden, rng);
    p.b1 = zeros_param(d_hidden);
    p.glu = make_glu(d_out, d_hidden, rng);
    if (d_in != d_out) p.skip_W = glorot_uniform(d_out, d_in, rng);
    p.ln_gain = Tensor::full({d_out}, 1.0, true);
    p.ln_bias = zeros_param(d_out);
    return p;
}

Tensor grn_forward(const GrnParams& p, const Tensor& a, const Tensor* context,
                   const RngContext& rng) {
    if (context != nullptr && !p.W3.defined()) {
        throw ContractError("grn_forward: context supplied to a context-free GRN");
    }
    Tensor pre = linear(a, p.W2, p.b2);
    if (context != nullptr) {
        pre = rowwise_add(pre, linear(*context, p.W3));
    }
    Tensor eta2 = elu(pre);
    Tensor eta1 = linear(eta2, p.W1, p.b1);
    RngState stream = rng.stream_for(p.site);
    Tensor gated = glu_forward(p.glu, dropout(eta1, rng.dropout_rate, stream, rng.training));
    Tensor skip = p.skip_W.defined() ? linear(a, p.skip_W) : a;
    return layer_norm(add(skip, gated), p.ln_gain, p.ln_bias, last_axis(skip));
}

// ---- VSN --------------------------------------------------------------------

VsnParams make_vsn(int num_vars, int d_model, bool with_context, bool fixed_weights,
                   int& site_counter, RngState& rng) {
    if (num_vars < 1) {
        throw ConfigError("variable selection network needs at least one variable");
    }
    VsnParams p;
    p.fixed_weights = fixed_weights;
    if (fixed_weights) {
        p.fixed_logits = Tensor::zeros({1, num_vars}, true);
    } else {
        p.weight_grn = make_grn(num_vars * d_model, d_model, num_vars,
                                with_context ? d_model : 0, site_counter, rng);
    }
    for (int j = 0; j < num_vars; ++j) {
        p.per_var.push_back(make_grn(d_model, d_model, d_model, 0, site_counter, rng));
    }
    return p;
}

VsnResult vsn_forward(const VsnParams& p, const std::vector<Tensor>& xi,
                      const Tensor* context, const RngContext& rng) {
    const int m = static_cast<int>(p.per_var.size());
    if (static_cast<int>(xi.size()) != m) {
        throw ConfigError("vsn_forward: got " + std::to_string(xi.size()) +
                          " inputs for " + std::to_string(m) + " variables");
    }
    const int n = xi[0].rows();

    Tensor weights;
    if (p.fixed_weights) {
        weights = tile_rows(softmax(p.fixed_logits, 1), n);
    } else {
        Tensor flat = m == 1 ? xi[0] : concat_cols(xi);
        weights = softmax(grn_forward(p.weight_grn, flat, context, rng), 1);
    }

    Tensor combined;
    for (int j = 0; j < m; ++j) {
        Tensor processed = grn_forward(p.per_var[j], xi[j], nullptr, rng);
        Tensor weighted = rowwise_scale(processed, slice_cols(weights, j, j + 1));
        combined = j == 0 ? weighted : add(combined, weighted);
    }
    return {combined, weights};
}

// ---- static covariate encoder --------------------------------------------------

StaticEncoderParams make_static_encoder(int d_model, int& site_counter, RngState& rng) {
    StaticEncoderParams p;
    p.cs = make_grn(d_model, d_model, d_model, 0, site_counter, rng);
    p.ce = make_grn(d_model, d_model, d_model, 0, site_counter, rng);
    p.cc = make_grn(d_model, d_model, d_model, 0, site_counter, rng);
    p.ch = make_grn(d_model, d_model, d_model, 0, site_counter, rng);
    return p;
}

StaticContexts static_encode(const StaticEncoderParams& p, const Tensor& zeta,
                             const RngContext& rng) {
    return {grn_forward(p.cs, zeta, nullptr, rng), grn_forward(p.ce, zeta, nullptr, rng),
            grn_forward(p.cc, zeta, nullptr, rng), grn_forward(p.ch, zeta, nullptr, rng)};
}

// ---- LSTM -------------------------------------------------------------------

namespace {

LstmCellParams make_lstm_cell(int d_in, int d, RngState& rng) {
    LstmCellParams c;
    c.Wi = glorot_uniform(d, d_in, rng);
    c.Ui = glorot_uniform(d, d, rng);
    c.bi = Tensor::zeros({d}, true);
    c.Wf = glorot_uniform(d, d_in, rng);
    c.Uf = glorot_uniform(d, d, rng);
    c.bf = Tensor::full({d}, 1.0, true);
    c.Wg = glorot_uniform(d, d_in, rng);
    c.Ug = glorot_uniform(d, d, rng);
    c.bg = Tensor::zeros({d}, true);
    c.Wo = glorot_uniform(d, d_in, rng);
    c.Uo = glorot_uniform(d, d, rng);
    c.bo = Tensor::zeros({d}, true);
    return c;
}

// Runs one direction; appends the hidden state of every step to `outputs`.
void run_cell(const LstmCellParams& p, const Tensor& inputs, Tensor& h, Tensor& c,
              std::vector<Tensor>& outputs) {
    const int steps = inputs.rows();
    // Input projections for the whole sequence, one matmul per gate.
    Tensor pi = linear(inputs, p.Wi, p.bi);
    Tensor pf = linear(inputs, p.Wf, p.bf);
    Tensor pg = linear(inputs, p.Wg, p.bg);
    Tensor po = linear(inputs, p.Wo, p.bo);
    for (int t = 0; t < steps; ++t) {
        Tensor i = sigmoid(add(slice_rows(pi, t, t + 1), matmul_nt(h, p.Ui)));
        Tensor f = sigmoid(add(slice_rows(pf, t, t + 1), matmul_nt(h, p.Uf)));
        Tensor g = tanh(add(slice_rows(pg, t, t + 1), matmul_nt(h, p.Ug)));
        Tensor o = sigmoid(add(slice_rows(po, t, t + 1), matmul_nt(h, p.Uo)));
        c = add(hadamard(f, c), hadamard(i, g));
        h = hadamard(o, tanh(c));
        outputs.push_back(h);
    }
}

}  // namespace

LstmParams make_lstm(int d_in, int d_model, RngState& rng) {
    return {make_lstm_cell(d_in, d_model, rng), make_lstm_cell(d_in, d_model, rng)};
}

Tensor lstm_seq2seq(const LstmParams& p, const Tensor& past, const Tensor& future,
                    const Tensor& c_c, const Tensor& c_h) {
    if (!past.defined() || past.rows() < 1) {
        throw ContractError("lstm_seq2seq: past window must not be empty");
    }
    Tensor h = c_h;
    Tensor c = c_c;
    std::vector<Tensor> outputs;
    run_cell(p.encoder, past, h, c, outputs);
    if (future.defined() && future.rows() > 0) {
        run_cell(p.decoder, future, h, c, outputs);
    }
    return concat_rows(outputs);
}

// ---- interpretable multi-head attention ----------------------------------------

CausalMask make_causal_mask(int n) {
    Mat bias = Mat::Zero(n, n);
    Mat keep = Mat::Ones(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bias(i, j) = kMaskLogit;
            keep(i, j) = 0.0;
        }
    }
    return {Tensor::from_matrix(bias), Tensor::from_matrix(keep)};
}

InterpAttnParams make_attention(int d_model, int num_heads, RngState& rng) {
    if (num_heads < 1 || d_model % num_heads != 0) {
        throw ConfigError("attention: d_model " + std::to_string(d_model) +
                          " is not divisible by num_heads " + std::to_string(num_heads));
    }
    const int d_attn = d_model / num_heads;
    InterpAttnParams p;
    for (int h = 0; h < num_heads; ++h) {
        p.Wq.push_back(glorot_uniform(d_model, d_attn, rng));
        p.Wk.push_back(glorot_uniform(d_model, d_attn, rng));
    }
    p.Wv = glorot_uniform(d_model, d_attn, rng);
    p.Wh = glorot_uniform(d_attn, d_model, rng);
    return p;
}

AttnResult interpretable_mha(const InterpAttnParams& p, const Tensor& Q, const Tensor& K,
                             const Tensor& V, const CausalMask& mask) {
    const int num_heads = static_cast<int>(p.Wq.size());
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(p.Wq[0].cols()));
    Tensor head_sum;
    for (int h = 0; h < num_heads; ++h) {
        Tensor logits = scale(matmul_nt(matmul(Q, p.Wq[h]), matmul(K, p.Wk[h])), inv_sqrt);
        Tensor weights = softmax(add(logits, mask.bias), 1);
        head_sum = h == 0 ? weights : add(head_sum, weights);
    }
    // Hard-zero the masked entries so the causal property holds exactly.
    Tensor attention = hadamard(scale(head_sum, 1.0 / num_heads), mask.keep);
    Tensor pre = matmul(attention, matmul(V, p.Wv));
    return {matmul(pre, p.Wh), attention, pre};
}

}  // namespace tft
