#include "tft/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace tft {

void TrainConfig::validate() const {
    if (learning_rate < 0.0) throw ConfigError("learning rate must be >= 0");
    if (minibatch_size < 1) throw ConfigError("minibatch size must be >= 1");
    if (max_grad_norm <= 0.0) throw ConfigError("max gradient norm must be positive");
    if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
    if (patience < 1) throw ConfigError("patience must be >= 1");
    if (samples_per_epoch < 0 || max_val_samples < 0) {
        throw ConfigError("sample caps must be non-negative");
    }
}

double pinball(double y, double yhat, double q) {
    const double diff = y - yhat;
    return diff >= 0.0 ? q * diff : (q - 1.0) * diff;
}

namespace {

void check_quantiles(const std::vector<double>& quantiles) {
    if (quantiles.empty()) throw ConfigError("quantile set must not be empty");
    for (double q : quantiles) {
        if (q <= 0.0 || q >= 1.0) {
            throw ConfigError("quantile " + format_double(q) + " lies outside (0, 1)");
        }
    }
}

}  // namespace

Tensor quantile_loss(const Tensor& yhat, const Eigen::VectorXd& actuals,
                     const std::vector<double>& quantiles) {
    check_quantiles(quantiles);
    const int tau = static_cast<int>(actuals.size());
    const int nq = static_cast<int>(quantiles.size());
    if (yhat.rows() != tau || yhat.cols() != nq) {
        throw DimensionError("quantile_loss: forecasts " + shape_str(yhat.shape()) +
                             " do not match " + std::to_string(tau) + " actuals x " +
                             std::to_string(nq) + " quantiles");
    }
    Mat y_tiled(tau, nq), qmat(tau, nq), one_minus(tau, nq);
    for (int r = 0; r < tau; ++r) {
        for (int c = 0; c < nq; ++c) {
            y_tiled(r, c) = actuals[r];
            qmat(r, c) = quantiles[c];
            one_minus(r, c) = 1.0 - quantiles[c];
        }
    }
    Tensor diff = sub(Tensor::from_matrix(y_tiled), yhat);
    Tensor under = hadamard(Tensor::from_matrix(qmat), relu(diff));
    Tensor over = hadamard(Tensor::from_matrix(one_minus), relu(scale(diff, -1.0)));
    return scale(sum(add(under, over)), 1.0 / tau);
}

double quantile_loss_value(const Mat& yhat, const Eigen::VectorXd& actuals,
                           const std::vector<double>& quantiles) {
    check_quantiles(quantiles);
    double total = 0.0;
    for (int r = 0; r < yhat.rows(); ++r) {
        for (int c = 0; c < yhat.cols(); ++c) {
            total += pinball(actuals[r], yhat(r, c), quantiles[c]);
        }
    }
    return total / yhat.rows();
}

double q_risk(const std::vector<Eigen::VectorXd>& actuals,
              const std::vector<Eigen::VectorXd>& forecasts, double q) {
    if (q <= 0.0 || q >= 1.0) throw ConfigError("q-risk quantile must lie in (0, 1)");
    if (actuals.size() != forecasts.size()) {
        throw DimensionError("q_risk: " + std::to_string(actuals.size()) + " actual series vs " +
                             std::to_string(forecasts.size()) + " forecast series");
    }
    double loss = 0.0, denom = 0.0;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        if (actuals[i].size() != forecasts[i].size()) {
            throw DimensionError("q_risk: horizon mismatch in series " + std::to_string(i));
        }
        for (int t = 0; t < actuals[i].size(); ++t) {
            loss += pinball(actuals[i][t], forecasts[i][t], q);
            denom += std::abs(actuals[i][t]);
        }
    }
    if (denom == 0.0) throw DataError("q-risk is undefined: the actuals sum to zero magnitude");
    return 2.0 * loss / denom;
}

double clip_grad_norm(const std::vector<Tensor>& params, double max_norm) {
    if (max_norm <= 0.0) throw ConfigError("max gradient norm must be positive");
    double sq = 0.0;
    for (const Tensor& p : params) {
        if (p.has_grad()) sq += p.grad().square().sum();
    }
    const double norm = std::sqrt(sq);
    if (norm > max_norm) {
        const double scale_by = max_norm / norm;
        for (const Tensor& p : params) {
            if (p.has_grad()) p.accumulate_grad(Arr((scale_by - 1.0) * p.grad()));
        }
    }
    return norm;
}

// ---- Adam --------------------------------------------------------------------

Adam::Adam(std::vector<Tensor> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    for (const Tensor& p : params_) {
        m_.push_back(Arr::Zero(p.size()));
        v_.push_back(Arr::Zero(p.size()));
    }
}

void Adam::step() {
    ++steps_;
    const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
    const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
        Tensor& p = params_[i];
        const Arr g = p.has_grad() ? p.grad() : Arr(Arr::Zero(p.size()));
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.square();
        const Arr m_hat = m_[i] / bc1;
        const Arr v_hat = v_[i] / bc2;
        p.values_mut() -= lr_ * m_hat / (v_hat.sqrt() + eps_);
        p.zero_grad();
    }
}

// ---- fit ----------------------------------------------------------------------

double validation_loss(const TFTModel& model, const std::vector<WindowedSample>& samples,
                       int max_samples) {
    if (samples.empty()) throw ConfigError("validation set is empty");
    std::size_t step = 1;
    if (max_samples > 0 && samples.size() > static_cast<std::size_t>(max_samples)) {
        step = (samples.size() + max_samples - 1) / max_samples;
    }
    RngContext eval_ctx{RngState(0), 0.0, false};
    double total = 0.0;
    long count = 0;
    for (std::size_t i = 0; i < samples.size(); i += step) {
        ForwardTensors f = tft_forward(model, samples[i], eval_ctx);
        total += quantile_loss_value(f.yhat.mat(), samples[i].targets, model.config.quantiles);
        ++count;
    }
    return total / count;
}

FitResult fit(TFTModel& model, const std::vector<WindowedSample>& train,
              const std::vector<WindowedSample>& val, const TrainConfig& cfg) {
    cfg.validate();
    if (train.empty()) throw ConfigError("training set is empty");
    if (val.empty()) throw ConfigError("validation set is empty");

    std::vector<Tensor> params;
    for (auto& [name, t] : model.parameters()) params.push_back(t);
    for (auto& p : params) p.zero_grad();
    Adam optimizer(params, cfg.learning_rate);

    RngState shuffle_rng = RngState(cfg.seed).stream(101);
    RngState dropout_root = RngState(cfg.seed).stream(202);

    FitResult result;
    result.best_val_loss = std::numeric_limits<double>::infinity();
    std::vector<Arr> best_weights;

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        // Uniform sample without replacement, reshuffled every epoch.
        RngState erng = shuffle_rng.stream(static_cast<std::uint64_t>(epoch));
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[erng.next_below(i)]);
        }
        std::size_t take = order.size();
        if (cfg.samples_per_epoch > 0) {
            take = std::min<std::size_t>(take, static_cast<std::size_t>(cfg.samples_per_epoch));
        }

        RngState epoch_dropout = dropout_root.stream(static_cast<std::uint64_t>(epoch));
        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < take; begin += cfg.minibatch_size) {
            const std::size_t end = std::min(take, begin + cfg.minibatch_size);
            ComputeGraph graph;
            Tensor batch_total;
            for (std::size_t i = begin; i < end; ++i) {
                const WindowedSample& sample = train[order[i]];
                RngContext ctx{epoch_dropout.stream(static_cast<std::uint64_t>(i)),
                               model.config.dropout, true};
                ForwardTensors f = tft_forward(model, sample, ctx);
                Tensor loss = quantile_loss(f.yhat, sample.targets, model.config.quantiles);
                batch_total = batch_total.defined() ? add(batch_total, loss) : loss;
            }
            Tensor batch_loss = scale(batch_total, 1.0 / static_cast<double>(end - begin));
            if (!std::isfinite(batch_loss.value(0))) {
                throw NumericError("training loss became non-finite in epoch " +
                                   std::to_string(epoch));
            }
            epoch_loss += batch_loss.value(0) * static_cast<double>(end - begin);
            graph.backward(batch_loss);
            clip_grad_norm(params, cfg.max_grad_norm);
            optimizer.step();
        }
        epoch_loss /= static_cast<double>(take);

        const double val_loss = validation_loss(model, val, cfg.max_val_samples);
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.history.push_back({epoch, epoch_loss, val_loss, seconds});

        if (val_loss < result.best_val_loss) {
            result.best_val_loss = val_loss;
            result.best_epoch = epoch;
            best_weights.clear();
            for (const Tensor& p : params) best_weights.push_back(p.array());
        } else if (epoch - result.best_epoch >= cfg.patience) {
            break;
        }
    }
    for (std::size_t i = 0; i < params.size(); ++i) params[i].values_mut() = best_weights[i];
    return result;
}

// ---- random search ---------------------------------------------------------------

std::vector<Trial> random_search(const SearchSpace& space, int budget,
                                 const DatasetSchema& schema, const DataSplit& data,
                                 const TrainConfig& base, std::uint64_t seed) {
    if (budget < 1) throw ConfigError("random search budget must be >= 1");
    RngState draw_rng = RngState(seed).stream(7);
    std::vector<Trial> trials;
    for (int i = 0; i < budget; ++i) {
        Trial t;
        t.index = i;
        // Redraw the whole tuple until the head count divides the state size.
        do {
            t.d_model = space.state_sizes[draw_rng.next_below(space.state_sizes.size())];
            t.dropout = space.dropout_rates[draw_rng.next_below(space.dropout_rates.size())];
            t.minibatch_size =
                space.minibatch_sizes[draw_rng.next_below(space.minibatch_sizes.size())];
            t.learning_rate =
                space.learning_rates[draw_rng.next_below(space.learning_rates.size())];
            t.max_grad_norm =
                space.max_grad_norms[draw_rng.next_below(space.max_grad_norms.size())];
            t.num_heads = space.head_counts[draw_rng.next_below(space.head_counts.size())];
        } while (t.d_model % t.num_heads != 0);

        TFTConfig config = TFTConfig::from_schema(schema, t.d_model, t.num_heads, t.dropout);
        TFTModel model = build_model(config, RngState(seed).stream(1000 + i).next_u64());
        TrainConfig train_cfg = base;
        train_cfg.learning_rate = t.learning_rate;
        train_cfg.minibatch_size = t.minibatch_size;
        train_cfg.max_grad_norm = t.max_grad_norm;
        train_cfg.seed = RngState(seed).stream(2000 + i).next_u64();
        t.result = fit(model, data.train, data.val, train_cfg);
        t.val_loss = t.result.best_val_loss;
        trials.push_back(std::move(t));
    }
    std::stable_sort(trials.begin(), trials.end(),
                     [](const Trial& a, const Trial& b) { return a.val_loss < b.val_loss; });
    return trials;
}

}  // namespace tft
