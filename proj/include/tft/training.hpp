#pragma once

#include <cstdint>
#include <vector>

#include "tft/model.hpp"

namespace tft {

struct TrainConfig {
    double learning_rate = 0.001;
    int minibatch_size = 64;
    double max_grad_norm = 100.0;
    int max_epochs = 10;
    int patience = 5;
    std::uint64_t seed = 42;
    int samples_per_epoch = 0;  // 0 = every training window each epoch
    int max_val_samples = 0;    // 0 = full validation set

    void validate() const;
};

// Pinball loss q*(y-yhat)_+ + (1-q)*(yhat-y)_+.
double pinball(double y, double yhat, double q);

// Per-sample loss: sum over quantiles, mean over horizon steps. The tape
// version drives training; the plain version is the evaluation path.
Tensor quantile_loss(const Tensor& yhat, const Eigen::VectorXd& actuals,
                     const std::vector<double>& quantiles);
double quantile_loss_value(const Mat& yhat, const Eigen::VectorXd& actuals,
                           const std::vector<double>& quantiles);

// Normalized quantile loss over a forecast set: 2*sum(QL)/sum|y|.
double q_risk(const std::vector<Eigen::VectorXd>& actuals,
              const std::vector<Eigen::VectorXd>& forecasts, double q);

// Scales every gradient by max_norm/g when the global L2 norm g exceeds
// max_norm. Returns the pre-clip norm.
double clip_grad_norm(const std::vector<Tensor>& params, double max_norm);

class Adam {
public:
    explicit Adam(std::vector<Tensor> params, double lr, double beta1 = 0.9,
                  double beta2 = 0.999, double eps = 1e-8);
    // Consumes and zeroes the accumulated gradients.
    void step();
    long steps_taken() const { return steps_; }

private:
    std::vector<Tensor> params_;
    std::vector<Arr> m_, v_;
    double lr_, beta1_, beta2_, eps_;
    long steps_ = 0;
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double seconds = 0.0;
};

struct FitResult {
    std::vector<EpochStats> history;
    double best_val_loss = 0.0;
    int best_epoch = -1;
};

// Minibatch Adam on the quantile loss with gradient-norm clipping; keeps the
// best-validation weights and stops once `patience` epochs pass without
// improvement.
FitResult fit(TFTModel& model, const std::vector<WindowedSample>& train,
              const std::vector<WindowedSample>& val, const TrainConfig& cfg);

double validation_loss(const TFTModel& model, const std::vector<WindowedSample>& samples,
                       int max_samples = 0);

// ---- random search ---------------------------------------------------------------

struct SearchSpace {
    std::vector<int> state_sizes{10, 20, 40, 80, 160, 240, 320};
    std::vector<double> dropout_rates{0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 0.9};
    std::vector<int> minibatch_sizes{64, 128, 256};
    std::vector<double> learning_rates{0.0001, 0.001, 0.01};
    std::vector<double> max_grad_norms{0.01, 1.0, 100.0};
    std::vector<int> head_counts{1, 4};
};

struct Trial {
    int index = 0;
    int d_model = 0;
    double dropout = 0.0;
    int minibatch_size = 0;
    double learning_rate = 0.0;
    double max_grad_norm = 0.0;
    int num_heads = 0;
    double val_loss = 0.0;
    FitResult result;
};

// Draws `budget` configurations uniformly from the grid (redrawing whole
// tuples whose head count does not divide the state size), trains each and
// returns the trials ranked by validation loss, best first.
std::vector<Trial> random_search(const SearchSpace& space, int budget,
                                 const DatasetSchema& schema, const DataSplit& data,
                                 const TrainConfig& base, std::uint64_t seed);

}  // namespace tft
