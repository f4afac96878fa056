#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "bilat/dataset.hpp"

namespace bilat {

// One-step-ahead predictor of the master responses. The nine slave responses
// are reshaped into 3 channels (angle, velocity, torque) over the 3 joints,
// convolved (width 3, zero padding), batch-normalized and rectified, then the
// flattened features plus the frequency command feed a single LSTM layer and
// a linear head producing the nine master values 20 ms ahead.
struct ModelParams {
    int conv_channels = 16;
    int hidden = 64;

    // conv: [out_channel][in_channel][tap], flattened; bias per out channel
    Eigen::VectorXd conv_w;  // C*3*3
    Eigen::VectorXd conv_b;  // C

    Eigen::VectorXd bn_gamma, bn_beta;      // C
    Eigen::VectorXd bn_rmean, bn_rvar;      // running statistics, C

    Eigen::MatrixXd lstm_wx;  // 4H x (3C+1)
    Eigen::MatrixXd lstm_wh;  // 4H x H
    Eigen::VectorXd lstm_b;   // 4H

    Eigen::MatrixXd head_w;  // 9 x H
    Eigen::VectorXd head_b;  // 9

    Normalizer norm;

    int feat() const { return 3 * conv_channels + 1; }

    template <typename F>
    void for_each_tensor(F&& f) {
        f("conv_w", conv_w);
        f("conv_b", conv_b);
        f("bn_gamma", bn_gamma);
        f("bn_beta", bn_beta);
        f("lstm_wx", lstm_wx);
        f("lstm_wh", lstm_wh);
        f("lstm_b", lstm_b);
        f("head_w", head_w);
        f("head_b", head_b);
    }
};

struct HiddenState {
    Eigen::VectorXd h, c;
    HiddenState() = default;
    explicit HiddenState(int hidden)
        : h(Eigen::VectorXd::Zero(hidden)), c(Eigen::VectorXd::Zero(hidden)) {}
};

struct TrainConfig {
    int batch = 100;       // windows per update
    int window = 300;      // steps per window (6 s at 50 Hz)
    int epochs = 300;
    double lr = 1e-3;
    uint64_t seed = 1;
    int conv_channels = 16;
};

enum class RunMode { train, infer };

// zero hidden state, weights per tensor-scaled uniform init
ModelParams init_model_params(int conv_channels, int hidden, uint64_t seed);
ModelParams zero_model_params(int conv_channels, int hidden);

// Single-step forward. In train mode batch statistics are taken over the
// three joint positions of this sample; inference uses the running stats.
Sample9 forward_step(const ModelParams& p, HiddenState& h, const Input10& input,
                     RunMode mode);

// gradient containers mirror the trainable tensors
struct ModelGrads {
    Eigen::VectorXd conv_w, conv_b, bn_gamma, bn_beta, lstm_b, head_b;
    Eigen::MatrixXd lstm_wx, lstm_wh, head_w;

    explicit ModelGrads(const ModelParams& p);
    void setZero();

    template <typename F>
    void for_each_tensor(F&& f) {
        f("conv_w", conv_w);
        f("conv_b", conv_b);
        f("bn_gamma", bn_gamma);
        f("bn_beta", bn_beta);
        f("lstm_wx", lstm_wx);
        f("lstm_wh", lstm_wh);
        f("lstm_b", lstm_b);
        f("head_w", head_w);
        f("head_b", head_b);
    }
};

// Contiguous batch of training windows: layout [window][step][dim].
struct WindowBatch {
    int W = 0, T = 0;
    std::vector<double> in;   // W*T*10
    std::vector<double> tgt;  // W*T*9
};

// Mean squared error over the batch plus full BPTT gradients. Zero initial
// hidden state per window, batch-normalization statistics over batch x time x
// position. Does not modify params (running stats update is the trainer's
// job, via `bn_update`).
double loss_and_gradients(const ModelParams& p, const WindowBatch& b, ModelGrads& g,
                          Eigen::VectorXd* bn_batch_mean = nullptr,
                          Eigen::VectorXd* bn_batch_var = nullptr);

// batched train-mode forward only; returns predictions [W*T*9]
double batched_forward(const ModelParams& p, const WindowBatch& b, RunMode mode,
                       std::vector<double>* predictions);

struct TrainResult {
    ModelParams params;
    std::vector<double> loss_curve;
};

TrainResult train_model(const Dataset& data, const TrainConfig& cfg);

// raw-unit single prediction: normalize, infer, denormalize
Sample9 predict_step(const ModelParams& p, HiddenState& h, const Sample9& slave_res,
                     double f_cmd_hz);

void save_model(const ModelParams& p, const std::string& path);
ModelParams load_model(const std::string& path);

}  // namespace bilat
