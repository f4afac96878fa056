#include "bilat/model.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "bilat/errors.hpp"
#include "bilat/rng.hpp"

namespace bilat {

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// conv over the joint axis: 3 input channels x 3 positions, width 3, zero pad
void conv_forward(const ModelParams& p, const double* in10, double* pre) {
    const int C = p.conv_channels;
    for (int c = 0; c < C; ++c) {
        for (int j = 0; j < 3; ++j) {
            double acc = p.conv_b[c];
            for (int ic = 0; ic < 3; ++ic) {
                for (int k = 0; k < 3; ++k) {
                    const int src = j + k - 1;
                    if (src < 0 || src > 2) continue;
                    acc += p.conv_w[(c * 3 + ic) * 3 + k] * in10[ic * 3 + src];
                }
            }
            pre[c * 3 + j] = acc;
        }
    }
}

}  // namespace

ModelGrads::ModelGrads(const ModelParams& p)
    : conv_w(Eigen::VectorXd::Zero(p.conv_w.size())),
      conv_b(Eigen::VectorXd::Zero(p.conv_b.size())),
      bn_gamma(Eigen::VectorXd::Zero(p.bn_gamma.size())),
      bn_beta(Eigen::VectorXd::Zero(p.bn_beta.size())),
      lstm_b(Eigen::VectorXd::Zero(p.lstm_b.size())),
      head_b(Eigen::VectorXd::Zero(p.head_b.size())),
      lstm_wx(Eigen::MatrixXd::Zero(p.lstm_wx.rows(), p.lstm_wx.cols())),
      lstm_wh(Eigen::MatrixXd::Zero(p.lstm_wh.rows(), p.lstm_wh.cols())),
      head_w(Eigen::MatrixXd::Zero(p.head_w.rows(), p.head_w.cols())) {}

void ModelGrads::setZero() {
    conv_w.setZero();
    conv_b.setZero();
    bn_gamma.setZero();
    bn_beta.setZero();
    lstm_b.setZero();
    head_b.setZero();
    lstm_wx.setZero();
    lstm_wh.setZero();
    head_w.setZero();
}

ModelParams zero_model_params(int conv_channels, int hidden) {
    ModelParams p;
    p.conv_channels = conv_channels;
    p.hidden = hidden;
    const int F = p.feat();
    p.conv_w = Eigen::VectorXd::Zero(conv_channels * 9);
    p.conv_b = Eigen::VectorXd::Zero(conv_channels);
    p.bn_gamma = Eigen::VectorXd::Zero(conv_channels);
    p.bn_beta = Eigen::VectorXd::Zero(conv_channels);
    p.bn_rmean = Eigen::VectorXd::Zero(conv_channels);
    p.bn_rvar = Eigen::VectorXd::Ones(conv_channels);
    p.lstm_wx = Eigen::MatrixXd::Zero(4 * hidden, F);
    p.lstm_wh = Eigen::MatrixXd::Zero(4 * hidden, hidden);
    p.lstm_b = Eigen::VectorXd::Zero(4 * hidden);
    p.head_w = Eigen::MatrixXd::Zero(9, hidden);
    p.head_b = Eigen::VectorXd::Zero(9);
    for (int i = 0; i < 19; ++i) {
        p.norm.mins[i] = 0.0;
        p.norm.maxs[i] = 1.0;
    }
    return p;
}

ModelParams init_model_params(int conv_channels, int hidden, uint64_t seed) {
    ModelParams p = zero_model_params(conv_channels, hidden);
    Rng rng(Rng::mix(seed, 0x6d0de1ULL));

    auto fill_uniform = [&rng](Eigen::VectorXd& v, double s) {
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-s, s);
    };
    auto fill_uniform_m = [&rng](Eigen::MatrixXd& m, double s) {
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-s, s);
    };

    fill_uniform(p.conv_w, 1.0 / 3.0);
    p.bn_gamma.setOnes();
    fill_uniform_m(p.lstm_wx, 1.0 / std::sqrt(static_cast<double>(p.feat())));
    fill_uniform_m(p.lstm_wh, 1.0 / std::sqrt(static_cast<double>(hidden)));
    // forget gate bias starts open
    p.lstm_b.segment(hidden, hidden).setOnes();
    fill_uniform_m(p.head_w, 1.0 / std::sqrt(static_cast<double>(hidden)));
    // targets are normalized to [0,1]; start the head at mid-range
    p.head_b.setConstant(0.5);
    return p;
}

Sample9 forward_step(const ModelParams& p, HiddenState& hs, const Input10& input,
                     RunMode mode) {
    const int C = p.conv_channels;
    const int H = p.hidden;
    const int F = p.feat();
    if (hs.h.size() != H) hs = HiddenState(H);

    std::vector<double> pre(static_cast<size_t>(3 * C));
    conv_forward(p, input.data(), pre.data());

    Eigen::VectorXd x(F);
    for (int c = 0; c < C; ++c) {
        double mu, var;
        if (mode == RunMode::train) {
            mu = (pre[c * 3] + pre[c * 3 + 1] + pre[c * 3 + 2]) / 3.0;
            var = 0.0;
            for (int j = 0; j < 3; ++j) var += (pre[c * 3 + j] - mu) * (pre[c * 3 + j] - mu);
            var /= 3.0;
        } else {
            mu = p.bn_rmean[c];
            var = p.bn_rvar[c];
        }
        const double inv_std = 1.0 / std::sqrt(var + kBnEps);
        for (int j = 0; j < 3; ++j) {
            const double y = p.bn_gamma[c] * (pre[c * 3 + j] - mu) * inv_std + p.bn_beta[c];
            x[c * 3 + j] = y > 0.0 ? y : 0.0;
        }
    }
    x[F - 1] = input[9];

    Eigen::VectorXd gates = p.lstm_wx * x + p.lstm_wh * hs.h + p.lstm_b;
    Eigen::VectorXd c_new(H), h_new(H);
    for (int k = 0; k < H; ++k) {
        const double gi = sigmoid(gates[k]);
        const double gf = sigmoid(gates[H + k]);
        const double gg = std::tanh(gates[2 * H + k]);
        const double go = sigmoid(gates[3 * H + k]);
        c_new[k] = gf * hs.c[k] + gi * gg;
        h_new[k] = go * std::tanh(c_new[k]);
    }
    hs.c = c_new;
    hs.h = h_new;

    Eigen::VectorXd y = p.head_w * hs.h + p.head_b;
    Sample9 out;
    for (int i = 0; i < 9; ++i) out[i] = y[i];
    return out;
}

namespace {

// staged activations of one batched train-mode forward pass
struct ForwardStage {
    int W = 0, T = 0, C = 0, H = 0, F = 0;
    std::vector<double> pre;    // (t*W+w)*3C + c*3+j, conv output
    std::vector<double> xhat;   // normalized pre
    std::vector<double> act;    // post-BN post-ReLU
    Eigen::VectorXd mu, var;    // batch statistics per channel
    std::vector<Eigen::MatrixXd> Z;      // T of W x F
    std::vector<Eigen::MatrixXd> gates;  // T of W x 4H (post-activation)
    std::vector<Eigen::MatrixXd> cell;   // T of W x H
    std::vector<Eigen::MatrixXd> hid;    // T of W x H
};

double forward_pass(const ModelParams& p, const WindowBatch& b, RunMode mode,
                    ForwardStage& st, std::vector<double>* predictions) {
    const int W = b.W, T = b.T, C = p.conv_channels, H = p.hidden, F = p.feat();
    st.W = W; st.T = T; st.C = C; st.H = H; st.F = F;
    const size_t n_wt = static_cast<size_t>(W) * T;

    st.pre.resize(n_wt * 3 * C);
    st.xhat.resize(n_wt * 3 * C);
    st.act.resize(n_wt * 3 * C);

    for (int t = 0; t < T; ++t)
        for (int w = 0; w < W; ++w) {
            const size_t wt = static_cast<size_t>(t) * W + w;
            conv_forward(p, &b.in[(static_cast<size_t>(w) * T + t) * 10],
                         &st.pre[wt * 3 * C]);
        }

    st.mu.resize(C);
    st.var.resize(C);
    const double n_per_ch = static_cast<double>(n_wt * 3);
    for (int c = 0; c < C; ++c) {
        if (mode == RunMode::train) {
            double s = 0.0;
            for (size_t wt = 0; wt < n_wt; ++wt)
                for (int j = 0; j < 3; ++j) s += st.pre[wt * 3 * C + c * 3 + j];
            const double mu = s / n_per_ch;
            double v = 0.0;
            for (size_t wt = 0; wt < n_wt; ++wt)
                for (int j = 0; j < 3; ++j) {
                    const double d = st.pre[wt * 3 * C + c * 3 + j] - mu;
                    v += d * d;
                }
            st.mu[c] = mu;
            st.var[c] = v / n_per_ch;
        } else {
            st.mu[c] = p.bn_rmean[c];
            st.var[c] = p.bn_rvar[c];
        }
        const double inv_std = 1.0 / std::sqrt(st.var[c] + kBnEps);
        for (size_t wt = 0; wt < n_wt; ++wt)
            for (int j = 0; j < 3; ++j) {
                const size_t i = wt * 3 * C + c * 3 + j;
                st.xhat[i] = (st.pre[i] - st.mu[c]) * inv_std;
                const double y = p.bn_gamma[c] * st.xhat[i] + p.bn_beta[c];
                st.act[i] = y > 0.0 ? y : 0.0;
            }
    }

    st.Z.assign(T, Eigen::MatrixXd(W, F));
    st.gates.assign(T, Eigen::MatrixXd(W, 4 * H));
    st.cell.assign(T, Eigen::MatrixXd(W, H));
    st.hid.assign(T, Eigen::MatrixXd(W, H));

    Eigen::MatrixXd h_prev = Eigen::MatrixXd::Zero(W, H);
    Eigen::MatrixXd c_prev = Eigen::MatrixXd::Zero(W, H);

    if (predictions) predictions->assign(n_wt * 9, 0.0);
    double loss = 0.0;
    const double inv_n = 1.0 / (static_cast<double>(n_wt) * 9.0);

    for (int t = 0; t < T; ++t) {
        Eigen::MatrixXd& Z = st.Z[static_cast<size_t>(t)];
        for (int w = 0; w < W; ++w) {
            const size_t wt = static_cast<size_t>(t) * W + w;
            for (int k = 0; k < 3 * C; ++k) Z(w, k) = st.act[wt * 3 * C + k];
            Z(w, F - 1) = b.in[(static_cast<size_t>(w) * T + t) * 10 + 9];
        }

        Eigen::MatrixXd raw = Z * p.lstm_wx.transpose() + h_prev * p.lstm_wh.transpose();
        raw.rowwise() += p.lstm_b.transpose();

        Eigen::MatrixXd& G = st.gates[static_cast<size_t>(t)];
        Eigen::MatrixXd& Ct = st.cell[static_cast<size_t>(t)];
        Eigen::MatrixXd& Ht = st.hid[static_cast<size_t>(t)];
        for (int w = 0; w < W; ++w)
            for (int k = 0; k < H; ++k) {
                const double gi = sigmoid(raw(w, k));
                const double gf = sigmoid(raw(w, H + k));
                const double gg = std::tanh(raw(w, 2 * H + k));
                const double go = sigmoid(raw(w, 3 * H + k));
                G(w, k) = gi;
                G(w, H + k) = gf;
                G(w, 2 * H + k) = gg;
                G(w, 3 * H + k) = go;
                const double cn = gf * c_prev(w, k) + gi * gg;
                Ct(w, k) = cn;
                Ht(w, k) = go * std::tanh(cn);
            }

        Eigen::MatrixXd Y = Ht * p.head_w.transpose();
        Y.rowwise() += p.head_b.transpose();
        for (int w = 0; w < W; ++w)
            for (int i = 0; i < 9; ++i) {
                const double pred = Y(w, i);
                const double err = pred - b.tgt[(static_cast<size_t>(w) * T + t) * 9 + i];
                loss += err * err * inv_n;
                if (predictions)
                    (*predictions)[(static_cast<size_t>(w) * T + t) * 9 + i] = pred;
            }

        h_prev = Ht;
        c_prev = Ct;
    }
    return loss;
}

}  // namespace

double batched_forward(const ModelParams& p, const WindowBatch& b, RunMode mode,
                       std::vector<double>* predictions) {
    ForwardStage st;
    return forward_pass(p, b, mode, st, predictions);
}

double loss_and_gradients(const ModelParams& p, const WindowBatch& b, ModelGrads& g,
                          Eigen::VectorXd* bn_batch_mean, Eigen::VectorXd* bn_batch_var) {
    ForwardStage st;
    const double loss = forward_pass(p, b, RunMode::train, st, nullptr);
    if (bn_batch_mean) *bn_batch_mean = st.mu;
    if (bn_batch_var) *bn_batch_var = st.var;

    const int W = st.W, T = st.T, C = st.C, H = st.H;
    const size_t n_wt = static_cast<size_t>(W) * T;
    const double inv_n = 1.0 / (static_cast<double>(n_wt) * 9.0);

    g.setZero();
    std::vector<double> dact(n_wt * 3 * C, 0.0);

    Eigen::MatrixXd dH_next = Eigen::MatrixXd::Zero(W, H);
    Eigen::MatrixXd dC_next = Eigen::MatrixXd::Zero(W, H);

    for (int t = T - 1; t >= 0; --t) {
        const Eigen::MatrixXd& Ht = st.hid[static_cast<size_t>(t)];
        const Eigen::MatrixXd& Ct = st.cell[static_cast<size_t>(t)];
        const Eigen::MatrixXd& G = st.gates[static_cast<size_t>(t)];
        const Eigen::MatrixXd& Z = st.Z[static_cast<size_t>(t)];

        // head and loss
        Eigen::MatrixXd Y = Ht * p.head_w.transpose();
        Y.rowwise() += p.head_b.transpose();
        Eigen::MatrixXd dY(W, 9);
        for (int w = 0; w < W; ++w)
            for (int i = 0; i < 9; ++i)
                dY(w, i) = 2.0 * inv_n *
                           (Y(w, i) - b.tgt[(static_cast<size_t>(w) * T + t) * 9 + i]);

        g.head_w.noalias() += dY.transpose() * Ht;
        g.head_b += dY.colwise().sum().transpose();

        Eigen::MatrixXd dH = dY * p.head_w + dH_next;

        // LSTM cell backward
        Eigen::MatrixXd dRaw(W, 4 * H);
        Eigen::MatrixXd dC_prev(W, H);
        const bool has_prev = t > 0;
        const Eigen::MatrixXd& Cp = has_prev ? st.cell[static_cast<size_t>(t - 1)]
                                             : dC_prev;  // placeholder, zeros handled below
        for (int w = 0; w < W; ++w)
            for (int k = 0; k < H; ++k) {
                const double gi = G(w, k);
                const double gf = G(w, H + k);
                const double gg = G(w, 2 * H + k);
                const double go = G(w, 3 * H + k);
                const double tc = std::tanh(Ct(w, k));
                const double cprev = has_prev ? Cp(w, k) : 0.0;

                const double dgo = dH(w, k) * tc;
                const double dc = dH(w, k) * go * (1.0 - tc * tc) + dC_next(w, k);
                const double dgi = dc * gg;
                const double dgg = dc * gi;
                const double dgf = dc * cprev;
                dC_prev(w, k) = dc * gf;

                dRaw(w, k) = dgi * gi * (1.0 - gi);
                dRaw(w, H + k) = dgf * gf * (1.0 - gf);
                dRaw(w, 2 * H + k) = dgg * (1.0 - gg * gg);
                dRaw(w, 3 * H + k) = dgo * go * (1.0 - go);
            }

        g.lstm_wx.noalias() += dRaw.transpose() * Z;
        if (has_prev)
            g.lstm_wh.noalias() += dRaw.transpose() * st.hid[static_cast<size_t>(t - 1)];
        g.lstm_b += dRaw.colwise().sum().transpose();

        Eigen::MatrixXd dZ = dRaw * p.lstm_wx;
        dH_next.noalias() = dRaw * p.lstm_wh;
        dC_next = dC_prev;

        for (int w = 0; w < W; ++w) {
            const size_t wt = static_cast<size_t>(t) * W + w;
            for (int k = 0; k < 3 * C; ++k) dact[wt * 3 * C + k] = dZ(w, k);
        }
    }

    // batch-norm backward over the whole set, then conv
    const double n_per_ch = static_cast<double>(n_wt * 3);
    for (int c = 0; c < C; ++c) {
        const double inv_std = 1.0 / std::sqrt(st.var[c] + kBnEps);
        double dgamma = 0.0, dbeta = 0.0, dvar = 0.0, dmu = 0.0, sum_dxhat = 0.0;
        for (size_t wt = 0; wt < n_wt; ++wt)
            for (int j = 0; j < 3; ++j) {
                const size_t i = wt * 3 * C + c * 3 + j;
                const double y = p.bn_gamma[c] * st.xhat[i] + p.bn_beta[c];
                const double dy = y > 0.0 ? dact[i] : 0.0;
                dgamma += dy * st.xhat[i];
                dbeta += dy;
                const double dxhat = dy * p.bn_gamma[c];
                sum_dxhat += dxhat;
                dvar += dxhat * (st.pre[i] - st.mu[c]);
            }
        dvar *= -0.5 * inv_std * inv_std * inv_std;
        dmu = -inv_std * sum_dxhat;

        g.bn_gamma[c] += dgamma;
        g.bn_beta[c] += dbeta;

        for (size_t wt = 0; wt < n_wt; ++wt)
            for (int j = 0; j < 3; ++j) {
                const size_t i = wt * 3 * C + c * 3 + j;
                const double y = p.bn_gamma[c] * st.xhat[i] + p.bn_beta[c];
                const double dy = y > 0.0 ? dact[i] : 0.0;
                const double dxhat = dy * p.bn_gamma[c];
                const double dpre = dxhat * inv_std +
                                    dvar * 2.0 * (st.pre[i] - st.mu[c]) / n_per_ch +
                                    dmu / n_per_ch;
                // reuse dact as the conv-output gradient
                dact[i] = dpre;
            }
    }

    for (int t = 0; t < T; ++t)
        for (int w = 0; w < W; ++w) {
            const size_t wt = static_cast<size_t>(t) * W + w;
            const double* in10 = &b.in[(static_cast<size_t>(w) * T + t) * 10];
            for (int c = 0; c < C; ++c)
                for (int j = 0; j < 3; ++j) {
                    const double dpre = dact[wt * 3 * C + c * 3 + j];
                    if (dpre == 0.0) continue;
                    g.conv_b[c] += dpre;
                    for (int ic = 0; ic < 3; ++ic)
                        for (int k = 0; k < 3; ++k) {
                            const int src = j + k - 1;
                            if (src < 0 || src > 2) continue;
                            g.conv_w[(c * 3 + ic) * 3 + k] += dpre * in10[ic * 3 + src];
                        }
                }
        }

    return loss;
}

namespace {

struct AdamState {
    ModelGrads m, v;
    explicit AdamState(const ModelParams& p) : m(p), v(p) {}
};

void adam_update(ModelParams& p, ModelGrads& g, AdamState& st, double lr, int step) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double bc1 = 1.0 - std::pow(b1, step);
    const double bc2 = 1.0 - std::pow(b2, step);

    std::vector<std::pair<double*, size_t>> pp, gp, mp, vp;
    auto collect = [](auto& obj, std::vector<std::pair<double*, size_t>>& out) {
        obj.for_each_tensor([&out](const char*, auto& t) {
            out.emplace_back(t.data(), static_cast<size_t>(t.size()));
        });
    };
    collect(p, pp);
    collect(g, gp);
    collect(st.m, mp);
    collect(st.v, vp);

    for (size_t ti = 0; ti < pp.size(); ++ti) {
        double* w = pp[ti].first;
        double* gr = gp[ti].first;
        double* m = mp[ti].first;
        double* v = vp[ti].first;
        for (size_t i = 0; i < pp[ti].second; ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * gr[i];
            v[i] = b2 * v[i] + (1.0 - b2) * gr[i] * gr[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

}  // namespace

TrainResult train_model(const Dataset& data, const TrainConfig& cfg) {
    TrainResult out;
    out.params = init_model_params(cfg.conv_channels, 64, cfg.seed);
    out.params.norm = data.norm;

    // series long enough for a full window
    std::vector<size_t> eligible;
    for (size_t s = 0; s < data.series.size(); ++s)
        if (data.series[s].inputs.size() >= static_cast<size_t>(cfg.window))
            eligible.push_back(s);
    if (eligible.empty()) throw ShapeError("no series long enough for the window length");

    Rng rng(Rng::mix(cfg.seed, 0x7ea11e55ULL));
    ModelGrads grads(out.params);
    AdamState adam(out.params);
    Eigen::VectorXd bmu, bvar;

    WindowBatch batch;
    batch.W = cfg.batch;
    batch.T = cfg.window;
    batch.in.resize(static_cast<size_t>(cfg.batch) * cfg.window * 10);
    batch.tgt.resize(static_cast<size_t>(cfg.batch) * cfg.window * 9);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (int w = 0; w < cfg.batch; ++w) {
            const SeriesPairs& sp =
                data.series[eligible[rng.uniform_int(eligible.size())]];
            const size_t max_start = sp.inputs.size() - static_cast<size_t>(cfg.window);
            const size_t start = max_start == 0 ? 0 : rng.uniform_int(max_start + 1);
            for (int t = 0; t < cfg.window; ++t) {
                const size_t k = start + static_cast<size_t>(t);
                const size_t base_in = (static_cast<size_t>(w) * cfg.window + t) * 10;
                const size_t base_tg = (static_cast<size_t>(w) * cfg.window + t) * 9;
                for (int d = 0; d < 10; ++d) batch.in[base_in + d] = sp.inputs[k][d];
                for (int d = 0; d < 9; ++d) batch.tgt[base_tg + d] = sp.targets[k][d];
            }
        }

        const double loss = loss_and_gradients(out.params, batch, grads, &bmu, &bvar);
        if (!std::isfinite(loss)) throw DivergenceError("training loss is not finite");

        out.params.bn_rmean = (1.0 - kBnMomentum) * out.params.bn_rmean + kBnMomentum * bmu;
        out.params.bn_rvar = (1.0 - kBnMomentum) * out.params.bn_rvar + kBnMomentum * bvar;

        adam_update(out.params, grads, adam, cfg.lr, epoch + 1);
        out.loss_curve.push_back(loss);
    }
    return out;
}

Sample9 predict_step(const ModelParams& p, HiddenState& h, const Sample9& slave_res,
                     double f_cmd_hz) {
    Input10 in;
    for (int i = 0; i < 9; ++i) in[i] = slave_res[i];
    in[9] = f_cmd_hz;
    const Input10 z = p.norm.apply_input(in);
    const Sample9 y = forward_step(p, h, z, RunMode::infer);
    return p.norm.invert_target(y);
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

std::vector<double> to_vec(const Eigen::MatrixXd& m) {
    // row-major on disk
    std::vector<double> out;
    out.reserve(static_cast<size_t>(m.size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
    return out;
}

Eigen::VectorXd vec_from(const nlohmann::json& j, Eigen::Index n, const char* name) {
    if (static_cast<Eigen::Index>(j.size()) != n)
        throw ShapeError(std::string("bad shape for ") + name);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = j.at(static_cast<size_t>(i)).get<double>();
    return v;
}

Eigen::MatrixXd mat_from(const nlohmann::json& j, Eigen::Index rows, Eigen::Index cols,
                         const char* name) {
    if (static_cast<Eigen::Index>(j.size()) != rows * cols)
        throw ShapeError(std::string("bad shape for ") + name);
    Eigen::MatrixXd m(rows, cols);
    size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(k++).get<double>();
    return m;
}

}  // namespace

void save_model(const ModelParams& p, const std::string& path) {
    nlohmann::json j;
    j["version"] = 1;
    j["arch"] = {{"conv_channels", p.conv_channels}, {"hidden", p.hidden}};
    j["conv_w"] = to_vec(p.conv_w);
    j["conv_b"] = to_vec(p.conv_b);
    j["bn_gamma"] = to_vec(p.bn_gamma);
    j["bn_beta"] = to_vec(p.bn_beta);
    j["bn_rmean"] = to_vec(p.bn_rmean);
    j["bn_rvar"] = to_vec(p.bn_rvar);
    j["lstm_wx"] = to_vec(p.lstm_wx);
    j["lstm_wh"] = to_vec(p.lstm_wh);
    j["lstm_b"] = to_vec(p.lstm_b);
    j["head_w"] = to_vec(p.head_w);
    j["head_b"] = to_vec(p.head_b);
    j["normalizer"] = {{"mins", p.norm.mins}, {"maxs", p.norm.maxs}};
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << "\n";
}

ModelParams load_model(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    f >> j;

    const int C = j.at("arch").at("conv_channels").get<int>();
    const int H = j.at("arch").at("hidden").get<int>();
    ModelParams p = zero_model_params(C, H);
    const int F = p.feat();

    p.conv_w = vec_from(j.at("conv_w"), C * 9, "conv_w");
    p.conv_b = vec_from(j.at("conv_b"), C, "conv_b");
    p.bn_gamma = vec_from(j.at("bn_gamma"), C, "bn_gamma");
    p.bn_beta = vec_from(j.at("bn_beta"), C, "bn_beta");
    p.bn_rmean = vec_from(j.at("bn_rmean"), C, "bn_rmean");
    p.bn_rvar = vec_from(j.at("bn_rvar"), C, "bn_rvar");
    p.lstm_wx = mat_from(j.at("lstm_wx"), 4 * H, F, "lstm_wx");
    p.lstm_wh = mat_from(j.at("lstm_wh"), 4 * H, H, "lstm_wh");
    p.lstm_b = vec_from(j.at("lstm_b"), 4 * H, "lstm_b");
    p.head_w = mat_from(j.at("head_w"), 9, H, "head_w");
    p.head_b = vec_from(j.at("head_b"), 9, "head_b");
    for (int i = 0; i < 19; ++i) {
        p.norm.mins[i] = j.at("normalizer").at("mins").at(i).get<double>();
        p.norm.maxs[i] = j.at("normalizer").at("maxs").at(i).get<double>();
    }
    return p;
}

}  // namespace bilat
