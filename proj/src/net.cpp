#include "aeimpute/net.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "aeimpute/errors.hpp"

namespace aeimpute::net {

double activate(Activation kind, double t) noexcept {
    switch (kind) {
    case Activation::Sigmoid:
        return 1.0 / (1.0 + std::exp(-t));
    case Activation::Identity:
        return t;
    }
    return t;
}

double activation_slope(Activation kind, double a) noexcept {
    return kind == Activation::Sigmoid ? a * (1.0 - a) : 1.0;
}

void validate(const Network& net) {
    if (net.input_dim == 0) throw ConfigError("network input_dim must be positive");
    if (net.layers.empty()) throw ConfigError("network has no layers");
    std::size_t width = net.input_dim;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& layer = net.layers[i];
        if (layer.fan_in() != width)
            throw ShapeError("layer " + std::to_string(i) + " expects " + std::to_string(layer.fan_in()) +
                             " inputs but receives " + std::to_string(width));
        if (layer.biases.size() != layer.fan_out())
            throw ShapeError("layer " + std::to_string(i) + " bias length does not match weight rows");
        for (double w : layer.weights.data())
            if (!std::isfinite(w)) throw ConfigError("layer " + std::to_string(i) + " has non-finite weights");
        for (double b : layer.biases)
            if (!std::isfinite(b)) throw ConfigError("layer " + std::to_string(i) + " has non-finite biases");
        width = layer.fan_out();
    }
    if (width != net.input_dim) throw ShapeError("network output width differs from input_dim");
    if (net.tied) {
        const std::size_t n = net.layers.size();
        if (n % 2 != 0) throw ConfigError("tied network needs an even number of layers");
        for (std::size_t i = 0; i < n / 2; ++i)
            if (net.layers[n - 1 - i].weights != net.layers[i].weights.transposed())
                throw ConfigError("tied network decoder layer " + std::to_string(n - 1 - i) +
                                  " is not the transpose of encoder layer " + std::to_string(i));
    }
}

void sync_tied(Network& net) {
    if (!net.tied) return;
    const std::size_t n = net.layers.size();
    for (std::size_t i = 0; i < n / 2; ++i) net.layers[n - 1 - i].weights = net.layers[i].weights.transposed();
}

Network init_network(std::size_t input_dim, std::span<const std::size_t> hidden_sizes, bool tied,
                     std::optional<double> init_scale, std::uint64_t seed) {
    if (input_dim == 0) throw ConfigError("input_dim must be positive");
    if (hidden_sizes.empty()) throw ConfigError("hidden_sizes must not be empty");
    if (std::find(hidden_sizes.begin(), hidden_sizes.end(), std::size_t{0}) != hidden_sizes.end())
        throw ConfigError("hidden layer widths must be positive");
    if (init_scale && !(*init_scale >= 0.0 && std::isfinite(*init_scale)))
        throw ConfigError("init_scale must be finite and non-negative");

    std::vector<std::size_t> widths{input_dim};
    widths.insert(widths.end(), hidden_sizes.begin(), hidden_sizes.end());
    for (std::size_t i = hidden_sizes.size() - 1; i-- > 0;) widths.push_back(hidden_sizes[i]);
    widths.push_back(input_dim);

    Network net;
    net.input_dim = input_dim;
    net.tied = tied;
    Rng rng(seed);
    const std::size_t n_layers = widths.size() - 1;
    for (std::size_t i = 0; i < n_layers; ++i) {
        Layer layer;
        layer.weights = Matrix(widths[i + 1], widths[i]);
        layer.biases.assign(widths[i + 1], 0.0);
        const bool decoder_copy = tied && i >= n_layers / 2;
        if (!decoder_copy) {
            const double scale = init_scale.value_or(kDefaultInitGain / std::sqrt(static_cast<double>(widths[i])));
            for (double& w : layer.weights.data()) w = rng.uniform(-scale, scale);
        }
        net.layers.push_back(std::move(layer));
    }
    sync_tied(net);
    return net;
}

ForwardTrace forward(const Network& net, std::span<const double> x) {
    if (x.size() != net.input_dim)
        throw ShapeError("input has " + std::to_string(x.size()) + " values, network expects " +
                         std::to_string(net.input_dim));
    ForwardTrace trace;
    trace.input.assign(x.begin(), x.end());
    trace.pre_activations.reserve(net.layers.size());
    trace.activations.reserve(net.layers.size());
    const std::vector<double>* prev = &trace.input;
    for (const Layer& layer : net.layers) {
        std::vector<double> pre(layer.biases);
        for (std::size_t r = 0; r < layer.fan_out(); ++r) {
            const auto row = layer.weights.row(r);
            pre[r] += std::inner_product(row.begin(), row.end(), prev->begin(), 0.0);
        }
        std::vector<double> act(pre.size());
        std::transform(pre.begin(), pre.end(), act.begin(),
                       [&](double t) { return activate(layer.activation, t); });
        trace.pre_activations.push_back(std::move(pre));
        trace.activations.push_back(std::move(act));
        prev = &trace.activations.back();
    }
    return trace;
}

double reconstruction_error(const Network& net, std::span<const double> x) {
    if (x.size() != net.input_dim) throw ShapeError("input length does not match network input_dim");
    std::size_t widest = net.input_dim;
    for (const Layer& layer : net.layers) widest = std::max(widest, layer.fan_out());
    std::vector<double> buffer(2 * widest);
    double* cur = buffer.data();
    double* next = buffer.data() + widest;
    std::copy(x.begin(), x.end(), cur);
    for (const Layer& layer : net.layers) {
        for (std::size_t r = 0; r < layer.fan_out(); ++r) {
            const auto row = layer.weights.row(r);
            next[r] = activate(layer.activation,
                               layer.biases[r] + std::inner_product(row.begin(), row.end(), cur, 0.0));
        }
        std::swap(cur, next);
    }
    return reconstruction_loss(x, std::span<const double>(cur, net.input_dim));
}

double reconstruction_loss(std::span<const double> x, std::span<const double> z) {
    if (x.size() != z.size())
        throw ShapeError("reconstruction_loss: lengths " + std::to_string(x.size()) + " and " +
                         std::to_string(z.size()) + " differ");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double diff = x[i] - z[i];
        sum += diff * diff;
    }
    return sum;
}

std::vector<double> corrupt(std::span<const double> x, double nu, Rng& rng) {
    if (!(nu >= 0.0 && nu <= 1.0)) throw ConfigError("corruption fraction must lie in [0, 1]");
    std::vector<double> out(x.begin(), x.end());
    for (double& v : out)
        if (rng.bernoulli(nu)) v = 0.0;
    return out;
}

Gradients Gradients::zeros_like(const Network& net) {
    Gradients g;
    for (const Layer& layer : net.layers) {
        g.weights.emplace_back(layer.fan_out(), layer.fan_in());
        g.biases.emplace_back(layer.fan_out(), 0.0);
    }
    return g;
}

namespace {

/// Backpropagates dL/d(output) through `trace`. Accumulates `scale`-weighted parameter
/// gradients into `grads` when given, and returns dL/d(input) through the network.
std::vector<double> backprop(const Network& net, const ForwardTrace& trace, std::vector<double> delta,
                             Gradients* grads, double scale) {
    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const Layer& layer = net.layers[l];
        const std::vector<double>& out = trace.activations[l];
        for (std::size_t r = 0; r < delta.size(); ++r) delta[r] *= activation_slope(layer.activation, out[r]);

        const std::vector<double>& in = l == 0 ? trace.input : trace.activations[l - 1];
        if (grads) {
            Matrix& gw = grads->weights[l];
            std::vector<double>& gb = grads->biases[l];
            for (std::size_t r = 0; r < layer.fan_out(); ++r) {
                const double d = scale * delta[r];
                gb[r] += d;
                auto grow = gw.row(r);
                for (std::size_t c = 0; c < layer.fan_in(); ++c) grow[c] += d * in[c];
            }
        }
        std::vector<double> below(layer.fan_in(), 0.0);
        for (std::size_t r = 0; r < layer.fan_out(); ++r) {
            const auto wrow = layer.weights.row(r);
            for (std::size_t c = 0; c < layer.fan_in(); ++c) below[c] += wrow[c] * delta[r];
        }
        delta = std::move(below);
    }
    return delta;
}

void combine_tied(const Network& net, Gradients& g) {
    if (!net.tied) return;
    const std::size_t n = net.layers.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        Matrix& enc = g.weights[i];
        const Matrix& dec = g.weights[n - 1 - i];
        for (std::size_t r = 0; r < enc.rows(); ++r)
            for (std::size_t c = 0; c < enc.cols(); ++c) enc(r, c) += dec(c, r);
        g.weights[n - 1 - i] = enc.transposed();
    }
}

/// Shared body of grad_params and the training step. Returns the summed batch loss.
double accumulate_gradients(const Network& net, std::span<const std::vector<double>> inputs,
                            std::span<const std::vector<double>> targets, Gradients& grads) {
    if (inputs.empty()) throw InvalidArgument("gradient batch is empty");
    if (inputs.size() != targets.size()) throw ShapeError("inputs and targets differ in count");
    const double scale = 1.0 / static_cast<double>(inputs.size());
    double loss = 0.0;
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        if (targets[s].size() != net.input_dim) throw ShapeError("target length does not match network input_dim");
        const ForwardTrace trace = forward(net, inputs[s]);
        const std::vector<double>& z = trace.output();
        std::vector<double> delta(z.size());
        for (std::size_t i = 0; i < z.size(); ++i) delta[i] = 2.0 * (z[i] - targets[s][i]);
        loss += reconstruction_loss(targets[s], z);
        backprop(net, trace, std::move(delta), &grads, scale);
    }
    combine_tied(net, grads);
    return loss;
}

}  // namespace

Gradients grad_params(const Network& net, std::span<const std::vector<double>> batch) {
    return grad_params(net, batch, batch);
}

Gradients grad_params(const Network& net, std::span<const std::vector<double>> inputs,
                      std::span<const std::vector<double>> targets) {
    Gradients grads = Gradients::zeros_like(net);
    accumulate_gradients(net, inputs, targets, grads);
    return grads;
}

std::vector<double> grad_input(const Network& net, std::span<const double> x,
                               std::span<const std::size_t> free_indices) {
    for (std::size_t j : free_indices)
        if (j >= net.input_dim)
            throw ShapeError("free index " + std::to_string(j) + " outside input of width " +
                             std::to_string(net.input_dim));
    if (free_indices.empty()) return {};
    const ForwardTrace trace = forward(net, x);
    const std::vector<double>& z = trace.output();
    std::vector<double> delta(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) delta[i] = 2.0 * (z[i] - x[i]);
    // x is both the network input and the comparison target.
    const std::vector<double> through = backprop(net, trace, delta, nullptr, 1.0);
    std::vector<double> out;
    out.reserve(free_indices.size());
    for (std::size_t j : free_indices) out.push_back(through[j] - delta[j]);
    return out;
}

void TrainConfig::validate() const {
    if (hidden_sizes.empty()) throw ConfigError("hidden_sizes must not be empty");
    for (std::size_t h : hidden_sizes)
        if (h == 0) throw ConfigError("hidden layer widths must be positive");
    if (!(learning_rate > 0.0 && std::isfinite(learning_rate))) throw ConfigError("learning_rate must be positive");
    if (batch_size == 0) throw ConfigError("batch_size must be positive");
    if (!(corruption_fraction >= 0.0 && corruption_fraction <= 1.0))
        throw ConfigError("corruption_fraction must lie in [0, 1]");
    if (init_scale && !(*init_scale >= 0.0 && std::isfinite(*init_scale)))
        throw ConfigError("init_scale must be finite and non-negative");
}

namespace {

struct SgdStreams {
    Rng shuffle;
    Rng noise;
};

void apply_step(Network& net, const Gradients& g, double lr) {
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto& w = net.layers[l].weights.data();
        const auto& gw = g.weights[l].data();
        for (std::size_t k = 0; k < w.size(); ++k) w[k] -= lr * gw[k];
        auto& b = net.layers[l].biases;
        for (std::size_t k = 0; k < b.size(); ++k) b[k] -= lr * g.biases[l][k];
    }
    // Decoder copies already received the transposed update; re-derive them so the
    // tie holds exactly regardless of rounding order.
    sync_tied(net);
}

/// Runs `epochs` passes of minibatch SGD over the rows of `data`; returns epoch-mean losses.
std::vector<double> run_sgd(Network& net, const Matrix& data, const TrainConfig& cfg, bool denoising,
                            SgdStreams& streams) {
    const std::size_t n = data.rows();
    std::vector<std::size_t> order(n);
    std::vector<double> history;
    history.reserve(cfg.epochs);
    std::vector<std::vector<double>> inputs, targets;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[streams.shuffle.below(i)]);

        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            inputs.clear();
            targets.clear();
            for (std::size_t k = start; k < stop; ++k) {
                const auto row = data.row(order[k]);
                targets.emplace_back(row.begin(), row.end());
                inputs.push_back(denoising ? corrupt(row, cfg.corruption_fraction, streams.noise) : targets.back());
            }
            Gradients g = Gradients::zeros_like(net);
            epoch_loss += accumulate_gradients(net, inputs, targets, g);
            apply_step(net, g, cfg.learning_rate);
        }
        history.push_back(epoch_loss / static_cast<double>(n));
    }
    return history;
}

Matrix encode_rows(const Layer& layer, const Matrix& data) {
    Network single;
    single.input_dim = layer.fan_in();
    single.layers.push_back(layer);
    Matrix out(data.rows(), layer.fan_out());
    for (std::size_t r = 0; r < data.rows(); ++r) {
        const ForwardTrace t = forward(single, data.row(r));
        std::copy(t.output().begin(), t.output().end(), out.row(r).begin());
    }
    return out;
}

/// Greedy layerwise pretraining: each encoder layer and its mirrored decoder layer are
/// trained as a shallow autoencoder on the previous encoder layer's codes.
void pretrain_layers(Network& net, const Matrix& data, const TrainConfig& cfg, bool denoising,
                     SgdStreams& streams) {
    const std::size_t n = net.layers.size();
    Matrix codes = data;
    for (std::size_t i = 0; i < n / 2; ++i) {
        Network shallow;
        shallow.input_dim = net.layers[i].fan_in();
        shallow.tied = net.tied;
        shallow.layers = {net.layers[i], net.layers[n - 1 - i]};
        run_sgd(shallow, codes, cfg, denoising, streams);
        net.layers[i] = shallow.layers[0];
        net.layers[n - 1 - i] = shallow.layers[1];
        codes = encode_rows(net.layers[i], codes);
    }
}

}  // namespace

TrainResult train(const Matrix& data, const TrainConfig& cfg, bool denoising) {
    cfg.validate();
    if (data.cols() == 0) throw ConfigError("training data has no features");
    for (std::size_t r = 0; r < data.rows(); ++r)
        for (std::size_t c = 0; c < data.cols(); ++c) {
            const double v = data(r, c);
            if (std::isnan(v))
                throw IncompleteTrainingData("training record " + std::to_string(r) + " has a missing value in column " +
                                             std::to_string(c));
            if (!(v >= 0.0 && v <= 1.0))
                throw NormalizationError("training value at record " + std::to_string(r) + ", column " +
                                         std::to_string(c) + " lies outside [0, 1]");
        }

    TrainResult result;
    result.network = init_network(data.cols(), cfg.hidden_sizes, cfg.tied, cfg.init_scale, derive_seed(cfg.seed, 1));
    result.network.layers.back().activation = cfg.output_activation;
    if (cfg.epochs == 0) return result;
    if (data.rows() == 0) throw IncompleteTrainingData("no complete training records");

    SgdStreams streams{Rng(derive_seed(cfg.seed, 2)), Rng(derive_seed(cfg.seed, 3))};
    if (cfg.pretrain) pretrain_layers(result.network, data, cfg, denoising, streams);
    result.loss_history = run_sgd(result.network, data, cfg, denoising, streams);
    return result;
}

}  // namespace aeimpute::net
