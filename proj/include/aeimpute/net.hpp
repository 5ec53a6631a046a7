#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "aeimpute/matrix.hpp"
#include "aeimpute/random.hpp"

namespace aeimpute::net {

/// Default weight scale is kDefaultInitGain / sqrt(fan_in). Smaller gains leave deep
/// sigmoid stacks on a long plateau under plain SGD.
inline constexpr double kDefaultInitGain = 2.0;

enum class Activation { Sigmoid, Identity };

double activate(Activation kind, double t) noexcept;

/// Derivative of the activation expressed through its output value `a`.
double activation_slope(Activation kind, double a) noexcept;

struct Layer {
    Matrix weights;               // [fan_out x fan_in]
    std::vector<double> biases;   // [fan_out]
    Activation activation = Activation::Sigmoid;

    std::size_t fan_in() const noexcept { return weights.cols(); }
    std::size_t fan_out() const noexcept { return weights.rows(); }

    friend bool operator==(const Layer&, const Layer&) = default;
};

/// A symmetric autoencoder. When `tied`, decoder layer `size()-1-i` carries the
/// transpose of encoder layer `i`'s weights; biases stay independent.
struct Network {
    std::size_t input_dim = 0;
    bool tied = false;
    std::vector<Layer> layers;

    std::size_t output_dim() const noexcept { return layers.empty() ? 0 : layers.back().fan_out(); }

    friend bool operator==(const Network&, const Network&) = default;
};

/// Throws ShapeError/ConfigError when the network violates its invariants.
void validate(const Network& net);

/// Rewrites every decoder weight matrix as the transpose of its mirrored encoder matrix.
void sync_tied(Network& net);

/// Builds input_dim -> hidden... -> reverse(hidden minus last) -> input_dim with all-sigmoid layers.
/// Weights are uniform in [-scale, scale], biases zero. Without `init_scale`, each layer
/// uses kDefaultInitGain / sqrt(fan_in).
Network init_network(std::size_t input_dim, std::span<const std::size_t> hidden_sizes, bool tied,
                     std::optional<double> init_scale, std::uint64_t seed);

struct ForwardTrace {
    std::vector<double> input;
    std::vector<std::vector<double>> pre_activations;
    std::vector<std::vector<double>> activations;

    const std::vector<double>& output() const { return activations.back(); }
};

ForwardTrace forward(const Network& net, std::span<const double> x);

/// Sum of squared differences.
double reconstruction_loss(std::span<const double> x, std::span<const double> z);

/// reconstruction_loss(x, forward(net, x).output()) without keeping the trace.
double reconstruction_error(const Network& net, std::span<const double> x);

/// Masking noise: each coordinate is zeroed independently with probability `nu`.
std::vector<double> corrupt(std::span<const double> x, double nu, Rng& rng);

/// Gradient container shaped like the network's parameters.
struct Gradients {
    std::vector<Matrix> weights;
    std::vector<std::vector<double>> biases;

    static Gradients zeros_like(const Network& net);
};

/// Gradient of the mean reconstruction loss over `batch` (input is also the target).
Gradients grad_params(const Network& net, std::span<const std::vector<double>> batch);

/// Gradient of the mean of loss(targets[i], forward(inputs[i]).output()). For tied
/// networks the encoder slot holds the combined shared gradient and the decoder slot its transpose.
Gradients grad_params(const Network& net, std::span<const std::vector<double>> inputs,
                      std::span<const std::vector<double>> targets);

/// Total derivative of loss(x, forward(net, x).output()) w.r.t. x at `free_indices`.
std::vector<double> grad_input(const Network& net, std::span<const double> x,
                               std::span<const std::size_t> free_indices);

struct TrainConfig {
    std::vector<std::size_t> hidden_sizes{5, 3};
    double learning_rate = 0.5;
    std::size_t epochs = 200;
    std::size_t batch_size = 5;
    double corruption_fraction = 0.1;
    std::optional<double> init_scale;
    std::uint64_t seed = 0;
    bool pretrain = false;
    bool tied = false;
    Activation output_activation = Activation::Sigmoid;

    void validate() const;
};

struct TrainResult {
    Network network;
    std::vector<double> loss_history;  // epoch-mean reconstruction loss of end-to-end training
};

/// Minibatch SGD on the autoencoder objective. With `denoising`, inputs are corrupted
/// with masking noise while the clean record stays the target.
TrainResult train(const Matrix& data, const TrainConfig& cfg, bool denoising);

}  // namespace aeimpute::net
