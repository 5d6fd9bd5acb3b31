#ifndef ATROC_NEURAL_HPP
#define ATROC_NEURAL_HPP

#include "atroc/rng.hpp"
#include "atroc/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace atroc {

enum class Activation { identity, leaky_relu, tanh_act };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

/// Dense-stack architecture: dims = [in, h1, ..., out], one activation per
/// layer. The spec plus its seed fully determines every parameter.
struct NetworkSpec {
    std::vector<int> dims;
    std::vector<Activation> activations;
    std::uint64_t param_seed = 0;
    double leaky_alpha = 0.2;

    int layer_count() const { return static_cast<int>(dims.size()) - 1; }
    int input_dim() const { return dims.front(); }
    int output_dim() const { return dims.back(); }
    std::int64_t param_count() const;

    /// [in, hidden..., out] with `hidden_act` everywhere except the identity
    /// output layer.
    static NetworkSpec mlp(std::vector<int> dims, Activation hidden_act,
                           std::uint64_t seed, double leaky_alpha = 0.2);
};

bool operator==(const NetworkSpec& a, const NetworkSpec& b);

struct DenseLayer {
    Mat W; // out x in
    Vec b;
};

struct Mlp {
    NetworkSpec spec;
    std::vector<DenseLayer> layers;
};

/// He-uniform initialization drawn from the spec's seed.
Mlp make_mlp(const NetworkSpec& spec);

/// Flat parameter order: per layer, W in column-major storage order, then b.
Vec flatten_params(const Mlp& net);
void unflatten_params(Mlp& net, const Eigen::Ref<const Vec>& flat);

/// Cached activations from one forward pass; required by backward.
struct MlpCache {
    std::vector<Mat> inputs; // inputs[i] feeds layer i
    std::vector<Mat> pre;    // pre-activation of layer i
    bool valid = false;
};

struct MlpGrads {
    std::vector<Mat> dW;
    std::vector<Vec> db;

    void init_like(const Mlp& net);
    void set_zero();
    void scale(double s);
    bool all_finite() const;
};

/// Columns are samples. Deterministic; the cache holds what backward needs.
/// Throws std::invalid_argument on an input-dimension mismatch.
Mat forward(const Mlp& net, const Mat& x, MlpCache& cache);

/// Exact reverse-mode gradients for the cached forward pass. Parameter
/// gradients accumulate into `grads` when given (pass nullptr for frozen
/// networks: input gradient only). Returns the gradient w.r.t. the input.
/// Throws std::logic_error when called without a cached forward.
Mat backward(const Mlp& net, const Mat& upstream, const MlpCache& cache,
             MlpGrads* grads);

/// Per-sample mean/std of the stochastic encoder head. Columns are samples;
/// rows pair (2i, 2i+1) with complex symbol i.
struct GaussianLatent {
    Mat mu;    // 2k x batch
    Mat sigma; // 2k x batch, strictly positive
};

struct EncoderCache {
    MlpCache mlp;
    Mat raw_std; // pre-softplus rows, needed for the sigma backward
};

/// Runs the encoder MLP (output dim 4k) and splits the output into the first
/// 2k rows (mu) and last 2k rows mapped through softplus(x) + 1e-6 (sigma).
GaussianLatent encode(const Mlp& encoder, const Mat& x, EncoderCache& cache);

/// Backpropagates (d mu, d sigma) through the split/softplus head into the
/// encoder parameters.
void encode_backward(const Mlp& encoder, const Mat& d_mu, const Mat& d_sigma,
                     const EncoderCache& cache, MlpGrads& grads);

/// z = mu + sigma .* eps with eps ~ N(0, I); differentiable w.r.t. mu and
/// sigma through the stored eps. Columns drawn in order, one column fully
/// before the next.
Mat sample_latent(const GaussianLatent& lat, RandomStream& rng, Mat* eps_out);

/// Single-sample convenience: one latent column to one complex block.
SymbolBlock sample_latent_block(const GaussianLatent& lat, Eigen::Index column,
                                RandomStream& rng);

double softplus(double x);
double sigmoid(double x);

struct AdamParams {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<Mat> mW, vW;
    std::vector<Vec> mb, vb;
    std::int64_t t = 0;

    void init_like(const Mlp& net);
};

/// One Adam update. Throws NumericalError on a non-finite gradient.
void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state,
               const AdamParams& params);

} // namespace atroc

#endif // ATROC_NEURAL_HPP
