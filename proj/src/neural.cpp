#include "atroc/neural.hpp"

#include "atroc/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace atroc {

std::string to_string(Activation a) {
    switch (a) {
    case Activation::identity: return "identity";
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::tanh_act: return "tanh";
    }
    return "identity";
}

Activation activation_from_string(const std::string& s) {
    if (s == "identity") return Activation::identity;
    if (s == "leaky_relu") return Activation::leaky_relu;
    if (s == "tanh") return Activation::tanh_act;
    throw std::invalid_argument("unknown activation: " + s);
}

std::int64_t NetworkSpec::param_count() const {
    std::int64_t n = 0;
    for (int i = 0; i < layer_count(); ++i) {
        n += static_cast<std::int64_t>(dims[i]) * dims[i + 1] + dims[i + 1];
    }
    return n;
}

NetworkSpec NetworkSpec::mlp(std::vector<int> dims, Activation hidden_act,
                             std::uint64_t seed, double leaky_alpha) {
    NetworkSpec spec;
    spec.dims = std::move(dims);
    spec.activations.assign(spec.layer_count(), hidden_act);
    spec.activations.back() = Activation::identity;
    spec.param_seed = seed;
    spec.leaky_alpha = leaky_alpha;
    return spec;
}

bool operator==(const NetworkSpec& a, const NetworkSpec& b) {
    return a.dims == b.dims && a.activations == b.activations &&
           a.param_seed == b.param_seed && a.leaky_alpha == b.leaky_alpha;
}

Mlp make_mlp(const NetworkSpec& spec) {
    if (spec.layer_count() < 1) {
        throw std::invalid_argument("make_mlp: spec needs at least one layer");
    }
    if (spec.activations.size() != static_cast<size_t>(spec.layer_count())) {
        throw std::invalid_argument("make_mlp: one activation per layer required");
    }
    Mlp net;
    net.spec = spec;
    RandomStream rng(spec.param_seed);
    net.layers.resize(spec.layer_count());
    for (int i = 0; i < spec.layer_count(); ++i) {
        const int in = spec.dims[i];
        const int out = spec.dims[i + 1];
        const double limit = std::sqrt(6.0 / in);
        DenseLayer& layer = net.layers[i];
        layer.W.resize(out, in);
        for (Eigen::Index j = 0; j < layer.W.size(); ++j) {
            layer.W.data()[j] = rng.uniform(-limit, limit);
        }
        layer.b = Vec::Zero(out);
    }
    return net;
}

Vec flatten_params(const Mlp& net) {
    Vec flat(net.spec.param_count());
    Eigen::Index pos = 0;
    for (const DenseLayer& layer : net.layers) {
        flat.segment(pos, layer.W.size()) =
            Eigen::Map<const Vec>(layer.W.data(), layer.W.size());
        pos += layer.W.size();
        flat.segment(pos, layer.b.size()) = layer.b;
        pos += layer.b.size();
    }
    return flat;
}

void unflatten_params(Mlp& net, const Eigen::Ref<const Vec>& flat) {
    if (flat.size() != net.spec.param_count()) {
        throw std::invalid_argument("unflatten_params: size mismatch");
    }
    Eigen::Index pos = 0;
    for (DenseLayer& layer : net.layers) {
        Eigen::Map<Vec>(layer.W.data(), layer.W.size()) =
            flat.segment(pos, layer.W.size());
        pos += layer.W.size();
        layer.b = flat.segment(pos, layer.b.size());
        pos += layer.b.size();
    }
}

void MlpGrads::init_like(const Mlp& net) {
    dW.resize(net.layers.size());
    db.resize(net.layers.size());
    for (size_t i = 0; i < net.layers.size(); ++i) {
        dW[i] = Mat::Zero(net.layers[i].W.rows(), net.layers[i].W.cols());
        db[i] = Vec::Zero(net.layers[i].b.size());
    }
}

void MlpGrads::set_zero() {
    for (auto& g : dW) g.setZero();
    for (auto& g : db) g.setZero();
}

void MlpGrads::scale(double s) {
    for (auto& g : dW) g *= s;
    for (auto& g : db) g *= s;
}

bool MlpGrads::all_finite() const {
    for (const auto& g : dW) {
        if (!g.allFinite()) return false;
    }
    for (const auto& g : db) {
        if (!g.allFinite()) return false;
    }
    return true;
}

namespace {

Mat apply_activation(Activation act, const Mat& pre, double alpha) {
    switch (act) {
    case Activation::identity:
        return pre;
    case Activation::leaky_relu:
        return pre.unaryExpr([alpha](double v) { return v > 0.0 ? v : alpha * v; });
    case Activation::tanh_act:
        return pre.array().tanh().matrix();
    }
    return pre;
}

Mat activation_grad(Activation act, const Mat& pre, const Mat& upstream,
                    double alpha) {
    switch (act) {
    case Activation::identity:
        return upstream;
    case Activation::leaky_relu:
        return upstream.cwiseProduct(pre.unaryExpr(
            [alpha](double v) { return v > 0.0 ? 1.0 : alpha; }));
    case Activation::tanh_act:
        return upstream.cwiseProduct(
            (1.0 - pre.array().tanh().square()).matrix());
    }
    return upstream;
}

} // namespace

Mat forward(const Mlp& net, const Mat& x, MlpCache& cache) {
    if (x.rows() != net.spec.input_dim()) {
        throw std::invalid_argument("forward: input dim " + std::to_string(x.rows()) +
                                    " != spec dim " +
                                    std::to_string(net.spec.input_dim()));
    }
    const int n = net.spec.layer_count();
    cache.inputs.resize(n);
    cache.pre.resize(n);
    Mat cur = x;
    for (int i = 0; i < n; ++i) {
        cache.inputs[i] = cur;
        cache.pre[i] = (net.layers[i].W * cur).colwise() + net.layers[i].b;
        cur = apply_activation(net.spec.activations[i], cache.pre[i],
                               net.spec.leaky_alpha);
    }
    cache.valid = true;
    return cur;
}

Mat backward(const Mlp& net, const Mat& upstream, const MlpCache& cache,
             MlpGrads* grads) {
    if (!cache.valid) {
        throw std::logic_error("backward: no cached forward pass");
    }
    Mat delta = upstream;
    for (int i = net.spec.layer_count() - 1; i >= 0; --i) {
        delta = activation_grad(net.spec.activations[i], cache.pre[i], delta,
                                net.spec.leaky_alpha);
        if (grads != nullptr) {
            grads->dW[i].noalias() += delta * cache.inputs[i].transpose();
            grads->db[i] += delta.rowwise().sum();
        }
        delta = (net.layers[i].W.transpose() * delta).eval();
    }
    return delta;
}

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

GaussianLatent encode(const Mlp& encoder, const Mat& x, EncoderCache& cache) {
    const Mat out = forward(encoder, x, cache.mlp);
    if (out.rows() % 4 != 0) {
        throw std::invalid_argument("encode: encoder output dim must be 4k");
    }
    const Eigen::Index two_k = out.rows() / 2;
    GaussianLatent lat;
    lat.mu = out.topRows(two_k);
    cache.raw_std = out.bottomRows(two_k);
    lat.sigma = cache.raw_std.unaryExpr(
        [](double v) { return softplus(v) + 1e-6; });
    return lat;
}

void encode_backward(const Mlp& encoder, const Mat& d_mu, const Mat& d_sigma,
                     const EncoderCache& cache, MlpGrads& grads) {
    const Eigen::Index two_k = d_mu.rows();
    Mat upstream(2 * two_k, d_mu.cols());
    upstream.topRows(two_k) = d_mu;
    upstream.bottomRows(two_k) = d_sigma.cwiseProduct(
        cache.raw_std.unaryExpr([](double v) { return sigmoid(v); }));
    backward(encoder, upstream, cache.mlp, &grads);
}

Mat sample_latent(const GaussianLatent& lat, RandomStream& rng, Mat* eps_out) {
    Mat eps(lat.mu.rows(), lat.mu.cols());
    for (Eigen::Index c = 0; c < eps.cols(); ++c) {
        rng.fill_normal(eps.col(c));
    }
    Mat z = lat.mu + lat.sigma.cwiseProduct(eps);
    if (eps_out != nullptr) *eps_out = std::move(eps);
    return z;
}

SymbolBlock sample_latent_block(const GaussianLatent& lat, Eigen::Index column,
                                RandomStream& rng) {
    Vec eps(lat.mu.rows());
    rng.fill_normal(eps);
    const Vec z = lat.mu.col(column) + lat.sigma.col(column).cwiseProduct(eps);
    return pack_symbols(z);
}

void AdamState::init_like(const Mlp& net) {
    mW.resize(net.layers.size());
    vW.resize(net.layers.size());
    mb.resize(net.layers.size());
    vb.resize(net.layers.size());
    for (size_t i = 0; i < net.layers.size(); ++i) {
        mW[i] = Mat::Zero(net.layers[i].W.rows(), net.layers[i].W.cols());
        vW[i] = Mat::Zero(net.layers[i].W.rows(), net.layers[i].W.cols());
        mb[i] = Vec::Zero(net.layers[i].b.size());
        vb[i] = Vec::Zero(net.layers[i].b.size());
    }
    t = 0;
}

namespace {

template <typename T>
void adam_update(T& param, const T& grad, T& m, T& v, const AdamParams& p,
                 double bc1, double bc2) {
    m = p.beta1 * m + (1.0 - p.beta1) * grad;
    v = p.beta2 * v + (1.0 - p.beta2) * grad.cwiseProduct(grad);
    param -= (p.lr / bc1) *
             m.cwiseQuotient(((v / bc2).cwiseSqrt().array() + p.eps).matrix());
}

} // namespace

void adam_step(Mlp& net, const MlpGrads& grads, AdamState& state,
               const AdamParams& params) {
    if (!grads.all_finite()) {
        throw NumericalError("adam_step: non-finite gradient");
    }
    state.t += 1;
    const double bc1 = 1.0 - std::pow(params.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(params.beta2, static_cast<double>(state.t));
    for (size_t i = 0; i < net.layers.size(); ++i) {
        adam_update(net.layers[i].W, grads.dW[i], state.mW[i], state.vW[i],
                    params, bc1, bc2);
        adam_update(net.layers[i].b, grads.db[i], state.mb[i], state.vb[i],
                    params, bc1, bc2);
    }
}

} // namespace atroc
