#include "atroc/objectives.hpp"

#include "atroc/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace atroc {

VibWeights beta_transform(double beta1, double beta2) {
    if (!(beta1 > 0.0) || !(beta2 > 0.0)) {
        throw std::invalid_argument("beta_transform: beta1 and beta2 must be positive");
    }
    VibWeights w;
    if (beta2 == 1.0) {
        w.classic_ib = true;
        w.beta1_hat = beta1;
        w.beta2_hat = 0.0;
    } else {
        w.beta1_hat = beta1 / (1.0 - beta2);
        w.beta2_hat = beta2 / (1.0 - beta2);
    }
    return w;
}

double breakdown_total(double task, double rate, double alignment, double quant,
                       const VibWeights& w) {
    return task + w.beta1_hat * rate + w.alignment_coeff() * alignment +
           w.beta_q * quant;
}

double kl_diag_gauss_to_std(const Eigen::Ref<const Vec>& mu,
                            const Eigen::Ref<const Vec>& sigma) {
    if ((sigma.array() <= 0.0).any()) {
        throw std::invalid_argument("kl_diag_gauss_to_std: sigma must be positive");
    }
    return 0.5 * (mu.array().square() + sigma.array().square() - 1.0 -
                  2.0 * sigma.array().log())
                     .sum();
}

void kl_diag_gauss_to_std_grad(const Eigen::Ref<const Vec>& mu,
                               const Eigen::Ref<const Vec>& sigma,
                               Eigen::Ref<Vec> d_mu, Eigen::Ref<Vec> d_sigma) {
    d_mu = mu;
    d_sigma = (sigma.array() - sigma.array().inverse()).matrix();
}

double kl_monte_carlo(const Eigen::Ref<const Vec>& mu,
                      const Eigen::Ref<const Vec>& sigma, int n_samples,
                      RandomStream& rng) {
    const Eigen::Index dim = mu.size();
    Vec eps(dim);
    double sum = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        rng.fill_normal(eps);
        const Vec z = mu + sigma.cwiseProduct(eps);
        double log_p = 0.0, log_q = 0.0;
        for (Eigen::Index i = 0; i < dim; ++i) {
            const double d = z[i] - mu[i];
            log_p += -0.5 * std::log(2.0 * M_PI) - std::log(sigma[i]) -
                     d * d / (2.0 * sigma[i] * sigma[i]);
            log_q += -0.5 * std::log(2.0 * M_PI) - z[i] * z[i] / 2.0;
        }
        sum += log_p - log_q;
    }
    return sum / n_samples;
}

double neg_log_gauss(const Eigen::Ref<const Vec>& a,
                     const Eigen::Ref<const Vec>& mu, double sigma_c) {
    if (a.size() != mu.size()) {
        throw std::invalid_argument("neg_log_gauss: shape mismatch");
    }
    const double d = static_cast<double>(a.size());
    return (a - mu).squaredNorm() / (2.0 * sigma_c * sigma_c) +
           d * std::log(sigma_c) + 0.5 * d * std::log(2.0 * M_PI);
}

void VibGrads::init_like(const LossNetworks& nets) {
    encoder.init_like(*nets.encoder);
    reshaper.init_like(*nets.reshaper);
}

namespace {

struct ColumnRealization {
    SymbolBlock z_bar; // what the backward formula differentiates through
    ChannelRealization realization;
};

} // namespace

LossBreakdown vib_loss(const Mat& x, const Mat& a, const LossNetworks& nets,
                       const LossChannel& channel, const VibWeights& weights,
                       const MCConfig& mc, double sigma_c, RandomStream& rng,
                       ObjectiveMode mode, VibGrads* grads,
                       const Constellation* quant_c) {
    const Eigen::Index omega = x.cols();
    if (omega < 1 || mc.j1 < 1 || mc.j2 < 1) {
        throw std::invalid_argument("vib_loss: omega, j1, j2 must be >= 1");
    }
    if (mode == ObjectiveMode::task && nets.agent == nullptr) {
        throw std::invalid_argument("vib_loss: task mode needs an agent");
    }

    EncoderCache enc_cache;
    const GaussianLatent lat = encode(*nets.encoder, x, enc_cache);
    const Eigen::Index two_k = lat.mu.rows();

    double rate_sum = 0.0;
    for (Eigen::Index i = 0; i < omega; ++i) {
        rate_sum += kl_diag_gauss_to_std(lat.mu.col(i), lat.sigma.col(i));
    }
    const double rate = rate_sum / static_cast<double>(omega);

    const int draws =
        mc.resample_alignment ? mc.j2 + mc.j1 : std::max(mc.j1, mc.j2);
    const double inv_task = 1.0 / (static_cast<double>(omega) * mc.j2);
    const double inv_align = 1.0 / (static_cast<double>(omega) * mc.j1);

    double task_sum = 0.0;
    double align_sum = 0.0;
    double quant_sum = 0.0;

    Mat d_mu, d_sigma;
    if (grads != nullptr) {
        d_mu = Mat::Zero(two_k, omega);
        d_sigma = Mat::Zero(two_k, omega);
    }

    std::vector<ColumnRealization> cols(omega);
    for (int j = 0; j < draws; ++j) {
        const bool for_task = mc.resample_alignment ? j < mc.j2 : j < mc.j2;
        const bool for_align = mc.resample_alignment ? j >= mc.j2 : j < mc.j1;

        Mat eps;
        const Mat z = sample_latent(lat, rng, &eps);

        Mat z_hat(two_k, omega);
        for (Eigen::Index i = 0; i < omega; ++i) {
            const SymbolBlock zc = pack_symbols(z.col(i));
            if (channel.modulated()) {
                ModulatedPassResult pass = modulated_pass(
                    zc, *channel.constellation, channel.kind, channel.sigma_n2,
                    channel.p_target, rng, channel.skip_quantize);
                z_hat.col(i) = unpack_symbols(pass.z_hat);
                cols[i].z_bar = std::move(pass.z_bar);
                cols[i].realization = std::move(pass.realization);
            } else {
                ChannelPassResult pass = analog_pass(
                    zc, channel.kind, channel.sigma_n2, channel.p_target, rng);
                z_hat.col(i) = unpack_symbols(pass.z_hat);
                cols[i].z_bar = zc;
                cols[i].realization = std::move(pass.realization);
            }
        }

        MlpCache reshaper_cache;
        const Mat y = forward(*nets.reshaper, z_hat, reshaper_cache);

        MlpCache agent_cache;
        const bool task_mode = mode == ObjectiveMode::task;
        const Mat& target = task_mode ? a : x;
        const Mat pred =
            task_mode ? forward(*nets.agent, y, agent_cache) : y;

        double nll_sum = 0.0;
        for (Eigen::Index i = 0; i < omega; ++i) {
            nll_sum += neg_log_gauss(target.col(i), pred.col(i), sigma_c);
        }
        if (for_task) task_sum += nll_sum;
        if (for_align) align_sum += nll_sum;

        if (quant_c != nullptr && for_task) {
            for (Eigen::Index i = 0; i < omega; ++i) {
                quant_sum += quantization_loss(pack_symbols(z.col(i)), *quant_c);
            }
        }

        if (grads != nullptr) {
            const double coeff =
                (for_task ? inv_task : 0.0) +
                (for_align ? weights.alignment_coeff() * inv_align : 0.0);
            const bool quant_grad =
                quant_c != nullptr && for_task && weights.beta_q != 0.0;
            if (coeff != 0.0 || quant_grad) {
                Mat d_z = Mat::Zero(two_k, omega);
                if (coeff != 0.0) {
                    const Mat d_pred =
                        (coeff / (sigma_c * sigma_c)) * (pred - target);
                    const Mat d_y =
                        task_mode
                            ? backward(*nets.agent, d_pred, agent_cache, nullptr)
                            : d_pred;
                    const Mat d_zhat =
                        backward(*nets.reshaper, d_y, reshaper_cache,
                                 &grads->reshaper);
                    for (Eigen::Index i = 0; i < omega; ++i) {
                        const SymbolBlock g = channel_backward(
                            pack_symbols(d_zhat.col(i)), cols[i].z_bar,
                            cols[i].realization, channel.p_target);
                        d_z.col(i) = unpack_symbols(g);
                    }
                }
                if (quant_grad) {
                    const double qc = weights.beta_q * inv_task;
                    for (Eigen::Index i = 0; i < omega; ++i) {
                        d_z.col(i) += qc * unpack_symbols(
                                               quantization_loss_grad_symbols(
                                                   pack_symbols(z.col(i)),
                                                   *quant_c));
                    }
                }
                d_mu += d_z;
                d_sigma += d_z.cwiseProduct(eps);
            }
        }
    }

    LossBreakdown out;
    out.task_term = task_sum * inv_task;
    out.alignment_term = align_sum * inv_align;
    out.rate_term = rate;
    out.quant_term = quant_c != nullptr ? quant_sum * inv_task : 0.0;
    out.total = breakdown_total(out.task_term, out.rate_term,
                                out.alignment_term, out.quant_term, weights);

    if (grads != nullptr) {
        const double rate_coeff = weights.beta1_hat / static_cast<double>(omega);
        Vec g_mu(two_k), g_sigma(two_k);
        for (Eigen::Index i = 0; i < omega; ++i) {
            kl_diag_gauss_to_std_grad(lat.mu.col(i), lat.sigma.col(i), g_mu,
                                      g_sigma);
            d_mu.col(i) += rate_coeff * g_mu;
            d_sigma.col(i) += rate_coeff * g_sigma;
        }
        encode_backward(*nets.encoder, d_mu, d_sigma, enc_cache, grads->encoder);
    }
    return out;
}

LossBreakdown vib_q_loss(const Mat& x, const Mat& a, const LossNetworks& nets,
                         const LossChannel& channel, const VibWeights& weights,
                         const MCConfig& mc, double sigma_c,
                         const Constellation& quant_c, RandomStream& rng,
                         ObjectiveMode mode, VibGrads* grads) {
    return vib_loss(x, a, nets, channel, weights, mc, sigma_c, rng, mode, grads,
                    &quant_c);
}

} // namespace atroc
