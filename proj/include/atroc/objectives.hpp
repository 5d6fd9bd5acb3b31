#ifndef ATROC_OBJECTIVES_HPP
#define ATROC_OBJECTIVES_HPP

#include "atroc/channel.hpp"
#include "atroc/constellation.hpp"
#include "atroc/neural.hpp"
#include "atroc/rng.hpp"
#include "atroc/types.hpp"

namespace atroc {

/// Weights of the extended objective. classic_ib marks the beta2 = 1 special
/// case, where the alignment coefficient is exactly zero and beta1_hat holds
/// the raw rate weight.
struct VibWeights {
    double beta1_hat = 1.0;
    double beta2_hat = 0.0;
    double beta_q = 0.0;
    bool classic_ib = false;

    double alignment_coeff() const { return classic_ib ? 0.0 : beta2_hat; }
};

/// For beta2 != 1: beta1_hat = beta1/(1-beta2), beta2_hat = beta2/(1-beta2).
/// beta2 = 1 collapses to the classic bottleneck with rate weight beta1.
VibWeights beta_transform(double beta1, double beta2);

struct LossBreakdown {
    double task_term = 0;
    double rate_term = 0;
    double alignment_term = 0;
    double quant_term = 0;
    double total = 0;
};

/// The one place the total is assembled; tests recompute through this same
/// function so the identity holds bit for bit.
double breakdown_total(double task, double rate, double alignment, double quant,
                       const VibWeights& w);

struct MCConfig {
    int j1 = 1;    // reconstructed-symbol samples (alignment term)
    int j2 = 1;    // task-specific-data samples (task term)
    int omega = 1; // mini-batch size
    /// When false (default) the alignment term reuses the task-term draws;
    /// when true it gets its own fresh draws.
    bool resample_alignment = false;
};

/// KL(N(mu, diag(sigma^2)) || N(0, I)) = 0.5 sum(mu^2 + sigma^2 - 1 - 2 ln sigma).
/// Throws std::invalid_argument on non-positive sigma.
double kl_diag_gauss_to_std(const Eigen::Ref<const Vec>& mu,
                            const Eigen::Ref<const Vec>& sigma);

/// d KL / d mu = mu, d KL / d sigma = sigma - 1/sigma.
void kl_diag_gauss_to_std_grad(const Eigen::Ref<const Vec>& mu,
                               const Eigen::Ref<const Vec>& sigma,
                               Eigen::Ref<Vec> d_mu, Eigen::Ref<Vec> d_sigma);

/// Monte Carlo estimate (1/N) sum [ln p(z) - ln q(z)], z ~ N(mu, sigma^2),
/// q = N(0, I). Validates the analytic form.
double kl_monte_carlo(const Eigen::Ref<const Vec>& mu,
                      const Eigen::Ref<const Vec>& sigma, int n_samples,
                      RandomStream& rng);

/// -ln N(a; mu, sigma_c^2 I) = ||a-mu||^2/(2 sigma_c^2) + d ln sigma_c
///                             + (d/2) ln 2pi, constants retained.
double neg_log_gauss(const Eigen::Ref<const Vec>& a,
                     const Eigen::Ref<const Vec>& mu, double sigma_c);

/// Channel configuration of one loss evaluation. A null constellation is the
/// analog (pre-training) path; skip_quantize short-circuits both quantizers
/// of the modulated path, making it bit-identical to analog.
struct LossChannel {
    ChannelKind kind = ChannelKind::awgn;
    double sigma_n2 = 0.0;
    double p_target = 1.0;
    const Constellation* constellation = nullptr;
    bool skip_quantize = false;

    bool modulated() const { return constellation != nullptr; }
};

/// What the task term measures: the frozen agent's Gaussian likelihood of
/// the true action (task-oriented mode), or the Gaussian likelihood of the
/// input under the reshaped data (reconstruction baseline).
enum class ObjectiveMode { task, reconstruction };

struct LossNetworks {
    const Mlp* encoder = nullptr;
    const Mlp* reshaper = nullptr;
    const Mlp* agent = nullptr; // frozen; unused in reconstruction mode
};

struct VibGrads {
    MlpGrads encoder;
    MlpGrads reshaper;

    void init_like(const LossNetworks& nets);
};

/// Monte Carlo estimate of the extended variational objective on one batch
/// (columns of x / a are samples). Draw order per pass: latent eps for all
/// columns, then per column the channel draw (h, then noise). When `grads`
/// is non-null, exact reverse-mode gradients for encoder and reshaper are
/// accumulated (channel noise and h constant; straight-through identity at
/// the quantizers of the modulated path). quant_c, when non-null, adds the
/// quantization penalty beta_q * L_Q(z; quant_c) on the pre-quantization
/// encoder samples.
LossBreakdown vib_loss(const Mat& x, const Mat& a, const LossNetworks& nets,
                       const LossChannel& channel, const VibWeights& weights,
                       const MCConfig& mc, double sigma_c, RandomStream& rng,
                       ObjectiveMode mode = ObjectiveMode::task,
                       VibGrads* grads = nullptr,
                       const Constellation* quant_c = nullptr);

/// Fine-tuning objective: vib_loss plus the quantization term at weight
/// beta_q, measured on the pre-quantization encoder output.
LossBreakdown vib_q_loss(const Mat& x, const Mat& a, const LossNetworks& nets,
                         const LossChannel& channel, const VibWeights& weights,
                         const MCConfig& mc, double sigma_c,
                         const Constellation& quant_c, RandomStream& rng,
                         ObjectiveMode mode = ObjectiveMode::task,
                         VibGrads* grads = nullptr);

} // namespace atroc

#endif // ATROC_OBJECTIVES_HPP
