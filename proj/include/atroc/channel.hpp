#ifndef ATROC_CHANNEL_HPP
#define ATROC_CHANNEL_HPP

#include "atroc/constellation.hpp"
#include "atroc/rng.hpp"
#include "atroc/types.hpp"

#include <optional>
#include <string>

namespace atroc {

enum class ChannelKind { awgn, rayleigh };

std::string to_string(ChannelKind kind);
ChannelKind channel_kind_from_string(const std::string& s);

struct ChannelConfig {
    ChannelKind kind = ChannelKind::awgn;
    double snr_db = 10.0;
    double p_target = 1.0; // average symbol power at the channel input
};

/// Everything the receiver is assumed to know about one transmitted block:
/// the coefficient h (full CSI), the realized noise, and the transmitter-side
/// power of the quantized block (side information, never estimated).
struct ChannelRealization {
    ComplexSymbol h{1.0, 0.0};
    SymbolBlock noise;
    double p_zbar = 0.0;
};

/// sigma_n^2 = p_target * 10^(-snr_db/10); complex noise splits the variance
/// equally, sigma^2/2 per real component.
double snr_to_noise_variance(double snr_db, double p_target);

struct NormalizedBlock {
    SymbolBlock z_in;
    double p_zbar;
};

/// z_in = sqrt(p_target / P_zbar) * z_bar with P_zbar = (1/k) sum |z_bar_i|^2.
/// Throws std::invalid_argument on an all-zero block (undefined scale).
NormalizedBlock normalize_power(const SymbolBlock& z_bar, double p_target);

struct TransmitResult {
    SymbolBlock z_out;
    ChannelRealization realization;
};

/// z_out = h * z_in + n with one h per block (block fading) and n i.i.d.
/// circular complex Gaussian of total variance sigma_n2. AWGN fixes h = 1;
/// Rayleigh draws h ~ CN(0, 1). `p_zbar` is carried into the realization as
/// receiver side information.
TransmitResult transmit(const SymbolBlock& z_in, ChannelKind kind,
                        double sigma_n2, double p_zbar, RandomStream& rng);
TransmitResult transmit(const SymbolBlock& z_in, const ChannelConfig& cfg,
                        double p_zbar, RandomStream& rng);

/// Equalize with full CSI, undo the power normalization, and (when a
/// constellation is given) detect:
///   z_check = (h* / |h|^2) z_out;  z_tilde = sqrt(P_zbar / p_target) z_check;
///   z_hat = Q(z_tilde) or z_tilde in analog mode.
/// Throws NumericalError when |h| < 1e-12 (degenerate channel).
SymbolBlock receive(const SymbolBlock& z_out, const ChannelRealization& real,
                    double p_target, const Constellation* c,
                    Eigen::VectorXi* detected_indices = nullptr);

struct ChannelPassResult {
    SymbolBlock z_hat;
    ChannelRealization realization;
};

/// normalize_power -> transmit -> receive without detection. The noiseless
/// limit is the identity on z. Differentiable end to end: the realized noise
/// and h are constants of the forward pass (see channel_backward).
ChannelPassResult analog_pass(const SymbolBlock& z, const ChannelConfig& cfg,
                              RandomStream& rng);
ChannelPassResult analog_pass(const SymbolBlock& z, ChannelKind kind,
                              double sigma_n2, double p_target,
                              RandomStream& rng);

struct ModulatedPassResult {
    SymbolBlock z_hat;
    SymbolBlock z_bar; // quantized transmitter block (pre-normalization)
    ChannelRealization realization;
    Eigen::VectorXi tx_indices;
    Eigen::VectorXi rx_indices;
};

/// Full digital chain: quantize -> normalize -> transmit -> equalize ->
/// rescale -> detect. `skip_quantize` bypasses both quantizers, which makes
/// the chain identical to analog_pass (debug path-equivalence hook).
ModulatedPassResult modulated_pass(const SymbolBlock& z,
                                   const Constellation& c, ChannelKind kind,
                                   double sigma_n2, double p_target,
                                   RandomStream& rng,
                                   bool skip_quantize = false);

/// Reverse-mode gradient of the whole pass with n and h held constant.
/// The chain composes to z_hat = z_bar + sqrt(P(z_bar)/p_target) * (n/h)
/// (with identity backward through any quantizer), so for upstream gradient
/// u on z_hat:
///   grad(z_bar) = u + <u, n/h> * z_bar / (k * sqrt(P(z_bar) * p_target))
/// with <.,.> the real inner product over interleaved components.
SymbolBlock channel_backward(const SymbolBlock& upstream,
                             const SymbolBlock& z_bar,
                             const ChannelRealization& real, double p_target);

} // namespace atroc

#endif // ATROC_CHANNEL_HPP
