#include "atroc/channel.hpp"

#include "atroc/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace atroc {

std::string to_string(ChannelKind kind) {
    return kind == ChannelKind::awgn ? "awgn" : "rayleigh";
}

ChannelKind channel_kind_from_string(const std::string& s) {
    if (s == "awgn") return ChannelKind::awgn;
    if (s == "rayleigh") return ChannelKind::rayleigh;
    throw std::invalid_argument("unknown channel kind: " + s);
}

double snr_to_noise_variance(double snr_db, double p_target) {
    if (!(p_target > 0.0)) {
        throw std::invalid_argument("snr_to_noise_variance: p_target must be positive");
    }
    return p_target * std::pow(10.0, -snr_db / 10.0);
}

NormalizedBlock normalize_power(const SymbolBlock& z_bar, double p_target) {
    if (!(p_target > 0.0)) {
        throw std::invalid_argument("normalize_power: p_target must be positive");
    }
    const double p_zbar = z_bar.squaredNorm() / static_cast<double>(z_bar.size());
    if (p_zbar == 0.0) {
        throw std::invalid_argument("normalize_power: all-zero block has no defined scale");
    }
    const double scale = std::sqrt(p_target) / std::sqrt(p_zbar);
    return {scale * z_bar, p_zbar};
}

TransmitResult transmit(const SymbolBlock& z_in, ChannelKind kind,
                        double sigma_n2, double p_zbar, RandomStream& rng) {
    TransmitResult res;
    res.realization.p_zbar = p_zbar;
    res.realization.h = kind == ChannelKind::rayleigh ? rng.complex_normal(1.0)
                                                      : ComplexSymbol(1.0, 0.0);
    res.realization.noise.resize(z_in.size());
    for (Eigen::Index i = 0; i < z_in.size(); ++i) {
        res.realization.noise[i] = rng.complex_normal(sigma_n2);
    }
    res.z_out = res.realization.h * z_in + res.realization.noise;
    return res;
}

TransmitResult transmit(const SymbolBlock& z_in, const ChannelConfig& cfg,
                        double p_zbar, RandomStream& rng) {
    return transmit(z_in, cfg.kind, snr_to_noise_variance(cfg.snr_db, cfg.p_target),
                    p_zbar, rng);
}

SymbolBlock receive(const SymbolBlock& z_out, const ChannelRealization& real,
                    double p_target, const Constellation* c,
                    Eigen::VectorXi* detected_indices) {
    if (std::abs(real.h) < 1e-12) {
        throw NumericalError("receive: degenerate channel, |h| < 1e-12");
    }
    const ComplexSymbol equalizer = std::conj(real.h) / std::norm(real.h);
    const double scale = std::sqrt(real.p_zbar) / std::sqrt(p_target);
    const SymbolBlock z_tilde = scale * (equalizer * z_out.array()).matrix();
    if (c == nullptr) {
        return z_tilde;
    }
    if (detected_indices != nullptr) {
        return quantize_block(z_tilde, *c, *detected_indices);
    }
    return quantize_block(z_tilde, *c);
}

ChannelPassResult analog_pass(const SymbolBlock& z, ChannelKind kind,
                              double sigma_n2, double p_target,
                              RandomStream& rng) {
    NormalizedBlock nb = normalize_power(z, p_target);
    TransmitResult tx = transmit(nb.z_in, kind, sigma_n2, nb.p_zbar, rng);
    ChannelPassResult res;
    res.z_hat = receive(tx.z_out, tx.realization, p_target, nullptr);
    res.realization = std::move(tx.realization);
    return res;
}

ChannelPassResult analog_pass(const SymbolBlock& z, const ChannelConfig& cfg,
                              RandomStream& rng) {
    return analog_pass(z, cfg.kind, snr_to_noise_variance(cfg.snr_db, cfg.p_target),
                       cfg.p_target, rng);
}

ModulatedPassResult modulated_pass(const SymbolBlock& z,
                                   const Constellation& c, ChannelKind kind,
                                   double sigma_n2, double p_target,
                                   RandomStream& rng, bool skip_quantize) {
    ModulatedPassResult res;
    res.z_bar = skip_quantize ? z : quantize_block(z, c, res.tx_indices);
    NormalizedBlock nb = normalize_power(res.z_bar, p_target);
    TransmitResult tx = transmit(nb.z_in, kind, sigma_n2, nb.p_zbar, rng);
    res.z_hat = receive(tx.z_out, tx.realization, p_target,
                        skip_quantize ? nullptr : &c,
                        skip_quantize ? nullptr : &res.rx_indices);
    res.realization = std::move(tx.realization);
    return res;
}

SymbolBlock channel_backward(const SymbolBlock& upstream,
                             const SymbolBlock& z_bar,
                             const ChannelRealization& real, double p_target) {
    const ComplexSymbol inv_h = std::conj(real.h) / std::norm(real.h);
    double inner = 0.0; // <u, n/h> over interleaved real components
    for (Eigen::Index i = 0; i < upstream.size(); ++i) {
        const ComplexSymbol w = real.noise[i] * inv_h;
        inner += upstream[i].real() * w.real() + upstream[i].imag() * w.imag();
    }
    const double coeff =
        inner / (static_cast<double>(z_bar.size()) * std::sqrt(real.p_zbar * p_target));
    return upstream + coeff * z_bar;
}

} // namespace atroc
