#include "mmcs/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace mmcs {

double wrap_angle(double a) {
    double w = std::fmod(a, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    if (w >= kTwoPi) w = 0.0;  // fmod can round up to 2*pi
    return w;
}

double wrapped_distance(double a, double b) {
    double d = std::fabs(wrap_angle(a) - wrap_angle(b));
    return d > kTwoPi / 2.0 ? kTwoPi - d : d;
}

double ChannelParams::effective_rho() const {
    if (rho >= 0.0) return rho;
    if (f_d < 0.0 || t_bl <= 0.0)
        throw std::invalid_argument("ChannelParams: rho unset and (f_d, t_bl) invalid");
    return jakes_rho(f_d, t_bl).value;
}

cplx complex_normal(std::mt19937_64& rng, double variance) {
    std::normal_distribution<double> n(0.0, std::sqrt(variance * 0.5));
    double re = n(rng);
    double im = n(rng);
    return {re, im};
}

CVec ula_response(int n, double angle) {
    if (n < 1) throw std::invalid_argument("ula_response: n < 1");
    CVec a(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const double psi = M_PI * std::sin(angle);
    for (int k = 0; k < n; ++k)
        a(k) = std::polar(scale, psi * k);
    return a;
}

CMat steering_matrix(int n, const std::vector<double>& angles) {
    if (angles.empty()) throw std::invalid_argument("steering_matrix: no angles");
    CMat m(n, static_cast<Eigen::Index>(angles.size()));
    for (std::size_t j = 0; j < angles.size(); ++j)
        m.col(static_cast<Eigen::Index>(j)) = ula_response(n, angles[j]);
    return m;
}

CMat assemble_channel(const ChannelParams& p, const std::vector<double>& aods,
                      const std::vector<double>& aoas, const CVec& gains) {
    if (aods.size() != aoas.size() || static_cast<Eigen::Index>(aods.size()) != gains.size())
        throw std::invalid_argument("assemble_channel: length mismatch");
    CMat a_t = steering_matrix(p.n_t, aods);
    CMat a_r = steering_matrix(p.n_r, aoas);
    return a_r * gains.asDiagonal() * a_t.adjoint();
}

ChannelState init_channel(const ChannelParams& p, std::mt19937_64& rng) {
    ChannelState s;
    s.block_index = 1;
    s.aods.resize(p.l);
    s.aoas.resize(p.l);
    s.gains = CVec(p.l);
    std::uniform_real_distribution<double> uni(0.0, kTwoPi);
    for (int i = 0; i < p.l; ++i) s.aods[i] = wrap_angle(uni(rng));
    for (int i = 0; i < p.l; ++i) s.aoas[i] = wrap_angle(uni(rng));
    const double var = p.gain_variance();
    for (int i = 0; i < p.l; ++i) s.gains(i) = complex_normal(rng, var);
    s.h = assemble_channel(p, s.aods, s.aoas, s.gains);
    return s;
}

ChannelState evolve_channel(const ChannelState& prev, const ChannelParams& p, std::mt19937_64& rng) {
    const double rho = p.effective_rho();
    const double var = p.gain_variance();
    ChannelState s;
    s.block_index = prev.block_index + 1;
    s.gains = CVec(p.l);
    // Draw order is fixed: innovation gains, then AoD drifts, then AoA drifts.
    const double innov = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    for (int i = 0; i < p.l; ++i)
        s.gains(i) = rho * prev.gains(i) + innov * complex_normal(rng, var);
    std::uniform_real_distribution<double> drift(-p.delta, p.delta);
    s.aods.resize(p.l);
    s.aoas.resize(p.l);
    for (int i = 0; i < p.l; ++i) s.aods[i] = wrap_angle(prev.aods[i] + drift(rng));
    for (int i = 0; i < p.l; ++i) s.aoas[i] = wrap_angle(prev.aoas[i] + drift(rng));
    s.h = assemble_channel(p, s.aods, s.aoas, s.gains);
    return s;
}

JakesRho jakes_rho(double f_d, double t_bl) {
    if (f_d < 0.0 || t_bl <= 0.0)
        throw std::invalid_argument("jakes_rho: need f_d >= 0 and t_bl > 0");
    double v = bessel_j0(kTwoPi * f_d * t_bl);
    JakesRho out{v, true};
    if (v < 0.0) {
        if (v >= -1e-12) out.value = 0.0;
        else out.in_range = false;
    } else if (v > 1.0) {
        if (v <= 1.0 + 1e-12) out.value = 1.0;
        else out.in_range = false;
    }
    return out;
}

}  // namespace mmcs
