#ifndef MMCS_CHANNEL_HPP
#define MMCS_CHANNEL_HPP

#include <random>
#include <vector>

#include "mmcs/numerics.hpp"

namespace mmcs {

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

// Wrap into [0, 2*pi).
double wrap_angle(double a);

// Shortest angular distance between a and b, in [0, pi].
double wrapped_distance(double a, double b);

struct ChannelParams {
    int n_t = 32;
    int n_r = 64;
    int l = 1;             // path count
    double delta = 0.0;    // per-block angle drift half-width, radians
    double rho = 0.8;      // block-to-block gain correlation; < 0 means "derive from f_d, t_bl"
    double f_d = -1.0;     // max Doppler, Hz (used only when rho < 0)
    double t_bl = -1.0;    // block length, seconds (used only when rho < 0)
    double pathloss = 0.0; // l(D); 0 means the default n_t*n_r (unit gain variance)

    double effective_pathloss() const {
        return pathloss > 0.0 ? pathloss : static_cast<double>(n_t) * n_r;
    }
    // Per-path complex gain variance N_T N_R / l(D).
    double gain_variance() const {
        return static_cast<double>(n_t) * n_r / effective_pathloss();
    }
    // Direct rho wins when both are supplied.
    double effective_rho() const;
};

struct ChannelState {
    int block_index = 0;
    std::vector<double> aods;  // phi_l, wrapped to [0, 2pi)
    std::vector<double> aoas;  // theta_l
    CVec gains;                // a(n), length L
    CMat h;                    // N_R x N_T
};

// One draw of CN(0, variance).
cplx complex_normal(std::mt19937_64& rng, double variance);

// Half-wavelength ULA response, entry k = exp(j*pi*k*sin(angle))/sqrt(n).
CVec ula_response(int n, double angle);

CMat steering_matrix(int n, const std::vector<double>& angles);

// A_R(theta) diag(gains) A_T^H(phi).
CMat assemble_channel(const ChannelParams& p, const std::vector<double>& aods,
                      const std::vector<double>& aoas, const CVec& gains);

ChannelState init_channel(const ChannelParams& p, std::mt19937_64& rng);

// Gains: a(n) = rho a(n-1) + sqrt(1-rho^2) beta(n); angles drift by U(-delta, delta).
ChannelState evolve_channel(const ChannelState& s, const ChannelParams& p, std::mt19937_64& rng);

struct JakesRho {
    double value;
    bool in_range;  // false when J0 fell outside [0,1]; value is passed through as-is
};
JakesRho jakes_rho(double f_d, double t_bl);

}  // namespace mmcs

#endif
