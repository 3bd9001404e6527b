#pragma once

#include <cmath>
#include <stdexcept>

namespace posner {

// CODATA 2018 values (kB and e are exact by definition).
inline constexpr double kBoltzmann = 1.380649e-23;        // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kProtonMass = 1.67262192369e-27;  // kg

struct DiffusionInputs {
    double temperature_K;
    double viscosity_Pa_s;
    double radius_m;
    double length_m;  // distance scale l; t_diff = l^2 / D
};

struct DiffusionResult {
    double diffusion_constant;  // m^2/s, Einstein-Stokes
    double diffusion_time_s;
};

inline DiffusionResult estimate_diffusion(const DiffusionInputs& in) {
    if (in.temperature_K <= 0 || in.viscosity_Pa_s <= 0 || in.radius_m <= 0 || in.length_m <= 0)
        throw std::invalid_argument("estimate inputs must be positive");
    const double d = kBoltzmann * in.temperature_K /
                     (6.0 * 3.14159265358979323846 * in.viscosity_Pa_s * in.radius_m);
    return {d, in.length_m * in.length_m / d};
}

// Order-of-magnitude single-spin rotation time in a magnetic field B:
// t_rot ~ m_p / (e B).
inline double estimate_rotation_time(double field_T) {
    if (field_T <= 0) throw std::invalid_argument("field must be positive");
    return kProtonMass / (kElementaryCharge * field_T);
}

// Nearest power of ten, for reporting alongside the full-precision value.
inline double order_of_magnitude(double x) {
    if (x <= 0) throw std::invalid_argument("order_of_magnitude needs a positive value");
    return std::pow(10.0, std::round(std::log10(x)));
}

}  // namespace posner
