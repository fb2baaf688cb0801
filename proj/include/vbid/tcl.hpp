// Hybrid dynamics of individual thermostatically controlled loads: a linear
// temperature ODE integrated exactly over each step (piecewise-constant
// power), plus the on/off deadband thermostat.
//
// Units: temperatures in degF, power in kW, energy in kWh, time in hours.
#pragma once

#include <cmath>
#include <stdexcept>

#include "vbid/common.hpp"

namespace vbid {

enum class ThermostatMode { cooling, heating };

// Air conditioner: dT/dt = -(T - T_a)/(C_r R) - eta * p / C_r.
struct AcParams {
    double C_r = 0.75;      // room thermal capacitance, kWh/degF
    double R = 3.6;         // room thermal resistance, degF/kW
    double eta = 2.5;       // load efficiency (coefficient of performance)
    double P = 5.0;         // rated electrical power, kW
    double T_set = 72.0;    // setpoint, degF
    double deadband = 2.0;  // full deadband width, degF
};

// Electric water heater: dT_w/dt = -a T_w + b with
// a = (m_dot C_p + W)/C_w, b = (p + m_dot C_p T_in + W T_a)/C_w.
struct WhParams {
    double C_w = 0.1955;    // tank thermal capacitance, kWh/degF (~80 gal)
    double W = 0.002;       // tank thermal conductance, kW/degF
    double C_p = 0.00244;   // water heat capacity, kWh/(gal*degF)
    double P_w = 4.5;       // rated electrical power, kW
    double T_set = 120.0;   // setpoint, degF
    double deadband = 4.0;  // degF
    double T_in = 60.0;     // inlet water temperature, degF
};

struct DeviceState {
    double temperature = 0.0;  // degF
    double power_draw = 0.0;   // kW; either 0 or the rated power
};

inline void validate(const AcParams& p) {
    if (!(p.C_r > 0) || !(p.R > 0) || !(p.eta > 0) || !(p.P > 0) || !(p.deadband > 0) ||
        !std::isfinite(p.T_set))
        throw ConfigError("ac params: C_r, R, eta, P, deadband must be positive and finite");
}

inline void validate(const WhParams& p) {
    if (!(p.C_w > 0) || !(p.W > 0) || !(p.C_p > 0) || !(p.P_w > 0) || !(p.deadband > 0) ||
        !std::isfinite(p.T_set) || !std::isfinite(p.T_in))
        throw ConfigError("wh params: C_w, W, C_p, P_w, deadband must be positive and finite");
}

// Deadband switching law. Cooling turns ON above the upper edge, heating
// turns ON below the lower edge; inside the band the current draw is held.
inline double thermostat(double temperature, double current_power, double setpoint,
                         double deadband, double rated_power, ThermostatMode mode) {
    const double half = deadband / 2.0;
    if (mode == ThermostatMode::cooling) {
        if (temperature >= setpoint + half) return rated_power;
        if (temperature <= setpoint - half) return 0.0;
    } else {
        if (temperature <= setpoint - half) return rated_power;
        if (temperature >= setpoint + half) return 0.0;
    }
    return current_power;
}

// One simulation step: exact exponential solution with power held constant
// over dt, then the thermostat applied to the new temperature.
inline DeviceState ac_step(const DeviceState& s, const AcParams& p, double ambient, double dt_h) {
    if (!(dt_h > 0) || !std::isfinite(s.temperature) || !std::isfinite(ambient))
        throw std::invalid_argument("ac_step: dt must be > 0 and inputs finite");
    const double t_eq = ambient - p.eta * s.power_draw * p.R;  // steady state at this draw
    const double decay = std::exp(-dt_h / (p.C_r * p.R));
    DeviceState out;
    out.temperature = t_eq + (s.temperature - t_eq) * decay;
    out.power_draw =
        thermostat(out.temperature, s.power_draw, p.T_set, p.deadband, p.P, ThermostatMode::cooling);
    return out;
}

inline DeviceState wh_step(const DeviceState& s, const WhParams& p, double ambient,
                           double flow_gph, double dt_h) {
    if (!(dt_h > 0) || !(flow_gph >= 0) || !std::isfinite(s.temperature) || !std::isfinite(ambient))
        throw std::invalid_argument("wh_step: dt > 0, flow >= 0 and inputs finite required");
    const double a = (flow_gph * p.C_p + p.W) / p.C_w;  // 1/h
    const double b = (s.power_draw + flow_gph * p.C_p * p.T_in + p.W * ambient) / p.C_w;
    DeviceState out;
    if (a > 0) {
        const double t_eq = b / a;
        out.temperature = t_eq + (s.temperature - t_eq) * std::exp(-a * dt_h);
    } else {
        out.temperature = s.temperature + b * dt_h;
    }
    out.power_draw = thermostat(out.temperature, s.power_draw, p.T_set, p.deadband, p.P_w,
                                ThermostatMode::heating);
    return out;
}

// Reference operating conditions used by the default configs.
constexpr double kDefaultAcAmbient = 90.0;  // degF outside air
constexpr double kDefaultWhAmbient = 70.0;  // degF around the tank
constexpr double kDefaultWhFlow = 14.7;     // gal/h ("medium" draw; ~50% duty at setpoint)

}  // namespace vbid
