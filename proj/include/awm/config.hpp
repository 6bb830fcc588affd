// config.hpp: flat `key = value` configuration in laboratory units.
//
// Recognised keys (one per line, '#' starts a comment):
//   temperature_K            bath temperature
//   omega0_2pi_Hz            bare qubit frequency / 2pi      (or hw0_over_kT)
//   hw0_over_kT              hbar omega0 / k_B T
//   Omega_2pi_Hz             mechanical frequency / 2pi
//   gamma_over_Omega         emission rate in units of Omega  (or gamma_per_s)
//   gamma_per_s
//   g_m_over_Omega           coupling in units of Omega       (or g_m_2pi_Hz)
//   g_m_2pi_Hz
//   beta0_abs                |beta0|, prepared at beta0 = i |beta0|
//   beta0_phase              optional, beta0 = |beta0| exp(i phase); default pi/2
//   t_final_s                default pi / (2 Omega)
//   n_steps                  default from the step-probability target
//   mode                     markovian | trajectory_frequency | classical_drive
//   n_traj, seed, jitter_halfwidth, grid_cell_halfwidth, fast_path (0/1)

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "awm/trajectory.hpp"

namespace awm {

inline constexpr double kBoltzmann = 1.380649e-23;      // J/K
inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kTwoPi = 6.283185307179586477;

/// k_B T / hbar in rad/s.
inline double theta_from_kelvin(double T) { return kBoltzmann * T / kHbar; }

struct ConfigIssue {
    std::string key;
    std::string message;
};

class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

using RawConfig = std::map<std::string, std::string>;

/// Splits `key = value` lines. Duplicate keys and malformed lines are errors.
RawConfig parse_config_text(const std::string& text);
RawConfig load_config_file(const std::string& path);

struct ValidatedConfig {
    PhysicalParams physics;
    ProtocolParams protocol;
    std::vector<std::string> warnings;  // e.g. semiclassical ratio >= 1e-2
};

/// Converts to internal units and reports every violation at once.
ValidatedConfig validate_config(const RawConfig& raw);

/// Ratio above which the Markovian description is expected to fail.
inline constexpr double kSemiclassicalWarning = 1e-2;

}  // namespace awm
