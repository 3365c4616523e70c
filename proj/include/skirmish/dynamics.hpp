#pragma once

#include <array>
#include <span>

#include "skirmish/arena.hpp"
#include "skirmish/geom.hpp"

namespace skirmish {

inline constexpr double kGravity = 9.81;
inline constexpr double kTickDt = 0.02;
// Command ranges; setpoints are clamped to these.
inline constexpr double kMaxLinearSpeed = 2.0;    // m/s
inline constexpr double kMaxAngularSpeed = 1.75;  // rad/s

// Body-frame velocity command / state.
struct Twist {
  double vx = 0.0;
  double vy = 0.0;
  double omega = 0.0;
};

enum class Level : int { easy = 1, middle = 2, hard = 3 };

struct HitParams {
  double p_max = 0.8;  // hit probability at point blank
  double d0 = 2.0;     // half-probability distance, m
  double kappa = 2.0;  // logistic steepness, 1/m
};

// The full set of parameters that shape the transition function. Everything
// here is overridable through the context registry at reset.
struct DynamicsContext {
  double mu_slide = 0.5;    // caps body acceleration (slip limit)
  double mu_roll = 0.015;   // wheel coast decay
  double tau_max = 1.5;     // motor torque limit, N*m
  double kp = 0.4;
  double ki = 0.5;
  double kd = 0.0;
  double integral_max = 0.5;
  double mass = 15.0;            // kg
  double wheel_inertia = 1e-3;   // kg*m^2
  double wheel_radius = 0.05;    // m
  double half_length = 0.2;      // lx, m
  double half_width = 0.2;       // ly, m
  HitParams hit;
  Level level = Level::easy;

  // Chassis mass reflected at the wheel; without it the wheels spin up
  // instantly and the robot mass would be unobservable.
  double effective_wheel_inertia() const {
    return wheel_inertia + mass * wheel_radius * wheel_radius / 4.0;
  }

  void validate() const;  // throws std::invalid_argument
};

struct WheelPid {
  std::array<double, 4> integral{};
  std::array<double, 4> prev_error{};
};

struct RobotBody {
  Pose pose;
  Twist twist;  // body frame
  std::array<double, 4> wheel_speeds{};  // rad/s, order FL FR RL RR
  WheelPid pid;
  double footprint_radius = 0.3;
};

// Wheel speeds for a desired body twist (FL, FR, RL, RR).
std::array<double, 4> mecanum_inverse(const Twist& twist, double wheel_radius,
                                      double lx, double ly);

// Least-squares body twist from wheel speeds; exact inverse of the above.
Twist mecanum_forward(const std::array<double, 4>& wheel_speeds, double wheel_radius,
                      double lx, double ly);

// Per-wheel PI(D) with integral and output clamping; updates pid state.
std::array<double, 4> pid_control(const std::array<double, 4>& setpoints,
                                  const std::array<double, 4>& measured,
                                  WheelPid& pid, const DynamicsContext& ctx,
                                  double dt);

Twist clamp_command(const Twist& t);

// One fixed-timestep update: command -> wheel setpoints -> PID torques ->
// wheel speeds -> slip-capped body twist -> pose, then collision resolution
// against walls, obstacles and the given robot footprints.
RobotBody physics_tick(const RobotBody& body, const Twist& command,
                       const DynamicsContext& ctx, double dt, const Arena& arena,
                       std::span<const Circle> other_robots = {});

}  // namespace skirmish
