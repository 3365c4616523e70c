#include "skirmish/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace skirmish {

namespace {

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::runtime_error(std::string("non-finite ") + what);
}

double clampd(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

void DynamicsContext::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument(std::string("dynamics: ") + name + " must be positive");
    }
  };
  positive(tau_max, "tau_max");
  positive(mass, "mass");
  positive(wheel_inertia, "wheel_inertia");
  positive(wheel_radius, "wheel_radius");
  positive(half_length, "half_length");
  positive(half_width, "half_width");
  if (!(mu_slide > 0.0 && mu_slide <= 2.0)) throw std::invalid_argument("dynamics: mu_slide out of (0, 2]");
  if (!(mu_roll > 0.0 && mu_roll <= 2.0)) throw std::invalid_argument("dynamics: mu_roll out of (0, 2]");
  if (kp < 0.0 || ki < 0.0 || kd < 0.0) throw std::invalid_argument("dynamics: PID gains must be >= 0");
  if (!(hit.p_max > 0.0 && hit.p_max <= 1.0)) throw std::invalid_argument("dynamics: p_max out of (0, 1]");
  if (!(hit.d0 >= 0.0)) throw std::invalid_argument("dynamics: d0 must be >= 0");
  if (!(hit.kappa > 0.0)) throw std::invalid_argument("dynamics: kappa must be positive");
  int lv = static_cast<int>(level);
  if (lv < 1 || lv > 3) throw std::invalid_argument("dynamics: invalid level");
}

std::array<double, 4> mecanum_inverse(const Twist& t, double r, double lx, double ly) {
  double l = lx + ly;
  return {
      (t.vx - t.vy - l * t.omega) / r,  // FL
      (t.vx + t.vy + l * t.omega) / r,  // FR
      (t.vx + t.vy - l * t.omega) / r,  // RL
      (t.vx - t.vy + l * t.omega) / r,  // RR
  };
}

Twist mecanum_forward(const std::array<double, 4>& w, double r, double lx, double ly) {
  double l = lx + ly;
  Twist t;
  t.vx = r * (w[0] + w[1] + w[2] + w[3]) / 4.0;
  t.vy = r * (-w[0] + w[1] + w[2] - w[3]) / 4.0;
  t.omega = r * (-w[0] + w[1] - w[2] + w[3]) / (4.0 * l);
  return t;
}

std::array<double, 4> pid_control(const std::array<double, 4>& setpoints,
                                  const std::array<double, 4>& measured,
                                  WheelPid& pid, const DynamicsContext& ctx,
                                  double dt) {
  std::array<double, 4> torques{};
  for (int i = 0; i < 4; ++i) {
    double e = setpoints[i] - measured[i];
    pid.integral[i] = clampd(pid.integral[i] + e * dt, -ctx.integral_max, ctx.integral_max);
    double derivative = (e - pid.prev_error[i]) / dt;
    pid.prev_error[i] = e;
    double tau = ctx.kp * e + ctx.ki * pid.integral[i] + ctx.kd * derivative;
    torques[i] = clampd(tau, -ctx.tau_max, ctx.tau_max);
  }
  return torques;
}

Twist clamp_command(const Twist& t) {
  return {clampd(t.vx, -kMaxLinearSpeed, kMaxLinearSpeed),
          clampd(t.vy, -kMaxLinearSpeed, kMaxLinearSpeed),
          clampd(t.omega, -kMaxAngularSpeed, kMaxAngularSpeed)};
}

namespace {

// Pushes the footprint circle out of walls/obstacles/robots and removes the
// velocity component into each contacted surface. vel is world frame.
void resolve_collisions(Pose& pose, Vec2& vel, double radius, const Arena& arena,
                        std::span<const Circle> others) {
  constexpr double kSlack = 1e-6;
  auto clip_walls = [&] {
    if (pose.x < radius) {
      pose.x = radius + kSlack;
      if (vel.x < 0.0) vel.x = 0.0;
    }
    if (pose.x > arena.length - radius) {
      pose.x = arena.length - radius - kSlack;
      if (vel.x > 0.0) vel.x = 0.0;
    }
    if (pose.y < radius) {
      pose.y = radius + kSlack;
      if (vel.y < 0.0) vel.y = 0.0;
    }
    if (pose.y > arena.width - radius) {
      pose.y = arena.width - radius - kSlack;
      if (vel.y > 0.0) vel.y = 0.0;
    }
  };
  auto push_out = [&](Vec2 n, double depth) {
    pose.x += n.x * depth;
    pose.y += n.y * depth;
    double into = vel.dot(n);
    if (into < 0.0) {
      vel.x -= n.x * into;
      vel.y -= n.y * into;
    }
  };
  auto clip_rects = [&] {
    for (const auto& ob : arena.obstacles) {
      Vec2 p = pose.position();
      if (ob.rect.contains(p)) {
        // center inside: exit along the axis of least penetration
        double left = p.x - ob.rect.min_x(), right = ob.rect.max_x() - p.x;
        double down = p.y - ob.rect.min_y(), up = ob.rect.max_y() - p.y;
        double m = std::min(std::min(left, right), std::min(down, up));
        Vec2 n = m == left ? Vec2{-1, 0} : m == right ? Vec2{1, 0} : m == down ? Vec2{0, -1} : Vec2{0, 1};
        push_out(n, m + radius + kSlack);
      } else {
        Vec2 q = ob.rect.closest_point(p);
        Vec2 d = p - q;
        double dd = d.norm();
        if (dd <= radius) {
          Vec2 n = dd > 0.0 ? d * (1.0 / dd) : Vec2{1, 0};
          push_out(n, radius - dd + kSlack);
        }
      }
    }
  };
  auto clip_robots = [&] {
    for (const auto& other : others) {
      Vec2 d = pose.position() - other.center;
      double dd = d.norm();
      double min_d = radius + other.radius;
      if (dd < min_d) {
        Vec2 n = dd > 0.0 ? d * (1.0 / dd) : Vec2{1, 0};
        push_out(n, min_d - dd + kSlack);
      }
    }
  };
  // Robot pushes may re-enter static geometry; finish with a static pass so
  // the pose always clears walls and obstacles.
  clip_walls();
  clip_rects();
  clip_robots();
  clip_rects();
  clip_walls();
}

}  // namespace

RobotBody physics_tick(const RobotBody& body, const Twist& command,
                       const DynamicsContext& ctx, double dt, const Arena& arena,
                       std::span<const Circle> other_robots) {
  RobotBody out = body;
  Twist cmd = clamp_command(command);

  // wheel setpoints and PID torques
  auto setpoints = mecanum_inverse(cmd, ctx.wheel_radius, ctx.half_length, ctx.half_width);
  auto torques = pid_control(setpoints, out.wheel_speeds, out.pid, ctx, dt);

  // wheel speed update: drive torque, then rolling friction decay toward 0
  // (applied as an exact shrink so friction alone can never flip the sign)
  double inertia = ctx.effective_wheel_inertia();
  double friction_step = ctx.mu_roll * (ctx.mass * kGravity / 4.0) * ctx.wheel_radius / inertia * dt;
  for (int i = 0; i < 4; ++i) {
    double w = out.wheel_speeds[i] + torques[i] / inertia * dt;
    double mag = std::abs(w) - friction_step;
    out.wheel_speeds[i] = mag > 0.0 ? std::copysign(mag, w) : 0.0;
  }

  // body twist chases the wheel-implied twist under the slip limit
  Twist target = mecanum_forward(out.wheel_speeds, ctx.wheel_radius, ctx.half_length, ctx.half_width);
  double a_max = ctx.mu_slide * kGravity;
  double dvx = target.vx - out.twist.vx;
  double dvy = target.vy - out.twist.vy;
  double dv = std::hypot(dvx, dvy);
  double dv_max = a_max * dt;
  if (dv > dv_max) {
    double s = dv_max / dv;
    dvx *= s;
    dvy *= s;
  }
  out.twist.vx += dvx;
  out.twist.vy += dvy;
  double alpha_max = a_max / (ctx.half_length + ctx.half_width);
  double domega = clampd(target.omega - out.twist.omega, -alpha_max * dt, alpha_max * dt);
  out.twist.omega += domega;

  // semi-implicit Euler pose integration in the world frame
  double c = std::cos(out.pose.theta), s = std::sin(out.pose.theta);
  Vec2 vel{out.twist.vx * c - out.twist.vy * s, out.twist.vx * s + out.twist.vy * c};
  out.pose.x += vel.x * dt;
  out.pose.y += vel.y * dt;
  out.pose.theta = wrap_angle(out.pose.theta + out.twist.omega * dt);

  resolve_collisions(out.pose, vel, out.footprint_radius, arena, other_robots);

  // store the possibly clipped velocity back in the body frame
  c = std::cos(out.pose.theta);
  s = std::sin(out.pose.theta);
  out.twist.vx = vel.x * c + vel.y * s;
  out.twist.vy = -vel.x * s + vel.y * c;

  check_finite(out.pose.x, "pose.x");
  check_finite(out.pose.y, "pose.y");
  check_finite(out.pose.theta, "pose.theta");
  check_finite(out.twist.vx, "twist.vx");
  check_finite(out.twist.vy, "twist.vy");
  check_finite(out.twist.omega, "twist.omega");
  return out;
}

}  // namespace skirmish
