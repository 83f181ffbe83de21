#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotorsim/airframe.hpp"
#include "rotorsim/control.hpp"
#include "rotorsim/dynamics.hpp"

namespace rotorsim {

/// Configuration failure with a machine-readable kind and the offending key
/// path. what() formats as "<kind>: <path>: <detail>".
class ConfigError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownKey, Constraint };

  ConfigError(Kind kind, std::string path, std::string detail);

  Kind kind() const { return kind_; }
  const std::string& path() const { return path_; }
  const std::string& detail() const { return detail_; }

 private:
  Kind kind_;
  std::string path_;
  std::string detail_;
};

enum class ControllerMode { PositionPid, Hpfc };

/// Piecewise-constant setpoint: active from its time until the next one.
struct Waypoint {
  double time = 0.0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw = 0.0;
};

struct ScenarioConfig {
  AirframeModel airframe;
  std::string airframe_preset;  // non-empty when the airframe came from a preset

  ControllerMode mode = ControllerMode::PositionPid;
  PidGains position_gains;
  PidGains attitude_gains;
  HpfcConfig hpfc;

  std::vector<Obstacle> obstacles;
  std::vector<Waypoint> waypoints;

  double duration_s = 10.0;
  double dt_s = 0.001;
  int log_decimation = 10;
  RigidBodyState initial_state;

  double crash_sphere_radius = 0.15;  // m, body sphere for crash detection
};

/// Parse and fully validate a scenario document (JSON). Defaults are filled;
/// every failure names the offending key and constraint.
ScenarioConfig parse_scenario(const std::string& text);
std::string serialize_scenario(const ScenarioConfig& config);

/// Airframe document: either {"preset": "<name>"} or the inline model fields.
AirframeModel parse_airframe(const std::string& text, std::string* preset_name = nullptr);
std::string serialize_airframe(const AirframeModel& model, const std::string& preset_name = "");

inline constexpr const char* kSimLogSchema = "simlog_v1";

/// Column-oriented record of one simulation run. Byte-identical across runs
/// of the same config: no wall clock, no randomness in the loop.
struct SimLog {
  int rotor_count = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  struct Fault {
    double time = 0.0;
    std::string reason;
  };
  std::optional<Fault> fault;

  int column_index(const std::string& name) const;  // -1 when absent
  std::vector<double> column(const std::string& name) const;

  std::string to_csv() const;
};

/// Column names for a model with the given rotor count, in log order.
std::vector<std::string> sim_log_columns(int rotor_count);

/// Execute the scenario loop: setpoint lookup, control, allocation, clamp,
/// RK4 step, log. Terminates at the duration, or early with a fault on
/// crash detection or a controller fault.
SimLog run_scenario(const ScenarioConfig& config);

/// Parse a CSV produced by SimLog::to_csv (or any CSV with a "time" column;
/// lines starting with '#' are skipped).
SimLog read_sim_log_csv(const std::string& text);

}  // namespace rotorsim
