#include "fabricore/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace fabricore::io {

namespace fs = std::filesystem;

json read_json(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j)
{
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

void expect_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& context)
{
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

namespace {

const json& need(const json& j, const char* key, const std::string& context)
{
  if (!j.contains(key)) throw ConfigError(context + ": missing key '" + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& context)
{
  if (!j.is_number()) throw ConfigError(context + ": expected a number");
  return j.get<double>();
}

Eigen::VectorXd vecx(const json& j, const std::string& context, Eigen::Index expected = -1)
{
  if (!j.is_array()) throw ConfigError(context + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], context);
  if (expected >= 0 && v.size() != expected)
    throw ConfigError(context + ": expected " + std::to_string(expected) + " entries, got " +
                      std::to_string(v.size()));
  return v;
}

Eigen::Vector3d vec3(const json& j, const std::string& context) { return vecx(j, context, 3); }

json to_json(const Eigen::VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

template <typename T>
void read_if(const json& j, const char* key, T& out, const std::string& context)
{
  if (!j.contains(key)) return;
  if constexpr (std::is_same_v<T, int>) {
    if (!j.at(key).is_number_integer()) throw ConfigError(context + "." + key + ": expected an integer");
    out = j.at(key).get<int>();
  } else {
    out = number(j.at(key), context + "." + key);
  }
}

std::string string_of(const json& j, const std::string& context)
{
  if (!j.is_string()) throw ConfigError(context + ": expected a string");
  return j.get<std::string>();
}

}  // namespace

// Model

KinematicModel<double> parse_model(const json& j)
{
  expect_keys(j, {"name", "joints", "body_points", "collision_spheres"}, "model");
  const json& jj = need(j, "joints", "model");
  if (!jj.is_array()) throw ConfigError("model.joints: expected an array");
  std::vector<Joint<double>> joints;
  const auto n = static_cast<Eigen::Index>(jj.size());
  JointLimits<double> limits{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  auto frame_of = [&](const json& ref, const std::string& ctx) -> int {
    if (ref.is_null()) return kBaseFrame;
    const std::string name = string_of(ref, ctx);
    if (name == "base") return kBaseFrame;
    for (std::size_t i = 0; i < joints.size(); ++i)
      if (joints[i].name == name) return static_cast<int>(i);
    throw ConfigError(ctx + ": unknown frame '" + name + "'");
  };
  for (std::size_t i = 0; i < jj.size(); ++i) {
    const json& e = jj[i];
    const std::string ctx = "model.joints[" + std::to_string(i) + "]";
    expect_keys(e, {"name", "parent", "axis", "origin", "limits", "type"}, ctx);
    if (e.contains("type") && e.at("type") != "revolute")
      throw ConfigError(ctx + ": only revolute joints are supported");
    Joint<double> jt;
    jt.name = string_of(need(e, "name", ctx), ctx + ".name");
    jt.parent = e.contains("parent") ? frame_of(e.at("parent"), ctx + ".parent") : kBaseFrame;
    jt.axis = vec3(need(e, "axis", ctx), ctx + ".axis");
    if (e.contains("origin")) {
      const json& o = e.at("origin");
      expect_keys(o, {"xyz", "rpy"}, ctx + ".origin");
      jt.origin = Eigen::Isometry3d::Identity();
      if (o.contains("xyz")) jt.origin.translation() = vec3(o.at("xyz"), ctx + ".origin.xyz");
      if (o.contains("rpy")) jt.origin.linear() = rotation_from_rpy<double>(vec3(o.at("rpy"), ctx + ".origin.rpy"));
    }
    const json& l = need(e, "limits", ctx);
    expect_keys(l, {"lower", "upper", "accel", "jerk"}, ctx + ".limits");
    const auto k = static_cast<Eigen::Index>(i);
    limits.lower[k] = number(need(l, "lower", ctx), ctx + ".limits.lower");
    limits.upper[k] = number(need(l, "upper", ctx), ctx + ".limits.upper");
    limits.accel[k] = number(need(l, "accel", ctx), ctx + ".limits.accel");
    limits.jerk[k] = number(need(l, "jerk", ctx), ctx + ".limits.jerk");
    joints.push_back(std::move(jt));
  }
  std::vector<BodyPoint<double>> points;
  if (j.contains("body_points")) {
    for (std::size_t i = 0; i < j.at("body_points").size(); ++i) {
      const json& e = j.at("body_points")[i];
      const std::string ctx = "model.body_points[" + std::to_string(i) + "]";
      expect_keys(e, {"name", "frame", "offset"}, ctx);
      points.push_back({string_of(need(e, "name", ctx), ctx + ".name"), frame_of(need(e, "frame", ctx), ctx),
                        e.contains("offset") ? vec3(e.at("offset"), ctx + ".offset") : Eigen::Vector3d::Zero()});
    }
  }
  std::vector<CollisionSphere<double>> spheres;
  if (j.contains("collision_spheres")) {
    for (std::size_t i = 0; i < j.at("collision_spheres").size(); ++i) {
      const json& e = j.at("collision_spheres")[i];
      const std::string ctx = "model.collision_spheres[" + std::to_string(i) + "]";
      expect_keys(e, {"name", "frame", "offset", "radius"}, ctx);
      spheres.push_back({string_of(need(e, "name", ctx), ctx + ".name"), frame_of(need(e, "frame", ctx), ctx),
                         e.contains("offset") ? vec3(e.at("offset"), ctx + ".offset") : Eigen::Vector3d::Zero(),
                         number(need(e, "radius", ctx), ctx + ".radius")});
    }
  }
  return KinematicModel<double>(std::move(joints), std::move(limits), std::move(points), std::move(spheres));
}

KinematicModel<double> load_model(const fs::path& path)
{
  try {
    return parse_model(read_json(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json model_to_json(const KinematicModel<double>& model)
{
  auto frame_name = [&](int f) -> json {
    return f == kBaseFrame ? json("base") : json(model.joints()[static_cast<std::size_t>(f)].name);
  };
  json j;
  j["joints"] = json::array();
  for (std::size_t i = 0; i < model.joints().size(); ++i) {
    const auto& jt = model.joints()[i];
    const auto k = static_cast<Eigen::Index>(i);
    j["joints"].push_back({{"name", jt.name},
                           {"parent", frame_name(jt.parent)},
                           {"axis", to_json(jt.axis)},
                           {"origin",
                            {{"xyz", to_json(jt.origin.translation())},
                             {"rpy", to_json(rpy_from_rotation<double>(jt.origin.linear()))}}},
                           {"limits",
                            {{"lower", model.limits().lower[k]},
                             {"upper", model.limits().upper[k]},
                             {"accel", model.limits().accel[k]},
                             {"jerk", model.limits().jerk[k]}}}});
  }
  j["body_points"] = json::array();
  for (const auto& p : model.body_points())
    j["body_points"].push_back({{"name", p.name}, {"frame", frame_name(p.frame)}, {"offset", to_json(p.offset)}});
  j["collision_spheres"] = json::array();
  for (const auto& s : model.spheres())
    j["collision_spheres"].push_back(
        {{"name", s.name}, {"frame", frame_name(s.frame)}, {"offset", to_json(s.offset)}, {"radius", s.radius}});
  return j;
}

// World

ObstaclePrimitive<double> parse_obstacle(const json& j)
{
  const std::string type = string_of(need(j, "type", "obstacle"), "obstacle.type");
  ObstaclePrimitive<double> out;
  if (type == "box") {
    expect_keys(j, {"type", "name", "center", "half_extents", "rpy"}, "box");
    Box<double> b;
    b.center = vec3(need(j, "center", "box"), "box.center");
    b.half_extents = vec3(need(j, "half_extents", "box"), "box.half_extents");
    if (j.contains("rpy")) b.orientation = rotation_from_rpy<double>(vec3(j.at("rpy"), "box.rpy"));
    out = b;
  } else if (type == "sphere") {
    expect_keys(j, {"type", "name", "center", "radius"}, "sphere");
    out = Sphere<double>{vec3(need(j, "center", "sphere"), "sphere.center"),
                         number(need(j, "radius", "sphere"), "sphere.radius")};
  } else if (type == "halfspace") {
    expect_keys(j, {"type", "name", "point", "normal"}, "halfspace");
    Eigen::Vector3d normal = vec3(need(j, "normal", "halfspace"), "halfspace.normal");
    if (!(normal.norm() > 0)) throw ConfigError("halfspace.normal must be non-zero");
    out = Halfspace<double>{vec3(need(j, "point", "halfspace"), "halfspace.point"), normal.normalized()};
  } else {
    throw ConfigError("unknown obstacle type '" + type + "'");
  }
  validate(out);
  return out;
}

CollisionWorld<double> parse_world(const json& j, const KinematicModel<double>& model)
{
  expect_keys(j, {"d_min", "obstacles", "self_pairs"}, "world");
  CollisionWorld<double> w;
  read_if(j, "d_min", w.d_min, "world");
  if (j.contains("obstacles"))
    for (const auto& o : j.at("obstacles")) w.obstacles.push_back(parse_obstacle(o));
  if (j.contains("self_pairs")) {
    for (const auto& p : j.at("self_pairs")) {
      if (!p.is_array() || p.size() != 2) throw ConfigError("world.self_pairs: expected [name, name] pairs");
      w.self_pairs.emplace_back(model.sphere_index(string_of(p[0], "self_pairs")),
                                model.sphere_index(string_of(p[1], "self_pairs")));
    }
  }
  return w;
}

// PCA basis

PcaBasis<double> parse_basis(const json& j)
{
  expect_keys(j, {"rows", "cols", "A", "mean", "eigenvalues", "explained_variance_ratio"}, "basis");
  const int rows = need(j, "rows", "basis").get<int>();
  const int cols = need(j, "cols", "basis").get<int>();
  if (rows < 1 || cols < rows) throw ConfigError("basis: need 1 <= rows <= cols");
  const Eigen::VectorXd flat = vecx(need(j, "A", "basis"), "basis.A", Eigen::Index{rows} * cols);
  PcaBasis<double> b;
  b.components = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), rows, cols);
  b.mean = vecx(need(j, "mean", "basis"), "basis.mean", cols);
  b.eigenvalues = j.contains("eigenvalues") ? vecx(j.at("eigenvalues"), "basis.eigenvalues") : Eigen::VectorXd();
  read_if(j, "explained_variance_ratio", b.explained_variance_ratio, "basis");
  if (!b.components.allFinite() || !b.mean.allFinite()) throw ConfigError("basis: non-finite entries");
  return b;
}

PcaBasis<double> load_basis(const fs::path& path)
{
  try {
    return parse_basis(read_json(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json basis_to_json(const PcaBasis<double>& basis)
{
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> A = basis.components;
  return {{"rows", A.rows()},
          {"cols", A.cols()},
          {"A", std::vector<double>(A.data(), A.data() + A.size())},
          {"mean", to_json(basis.mean)},
          {"eigenvalues", to_json(basis.eigenvalues)},
          {"explained_variance_ratio", basis.explained_variance_ratio}};
}

// Traces

HumanGraspTrace<double> parse_trace(const json& j)
{
  expect_keys(j, {"grip_type", "points"}, "trace");
  HumanGraspTrace<double> t;
  const std::string grip = string_of(need(j, "grip_type", "trace"), "trace.grip_type");
  if (grip == "power")
    t.grip = GripType::power;
  else if (grip == "precision")
    t.grip = GripType::precision;
  else
    throw ConfigError("trace.grip_type must be 'power' or 'precision'");
  const json& pts = need(j, "points", "trace");
  if (!pts.is_array() || pts.empty()) throw ConfigError("trace.points: expected a non-empty array");
  t.points.resize(static_cast<Eigen::Index>(pts.size()), 12);
  for (std::size_t i = 0; i < pts.size(); ++i)
    t.points.row(static_cast<Eigen::Index>(i)) = vecx(pts[i], "trace.points", 12).transpose();
  return t;
}

json trace_to_json(const HumanGraspTrace<double>& trace)
{
  json pts = json::array();
  for (Eigen::Index i = 0; i < trace.points.rows(); ++i) pts.push_back(to_json(trace.points.row(i).transpose()));
  return {{"grip_type", to_string(trace.grip)}, {"points", pts}};
}

std::vector<HumanGraspTrace<double>> load_traces(const fs::path& dir)
{
  if (!fs::is_directory(dir)) throw ConfigError("trace directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no *.json traces in " + dir.string());
  std::vector<HumanGraspTrace<double>> out;
  for (const auto& f : files) {
    try {
      out.push_back(parse_trace(read_json(f)));
    } catch (const ConfigError& e) {
      throw ConfigError(f.string() + ": " + e.what());
    }
  }
  return out;
}

// Env configs

env::RewardConfig parse_reward_config(const json& j)
{
  expect_keys(j,
              {"w_to_obj", "w_lift", "w_lifted", "w_to_goal", "w_reached", "w_success", "lift_offset", "d_success",
               "t_success", "t_max", "aggregation"},
              "reward");
  env::RewardConfig c;
  read_if(j, "w_to_obj", c.w_to_obj, "reward");
  read_if(j, "w_lift", c.w_lift, "reward");
  read_if(j, "w_lifted", c.w_lifted, "reward");
  read_if(j, "w_to_goal", c.w_to_goal, "reward");
  read_if(j, "w_reached", c.w_reached, "reward");
  read_if(j, "w_success", c.w_success, "reward");
  read_if(j, "lift_offset", c.lift_offset, "reward");
  read_if(j, "d_success", c.d_success, "reward");
  read_if(j, "t_success", c.t_success, "reward");
  read_if(j, "t_max", c.t_max, "reward");
  if (j.contains("aggregation")) {
    const std::string a = string_of(j.at("aggregation"), "reward.aggregation");
    if (a == "mean")
      c.aggregation = env::FingertipAggregation::mean;
    else if (a == "max")
      c.aggregation = env::FingertipAggregation::max;
    else if (a == "sum")
      c.aggregation = env::FingertipAggregation::sum;
    else
      throw ConfigError("reward.aggregation must be mean, max or sum");
  }
  c.validate();
  return c;
}

env::DRSpec parse_dr_spec(const json& j)
{
  expect_keys(j, {"groups"}, "randomization");
  env::DRSpec spec;
  for (const auto& g : need(j, "groups", "randomization")) {
    expect_keys(g, {"name", "rows"}, "randomization.group");
    env::DRGroup group{string_of(need(g, "name", "group"), "group.name"), {}};
    for (const auto& r : need(g, "rows", "group")) {
      expect_keys(r, {"parameter", "distribution", "operation", "lower", "upper"}, "randomization.row");
      group.rows.push_back({string_of(need(r, "parameter", "row"), "row.parameter"),
                            env::parse_distribution(string_of(need(r, "distribution", "row"), "row.distribution")),
                            env::parse_operation(string_of(need(r, "operation", "row"), "row.operation")),
                            number(need(r, "lower", "row"), "row.lower"), number(need(r, "upper", "row"), "row.upper")});
    }
    spec.groups.push_back(std::move(group));
  }
  spec.validate();
  return spec;
}

// Scenario

namespace {

void parse_attraction(const json& j, AttractionConfig<double>& c, const std::string& ctx, bool allow_target = false)
{
  if (allow_target)
    expect_keys(j, {"mass", "gain", "sharpness", "damping", "target"}, ctx);
  else
    expect_keys(j, {"mass", "gain", "sharpness", "damping"}, ctx);
  read_if(j, "mass", c.mass, ctx);
  read_if(j, "gain", c.gain, ctx);
  read_if(j, "sharpness", c.sharpness, ctx);
  read_if(j, "damping", c.damping, ctx);
}

Command<double> parse_command(const json& e, ActionMode mode, Eigen::Index dof, const std::string& ctx)
{
  if (mode == ActionMode::cspace) {
    expect_keys(e, {"t", "joint_target"}, ctx);
    return CspaceCommand<double>{vecx(need(e, "joint_target", ctx), ctx + ".joint_target", dof)};
  }
  expect_keys(e, {"t", "palm_position", "palm_rpy", "pca"}, ctx);
  ActionCommand<double> a;
  a.palm_position = vec3(need(e, "palm_position", ctx), ctx + ".palm_position");
  if (e.contains("palm_rpy")) a.palm_rpy = vec3(e.at("palm_rpy"), ctx + ".palm_rpy");
  if (e.contains("pca")) a.pca_target = vecx(e.at("pca"), ctx + ".pca", 5);
  return a;
}

}  // namespace

Scenario parse_scenario(const json& j, const fs::path& base_dir)
{
  expect_keys(j, {"description", "robot", "world", "engine", "terms", "palm", "pca", "initial", "actions", "steps"},
              "scenario");
  Scenario s;
  s.robot_path = base_dir / string_of(need(j, "robot", "scenario"), "scenario.robot");
  s.model.emplace(load_model(s.robot_path));
  const auto& model = *s.model;
  const Eigen::Index n = model.dof();

  if (j.contains("world")) s.world = parse_world(j.at("world"), model);

  auto& cfg = s.engine;
  if (j.contains("engine")) {
    const json& e = j.at("engine");
    expect_keys(e,
                {"dt", "action_repeat", "lambda_reg", "cspace_damping", "mode", "alpha_max", "limiter_tolerance",
                 "limiter_iterations"},
                "engine");
    read_if(e, "dt", cfg.dt, "engine");
    read_if(e, "action_repeat", cfg.action_repeat, "engine");
    read_if(e, "lambda_reg", cfg.lambda_reg, "engine");
    read_if(e, "cspace_damping", cfg.cspace_damping, "engine");
    read_if(e, "alpha_max", cfg.alpha_max, "engine");
    read_if(e, "limiter_tolerance", cfg.limiter_tolerance, "engine");
    read_if(e, "limiter_iterations", cfg.limiter_iterations, "engine");
    if (e.contains("mode")) {
      const std::string m = string_of(e.at("mode"), "engine.mode");
      if (m == "pca_pose")
        cfg.mode = ActionMode::pca_pose;
      else if (m == "cspace")
        cfg.mode = ActionMode::cspace;
      else
        throw ConfigError("engine.mode must be 'pca_pose' or 'cspace'");
    }
  }
  if (j.contains("terms")) {
    const json& t = j.at("terms");
    expect_keys(t, {"collision", "pca_attraction", "palm_attraction", "cspace_attraction", "posture", "joint_limits"},
                "terms");
    if (t.contains("collision")) {
      const json& c = t.at("collision");
      expect_keys(c,
                  {"k_geometric", "k_forcing", "damping", "metric_gain", "gate_sharpness", "gate_offset", "cutoff"},
                  "terms.collision");
      read_if(c, "k_geometric", cfg.collision.k_geometric, "terms.collision");
      read_if(c, "k_forcing", cfg.collision.k_forcing, "terms.collision");
      read_if(c, "damping", cfg.collision.damping, "terms.collision");
      read_if(c, "metric_gain", cfg.collision.metric_gain, "terms.collision");
      read_if(c, "gate_sharpness", cfg.collision.gate_sharpness, "terms.collision");
      read_if(c, "gate_offset", cfg.collision.gate_offset, "terms.collision");
      read_if(c, "cutoff", cfg.collision.cutoff, "terms.collision");
    }
    if (t.contains("pca_attraction")) parse_attraction(t.at("pca_attraction"), cfg.pca_attraction, "terms.pca_attraction");
    if (t.contains("palm_attraction"))
      parse_attraction(t.at("palm_attraction"), cfg.palm_attraction, "terms.palm_attraction");
    if (t.contains("cspace_attraction"))
      parse_attraction(t.at("cspace_attraction"), cfg.cspace_attraction, "terms.cspace_attraction");
    if (t.contains("posture")) {
      parse_attraction(t.at("posture"), cfg.posture, "terms.posture", true);
      if (t.at("posture").contains("target"))
        cfg.posture_target = vecx(t.at("posture").at("target"), "terms.posture.target", n);
    }
    if (t.contains("joint_limits")) {
      const json& l = t.at("joint_limits");
      expect_keys(l, {"metric_gain", "repulsion", "damping"}, "terms.joint_limits");
      read_if(l, "metric_gain", cfg.joint_limits.metric_gain, "terms.joint_limits");
      read_if(l, "damping", cfg.joint_limits.damping, "terms.joint_limits");
      if (l.contains("repulsion")) {
        const json& g = l.at("repulsion");
        cfg.joint_limits.repulsion = g.is_array() ? vecx(g, "terms.joint_limits.repulsion", n)
                                                  : Eigen::VectorXd::Constant(n, number(g, "terms.joint_limits.repulsion"));
      }
    }
  }
  if (j.contains("palm")) {
    const json& p = j.at("palm");
    expect_keys(p, {"frame", "origin", "spacing"}, "palm");
    cfg.palm.frame = model.frame_index(string_of(need(p, "frame", "palm"), "palm.frame"));
    if (p.contains("origin")) cfg.palm.origin = vec3(p.at("origin"), "palm.origin");
    if (p.contains("spacing")) {
      const double spacing = number(p.at("spacing"), "palm.spacing");
      if (!(spacing > 0)) throw ConfigError("palm.spacing must be positive");
      cfg.palm.offsets = palm_offsets<double>(spacing);
    }
  }
  if (j.contains("pca")) {
    const json& p = j.at("pca");
    expect_keys(p, {"basis", "hand_offset"}, "pca");
    cfg.pca_basis = load_basis(base_dir / string_of(need(p, "basis", "pca"), "pca.basis"));
    if (p.contains("hand_offset")) cfg.hand_offset = p.at("hand_offset").get<Eigen::Index>();
  }

  const auto& lim = model.limits();
  s.initial_q = 0.5 * (lim.lower + lim.upper);
  if (j.contains("initial")) {
    const json& i = j.at("initial");
    expect_keys(i, {"q"}, "initial");
    if (i.contains("q")) s.initial_q = vecx(i.at("q"), "initial.q", n);
    if ((s.initial_q - lim.lower).minCoeff() < 0 || (lim.upper - s.initial_q).minCoeff() < 0)
      throw ConfigError("initial.q lies outside the joint limits");
  }

  if (j.contains("actions")) {
    const json& a = j.at("actions");
    expect_keys(a, {"script", "random"}, "actions");
    if (a.contains("script") == a.contains("random"))
      throw ConfigError("actions: give exactly one of 'script' or 'random'");
    if (a.contains("script")) {
      const json& sc = a.at("script");
      if (!sc.is_array() || sc.empty()) throw ConfigError("actions.script: expected a non-empty array");
      for (std::size_t i = 0; i < sc.size(); ++i) {
        const std::string ctx = "actions.script[" + std::to_string(i) + "]";
        s.actions.script.push_back({sc[i].contains("t") ? number(sc[i].at("t"), ctx + ".t") : 0.0,
                                    parse_command(sc[i], cfg.mode, n, ctx)});
      }
      std::stable_sort(s.actions.script.begin(), s.actions.script.end(),
                       [](const auto& x, const auto& y) { return x.t < y.t; });
    } else {
      const json& r = a.at("random");
      expect_keys(r, {"palm_lower", "palm_upper", "rpy_lower", "rpy_upper", "pca_range", "joint_fraction", "hold_pulls"},
                  "actions.random");
      RandomActionSpec spec;
      if (r.contains("palm_lower")) spec.palm_lower = vec3(r.at("palm_lower"), "actions.random.palm_lower");
      if (r.contains("palm_upper")) spec.palm_upper = vec3(r.at("palm_upper"), "actions.random.palm_upper");
      if (r.contains("rpy_lower")) spec.rpy_lower = vec3(r.at("rpy_lower"), "actions.random.rpy_lower");
      if (r.contains("rpy_upper")) spec.rpy_upper = vec3(r.at("rpy_upper"), "actions.random.rpy_upper");
      read_if(r, "pca_range", spec.pca_range, "actions.random");
      read_if(r, "joint_fraction", spec.joint_fraction, "actions.random");
      read_if(r, "hold_pulls", spec.hold_pulls, "actions.random");
      if (spec.hold_pulls < 1 || !(spec.pca_range >= 0) || !(spec.joint_fraction >= 0 && spec.joint_fraction <= 1) ||
          (spec.palm_upper - spec.palm_lower).minCoeff() < 0 || (spec.rpy_upper - spec.rpy_lower).minCoeff() < 0)
        throw ConfigError("actions.random: inconsistent ranges");
      s.actions.random = spec;
    }
  } else {
    throw ConfigError("scenario: missing key 'actions'");
  }

  if (j.contains("steps")) {
    if (!j.at("steps").is_number_unsigned()) throw ConfigError("scenario.steps: expected a non-negative integer");
    s.steps = j.at("steps").get<std::size_t>();
  }
  // Construct once so every config error surfaces at load time.
  FabricEngine<double> probe(model, s.world, cfg);
  (void)probe;
  return s;
}

Scenario load_scenario(const fs::path& path)
{
  try {
    return parse_scenario(read_json(path), path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::function<Command<double>(std::size_t)> make_action_source(const Scenario& scenario, env::Rng& rng)
{
  const auto& cfg = scenario.engine;
  if (!scenario.actions.random) {
    const double period = cfg.dt * cfg.action_repeat;
    auto script = scenario.actions.script;
    return [script, period](std::size_t pull) -> Command<double> {
      const double t = static_cast<double>(pull) * period + 1e-12;
      std::size_t k = 0;
      while (k + 1 < script.size() && script[k + 1].t <= t) ++k;
      return script[k].command;
    };
  }
  const RandomActionSpec spec = *scenario.actions.random;
  const auto mode = cfg.mode;
  const Eigen::VectorXd lower = scenario.model->limits().lower;
  const Eigen::VectorXd upper = scenario.model->limits().upper;
  auto current = std::make_shared<std::optional<Command<double>>>();
  return [spec, mode, lower, upper, current, &rng](std::size_t pull) -> Command<double> {
    if (!current->has_value() || pull % static_cast<std::size_t>(spec.hold_pulls) == 0) {
      std::uniform_real_distribution<double> u(0.0, 1.0);
      auto in_box = [&](const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
        Eigen::VectorXd v(lo.size());
        for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = lo[i] + (hi[i] - lo[i]) * u(rng);
        return v;
      };
      if (mode == ActionMode::cspace) {
        const Eigen::VectorXd mid = 0.5 * (lower + upper);
        const Eigen::VectorXd half = 0.5 * spec.joint_fraction * (upper - lower);
        *current = CspaceCommand<double>{in_box(mid - half, mid + half)};
      } else {
        ActionCommand<double> a;
        a.palm_position = in_box(spec.palm_lower, spec.palm_upper);
        a.palm_rpy = in_box(spec.rpy_lower, spec.rpy_upper);
        a.pca_target = in_box(Eigen::VectorXd::Constant(5, -spec.pca_range), Eigen::VectorXd::Constant(5, spec.pca_range));
        *current = a;
      }
    }
    return **current;
  };
}

// CSV

namespace {

void append_number(std::string& out, double v)
{
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

}  // namespace

std::string trajectory_header(Eigen::Index dof)
{
  std::string h = "t";
  for (const char* prefix : {"q_", "qd_", "qdd_"})
    for (Eigen::Index i = 0; i < dof; ++i) h += "," + std::string(prefix) + std::to_string(i);
  return h + ",min_dist,alpha,clamped";
}

void write_trajectory_csv(const fs::path& path, const Trajectory<double>& traj, Eigen::Index dof)
{
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << trajectory_header(dof) << '\n';
  std::string line;
  for (const auto& s : traj.samples) {
    line.clear();
    append_number(line, s.t);
    for (const auto* v : {&s.q, &s.qd, &s.qdd})
      for (Eigen::Index i = 0; i < v->size(); ++i) {
        line += ',';
        append_number(line, (*v)[i]);
      }
    line += ',';
    append_number(line, s.min_distance);
    line += ',';
    append_number(line, s.alpha);
    line += ',' + std::to_string(s.clamped) + '\n';
    out << line;
  }
}

std::size_t CsvTable::column(const std::string& name) const
{
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw ConfigError("CSV column '" + name + "' not found");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const fs::path& path)
{
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty CSV");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0;
      std::string_view cell(p, static_cast<std::size_t>(comma - p));
      if (cell == "inf")
        v = std::numeric_limits<double>::infinity();
      else if (cell == "-inf")
        v = -std::numeric_limits<double>::infinity();
      else {
        const auto res = std::from_chars(p, comma, v);
        if (res.ec != std::errc() || res.ptr != comma)
          throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": bad number '" + std::string(cell) + "'");
      }
      row.push_back(v);
      p = comma + 1;
    }
    if (row.size() != t.header.size())
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                        std::to_string(t.header.size()) + " columns");
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_csv(const fs::path& path, const CsvTable& table)
{
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
  out << '\n';
  std::string line;
  for (const auto& r : table.rows) {
    line.clear();
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) line += ',';
      append_number(line, r[i]);
    }
    out << line << '\n';
  }
}

namespace {

std::vector<std::string> observation_columns()
{
  std::vector<std::string> cols;
  auto add = [&](const std::string& prefix) {
    for (const char* axis : {"_x", "_y", "_z"}) cols.push_back(prefix + axis);
  };
  for (int k = 0; k < 4; ++k) add("tip" + std::to_string(k));
  add("obj");
  add("goal");
  cols.push_back("z_table");
  return cols;
}

}  // namespace

CsvTable observations_to_csv(std::span<const env::RewardObservation> trajectory)
{
  CsvTable t;
  t.header = observation_columns();
  for (const auto& o : trajectory) {
    std::vector<double> row;
    for (const auto& tip : o.fingertips) row.insert(row.end(), tip.data(), tip.data() + 3);
    row.insert(row.end(), o.object.data(), o.object.data() + 3);
    row.insert(row.end(), o.goal.data(), o.goal.data() + 3);
    row.push_back(o.z_table);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<env::RewardObservation> observations_from_csv(const CsvTable& table)
{
  std::vector<std::size_t> idx;
  for (const auto& name : observation_columns()) idx.push_back(table.column(name));
  std::vector<env::RewardObservation> out;
  for (const auto& r : table.rows) {
    env::RewardObservation o;
    auto v3 = [&](std::size_t c) { return Eigen::Vector3d(r[idx[c]], r[idx[c + 1]], r[idx[c + 2]]); };
    for (std::size_t k = 0; k < 4; ++k) o.fingertips[k] = v3(3 * k);
    o.object = v3(12);
    o.goal = v3(15);
    o.z_table = r[idx[18]];
    for (std::size_t c : idx)
      if (!std::isfinite(r[c])) throw ConfigError("episode observations must be finite");
    out.push_back(o);
  }
  return out;
}

}  // namespace fabricore::io
