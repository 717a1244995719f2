#include "commands.hpp"

#include "fabricore/io.hpp"
#include "fabricore/log.hpp"
#include "fabricore/synthetic.hpp"

#include <Eigen/Core>

#include <sys/utsname.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace fabricore::cli {

using io::json;

namespace {

void ensure_dir(const fs::path& dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct RolloutStats {
  double min_distance = std::numeric_limits<double>::infinity();
  std::size_t limit_violations = 0;
  double max_limit_excess = 0;
  std::size_t clamp_count = 0;
  std::size_t clamped_steps = 0;
  double max_alpha = 0;
  double max_accel_ratio = 0;
  double max_jerk_ratio = 0;
};

RolloutStats rollout_stats(const Trajectory<double>& traj, const KinematicModel<double>& model,
                           const Eigen::VectorXd& accel_limits, double dt)
{
  constexpr double kSlack = 1e-6;
  const auto& lim = model.limits();
  RolloutStats st;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const auto& s = traj.samples[i];
    st.min_distance = std::min(st.min_distance, s.min_distance);
    const double excess = std::max((lim.lower - s.q).maxCoeff(), (s.q - lim.upper).maxCoeff());
    st.max_limit_excess = std::max(st.max_limit_excess, excess);
    if (excess > kSlack) ++st.limit_violations;
    st.clamp_count += static_cast<std::size_t>(s.clamped);
    if (s.clamped > 0) ++st.clamped_steps;
    st.max_alpha = std::max(st.max_alpha, s.alpha);
    st.max_accel_ratio = std::max(st.max_accel_ratio, s.qdd.cwiseAbs().cwiseQuotient(accel_limits).maxCoeff());
    if (i > 0) {
      const Eigen::VectorXd jerk = (s.qdd - traj.samples[i - 1].qdd).cwiseAbs() / dt;
      st.max_jerk_ratio = std::max(st.max_jerk_ratio, jerk.cwiseQuotient(lim.jerk).maxCoeff());
    }
  }
  return st;
}

void write_svg(const fs::path& path, const Trajectory<double>& traj, const KinematicModel<double>& model)
{
  constexpr double W = 960, H = 540, L = 60, R = 20, T = 30, B = 50;
  const auto& lim = model.limits();
  const double y_lo = lim.lower.minCoeff(), y_hi = lim.upper.maxCoeff();
  const double t_hi = std::max(traj.samples.back().t, 1e-9);
  auto X = [&](double t) { return L + (W - L - R) * t / t_hi; };
  auto Y = [&](double q) { return H - B - (H - T - B) * (q - y_lo) / (y_hi - y_lo); };
  static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">t (s), 0 to " << t_hi << "</text>\n";
  out << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2 << ")\" text-anchor=\"middle\">q (rad), "
      << y_lo << " to " << y_hi << "</text>\n";
  out << "<text x=\"" << L << "\" y=\"20\">joint positions, " << model.dof() << " joints</text>\n";
  for (Eigen::Index j = 0; j < model.dof(); ++j) {
    out << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << palette[j % 10] << "\" points=\"";
    for (const auto& s : traj.samples) out << X(s.t) << ',' << Y(s.q[j]) << ' ';
    out << "\"><title>" << model.joints()[static_cast<std::size_t>(j)].name << "</title></polyline>\n";
  }
  out << "</svg>\n";
}

std::string read_first_line_with(const char* file, const char* key)
{
  std::ifstream in(file);
  std::string line;
  while (std::getline(in, line))
    if (line.rfind(key, 0) == 0) {
      const auto colon = line.find(':');
      if (colon != std::string::npos) {
        auto v = line.substr(colon + 1);
        v.erase(0, v.find_first_not_of(" \t"));
        return v;
      }
    }
  return "unknown";
}

json machine_info()
{
  json m;
  char host[256] = {};
  if (gethostname(host, sizeof(host) - 1) == 0) m["hostname"] = host;
  utsname u{};
  if (uname(&u) == 0) {
    m["os"] = std::string(u.sysname) + " " + u.release;
    m["arch"] = u.machine;
  }
  m["cpu"] = read_first_line_with("/proc/cpuinfo", "model name");
  m["logical_cores"] = std::thread::hardware_concurrency();
  m["compiler"] = __VERSION__;
#ifdef NDEBUG
  m["build"] = "release";
#else
  m["build"] = "debug";
#endif
  m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  return m;
}

/// FNV-1a over the bytes of every q and qd.
std::uint64_t state_checksum(const std::vector<FabricState<double>>& states)
{
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&](const Eigen::VectorXd& v) {
    const auto* p = reinterpret_cast<const unsigned char*>(v.data());
    for (std::size_t i = 0; i < static_cast<std::size_t>(v.size()) * sizeof(double); ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& s : states) {
    mix(s.q);
    mix(s.qd);
  }
  return h;
}

std::string hex(std::uint64_t v)
{
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

KinematicModel<double> scenario_model(const io::Scenario& sc)
{
  if (!sc.model) throw ConfigError("scenario has no robot model");
  return *sc.model;
}

}  // namespace

int rollout(const RolloutOptions& o)
{
  auto sc = io::load_scenario(o.scenario);
  if (o.steps) sc.steps = *o.steps;
  const auto model = scenario_model(sc);
  const FabricEngine<double> engine(model, sc.world, sc.engine);
  env::Rng rng(o.seed);
  const auto source = io::make_action_source(sc, rng);
  logging::info("rollout: " + std::to_string(sc.steps) + " steps of " + o.scenario.string());
  const auto traj = engine.run_policy_rate(FabricState<double>::at_rest(sc.initial_q), source, sc.steps);

  ensure_dir(o.out);
  io::write_trajectory_csv(o.out / "trajectory.csv", traj, model.dof());
  if (o.plot) write_svg(o.out / "trajectory.svg", traj, model);

  const auto st = rollout_stats(traj, model, engine.effective_limits(), sc.engine.dt);
  json summary;
  summary["scenario"] = o.scenario.filename().string();
  summary["seed"] = o.seed;
  summary["steps_requested"] = sc.steps;
  summary["steps_completed"] = traj.samples.size() - 1;
  summary["pulls"] = traj.pulls;
  summary["dof"] = model.dof();
  summary["min_distance"] = number_or_null(st.min_distance);
  summary["limit_violations"] = st.limit_violations;
  summary["max_limit_excess"] = st.max_limit_excess;
  summary["clamp_count"] = st.clamp_count;
  summary["clamped_steps"] = st.clamped_steps;
  summary["max_alpha"] = st.max_alpha;
  summary["max_accel_ratio"] = st.max_accel_ratio;
  summary["max_jerk_ratio"] = st.max_jerk_ratio;
  summary["error"] = traj.error ? json(*traj.error) : json(nullptr);
  io::write_json(o.out / "summary.json", summary);
  std::cout << summary.dump(2) << '\n';
  if (traj.error) {
    std::cerr << "fault: " << *traj.error << '\n';
    return kExitFault;
  }
  return kExitOk;
}

int bench(const BenchOptions& o)
{
  const auto sc = io::load_scenario(o.scenario);
  const auto model = scenario_model(sc);
  const FabricEngine<double> engine(model, sc.world, sc.engine);
  const auto& lim = model.limits();

  json report;
  report["scenario"] = o.scenario.filename().string();
  report["dof"] = model.dof();
  report["seed"] = o.seed;
  report["workers"] = o.workers;
  report["machine"] = machine_info();
  report["results"] = json::array();

  for (std::size_t batch : o.batch) {
    if (batch == 0) throw ConfigError("batch sizes must be positive");
    env::Rng rng(o.seed);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    std::vector<FabricState<double>> start(batch);
    std::vector<Command<double>> commands;
    commands.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      Eigen::VectorXd q = sc.initial_q;
      for (Eigen::Index j = 0; j < q.size(); ++j)
        q[j] = std::clamp(q[j] + 0.05 * (lim.upper[j] - lim.lower[j]) * sym(rng), lim.lower[j], lim.upper[j]);
      start[i] = FabricState<double>::at_rest(q);
      env::Rng element_rng(rng());
      commands.push_back(io::make_action_source(sc, element_rng)(0));
    }
    const std::size_t rounds = std::max<std::size_t>(1, (o.steps + batch - 1) / batch);

    std::optional<std::uint64_t> checksum;
    std::size_t faults = 0, repetitions = 0;
    double elapsed = 0;
    const auto t0 = std::chrono::steady_clock::now();
    do {
      std::vector<FabricState<double>> states = start;
      for (std::size_t r = 0; r < rounds; ++r) {
        auto res = engine.step_batch(states, commands, o.workers);
        if (!checksum)
          faults += static_cast<std::size_t>(std::count_if(res.faults.begin(), res.faults.end(),
                                                           [](const auto& f) { return f.has_value(); }));
        states = std::move(res.states);
      }
      if (!checksum) checksum = state_checksum(states);
      ++repetitions;
      elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    } while (elapsed < o.duration);

    const double steps = static_cast<double>(batch * rounds * repetitions);
    json r;
    r["batch"] = batch;
    r["rounds"] = rounds;
    r["checksum"] = hex(*checksum);
    r["faults"] = faults;
    r["timing"] = {{"repetitions", repetitions}, {"seconds", elapsed}, {"steps_per_second", steps / elapsed}};
    report["results"].push_back(r);
    logging::info("bench: batch " + std::to_string(batch) + ": " + std::to_string(steps / elapsed) + " steps/s");
  }
  if (o.out) io::write_json(*o.out, report);
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

int gen_traces(const GenTracesOptions& o)
{
  const auto hand = io::load_model(o.robot);
  const auto cfg = RetargetConfig<double>::allegro_defaults();
  SyntheticTraceConfig sc;
  sc.traces = o.count;
  sc.frames = o.frames;
  env::Rng rng(o.seed);
  const auto traces = generate_synthetic_traces(hand, cfg.fingertips, rng, sc);
  ensure_dir(o.out);
  for (std::size_t i = 0; i < traces.size(); ++i) {
    std::ostringstream name;
    name << "trace_" << std::setw(3) << std::setfill('0') << i << ".json";
    io::write_json(o.out / name.str(), io::trace_to_json(traces[i]));
  }
  std::cout << "wrote " << traces.size() << " traces to " << o.out.string() << '\n';
  return kExitOk;
}

int retarget(const RetargetOptions& o)
{
  const auto hand_model = io::load_model(o.robot);
  auto cfg = RetargetConfig<double>::allegro_defaults();
  cfg.adam.iterations = o.iterations;
  const RetargetHand<double> hand(hand_model, cfg.fingertips);
  const auto traces = io::load_traces(o.traces);
  if (traces.empty()) throw ConfigError("no traces in " + o.traces.string());

  io::CsvTable table;
  table.header = {"trace", "frame", "grip"};
  for (Eigen::Index j = 0; j < hand_model.dof(); ++j) table.header.push_back("q_" + std::to_string(j));
  double worst_step = 0;
  for (std::size_t t = 0; t < traces.size(); ++t) {
    const Eigen::MatrixXd q = retarget_trace(traces[t], hand, cfg);
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      std::vector<double> row{double(t), double(i), traces[t].grip == GripType::power ? 0.0 : 1.0};
      for (Eigen::Index j = 0; j < q.cols(); ++j) row.push_back(q(i, j));
      table.rows.push_back(std::move(row));
      if (i > 0) worst_step = std::max(worst_step, (q.row(i) - q.row(i - 1)).cwiseAbs().maxCoeff());
    }
    logging::debug("retargeted trace " + std::to_string(t));
  }
  if (o.out.has_parent_path()) ensure_dir(o.out.parent_path());
  io::write_csv(o.out, table);
  json s{{"traces", traces.size()}, {"rows", table.rows.size()}, {"max_frame_step", worst_step}};
  std::cout << s.dump(2) << '\n';
  return kExitOk;
}

int fit_pca(const FitPcaOptions& o)
{
  const auto table = io::read_csv(o.data);
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (table.header[c].rfind("q_", 0) == 0) cols.push_back(c);
  if (cols.empty()) throw ConfigError(o.data.string() + ": no q_* columns");
  Eigen::MatrixXd data(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = table.rows[r][cols[c]];
  const auto basis = fabricore::fit_pca<double>(data, o.k);
  if (o.out.has_parent_path()) ensure_dir(o.out.parent_path());
  io::write_json(o.out, io::basis_to_json(basis));
  json s{{"samples", data.rows()},
         {"k", o.k},
         {"explained_variance_ratio", basis.explained_variance_ratio},
         {"reconstruction_error", reconstruction_error(basis, data)}};
  std::cout << s.dump(2) << '\n';
  return kExitOk;
}

int gen_episode(const GenEpisodeOptions& o)
{
  env::Rng rng(o.seed);
  env::SyntheticEpisodeConfig cfg;
  cfg.drop = o.drop;
  const auto episode = env::synthetic_episode(rng, cfg);
  if (o.out.has_parent_path()) ensure_dir(o.out.parent_path());
  io::write_csv(o.out, io::observations_to_csv(episode));
  std::cout << "wrote " << episode.size() << " steps to " << o.out.string() << '\n';
  return kExitOk;
}

int env_audit(const EnvAuditOptions& o)
{
  const env::RewardConfig cfg = o.config ? io::parse_reward_config(io::read_json(*o.config)) : env::RewardConfig{};
  const auto episode = io::observations_from_csv(io::read_csv(o.trajectory));
  const auto audit = env::audit_episode(episode, cfg);

  if (o.out) {
    io::CsvTable ledger;
    ledger.header = {"T", "to_obj", "lift", "lifted", "to_goal", "reached", "success", "total"};
    for (std::size_t i = 0; i < audit.steps.size(); ++i) {
      const auto& r = audit.steps[i];
      ledger.rows.push_back({double(i), r.to_obj, r.lift, r.lifted, r.to_goal, r.reached, r.success, r.total});
    }
    io::write_csv(*o.out, ledger);
  }

  const auto& t = audit.totals;
  json s;
  s["steps"] = audit.steps.size();
  s["reset_step"] = audit.reset_step ? json(*audit.reset_step) : json(nullptr);
  s["totals"] = {{"to_obj", t.to_obj}, {"lift", t.lift},       {"lifted", t.lifted}, {"to_goal", t.to_goal},
                 {"reached", t.reached}, {"success", t.success}, {"total", t.total}};
  s["bounds"] = {{"to_obj", cfg.w_to_obj * audit.initial_fingertip_distance},
                 {"lift", cfg.w_lift * cfg.lift_offset},
                 {"lifted", cfg.w_lifted}};
  std::cout << s.dump(2) << '\n';
  return kExitOk;
}

}  // namespace fabricore::cli
