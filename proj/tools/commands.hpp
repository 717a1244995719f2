#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace fabricore::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitFault = 3;

struct RolloutOptions {
  fs::path scenario;
  std::uint64_t seed = 0;
  fs::path out = "rollout_out";
  std::optional<std::size_t> steps;
  bool plot = false;
};

struct BenchOptions {
  fs::path scenario;
  std::uint64_t seed = 0;
  std::optional<fs::path> out;
  std::vector<std::size_t> batch{1, 1024};
  std::size_t steps = 4096;  // fabric steps per batch size per repetition
  double duration = 1.0;     // minimum timed seconds per batch size
  unsigned workers = 1;
};

struct GenTracesOptions {
  fs::path robot;
  fs::path out;
  std::uint64_t seed = 0;
  std::size_t count = 40;
  std::size_t frames = 30;
};

struct RetargetOptions {
  fs::path traces;
  fs::path robot;
  fs::path out;
  int iterations = 200;
};

struct FitPcaOptions {
  fs::path data;
  fs::path out;
  int k = 5;
};

struct GenEpisodeOptions {
  fs::path out;
  std::uint64_t seed = 0;
  bool drop = false;
};

struct EnvAuditOptions {
  fs::path trajectory;
  std::optional<fs::path> config;
  std::optional<fs::path> out;
};

int rollout(const RolloutOptions& o);
int bench(const BenchOptions& o);
int gen_traces(const GenTracesOptions& o);
int retarget(const RetargetOptions& o);
int fit_pca(const FitPcaOptions& o);
int gen_episode(const GenEpisodeOptions& o);
int env_audit(const EnvAuditOptions& o);

}  // namespace fabricore::cli
