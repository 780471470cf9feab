#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

namespace dbtsw::cli {

using nlohmann::json;

struct Context {
  std::ostream& out;
  std::ostream& err;
};

// Everything needed to execute (or re-execute) a subcommand. `config` is the
// fully resolved configuration; reruns decode it again and get the same bits.
struct Invocation {
  std::string subcommand;
  json config = json::object();
  json inputs = json::object();
  json options = json::object();  // output-only switches (paths, --json)
  std::filesystem::path out_dir = ".";
  std::size_t threads = 0;
};

// Flags that override entries of the config JSON. Only flags given on the
// command line produce overrides.
class FlagMap {
 public:
  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flag, const std::string& pointer,
                   const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    entries_.push_back({opt, json::json_pointer(pointer), [value] { return json(*value); }});
    return opt;
  }
  [[nodiscard]] json overrides() const {
    json j = json::object();
    for (const auto& e : entries_) {
      if (e.opt->count() > 0) j[e.pointer] = e.value();
    }
    return j;
  }

 private:
  struct Entry {
    CLI::Option* opt;
    json::json_pointer pointer;
    std::function<json()> value;
  };
  std::vector<Entry> entries_;
};

// Shared per-subcommand flags: --config, --out-dir.
struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  FlagMap flags;
};
void add_common(CLI::App* app, CommonFlags& c);
// Config file JSON (or an empty object).
json load_config_file(const CommonFlags& c);

std::string format_double(double v);
// Writes the run manifest and returns its path.
std::filesystem::path write_manifest(const Invocation& inv, const json& outputs,
                                     const std::string& started_at);
std::string now_iso8601();
std::filesystem::path prepare_out_dir(const std::filesystem::path& dir);

// Estimator flags (--variant, --trees, --lines, --p, --delta, ...) mapped
// under `prefix`; seed flags (--seed, --stream) likewise.
void add_estimator_flags(CLI::App* sub, FlagMap& f, const std::string& prefix);
void add_seed_flags(CLI::App* sub, FlagMap& f, const std::string& prefix);

// A subcommand: registration builds a resolver that turns parsed flags into
// an Invocation; execution runs it.
struct Command {
  std::function<Invocation()> resolve;
};

Command register_dist(CLI::App& root);
Command register_flow(CLI::App& root);
Command register_color(CLI::App& root);
Command register_exact(CLI::App& root);
Command register_bench(CLI::App& root);
Command register_selftest(CLI::App& root);

int execute_dist(const Invocation& inv, Context& ctx);
int execute_flow(const Invocation& inv, Context& ctx);
int execute_color(const Invocation& inv, Context& ctx);
int execute_exact(const Invocation& inv, Context& ctx);
int execute_bench(const Invocation& inv, Context& ctx);
int execute_selftest(const Invocation& inv, Context& ctx);

}  // namespace dbtsw::cli
