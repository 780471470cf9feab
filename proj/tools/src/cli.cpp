#include "dbtsw/cli.hpp"

#include <chrono>
#include <map>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "commands.hpp"
#include "dbtsw/error.hpp"
#include "dbtsw/parallel.hpp"
#include "dbtsw/serialize.hpp"
#include "dbtsw/version.hpp"

namespace dbtsw::cli {

void add_common(CLI::App* app, CommonFlags& c) {
  app->add_option("--config", c.config_path, "JSON config file (flags override it)");
  app->add_option("--out-dir", c.out_dir, "Directory for reports and the manifest")
      ->capture_default_str();
}

json load_config_file(const CommonFlags& c) {
  if (c.config_path.empty()) return json::object();
  return read_json_file(c.config_path);
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  return fmt::format("{:%Y-%m-%dT%H:%M:%S}Z",
                     std::chrono::time_point_cast<std::chrono::seconds>(now));
}

std::filesystem::path prepare_out_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::filesystem::path write_manifest(const Invocation& inv, const json& outputs,
                                     const std::string& started_at) {
  json m{{"subcommand", inv.subcommand},
         {"version", std::string(version())},
         {"config", inv.config},
         {"inputs", inv.inputs},
         {"options", inv.options},
         {"out_dir", inv.out_dir.string()},
         {"threads", inv.threads},
         {"outputs", outputs},
         {"started_at", started_at},
         {"finished_at", now_iso8601()}};
  const json* seed = nullptr;
  for (const char* key : {"seed", "distance", "transfer"}) {
    if (!inv.config.contains(key)) continue;
    const json& sub = inv.config[key];
    seed = std::string(key) == "seed" ? &sub : (sub.contains("seed") ? &sub["seed"] : nullptr);
    if (seed) break;
  }
  if (seed) m["seed"] = *seed;
  const auto path = inv.out_dir / (inv.subcommand + ".manifest.json");
  write_json_file(m, path);
  return path;
}

namespace {

using Executor = int (*)(const Invocation&, Context&);

const std::map<std::string, Executor>& executors() {
  static const std::map<std::string, Executor> table{
      {"dist", execute_dist},   {"flow", execute_flow},   {"color-transfer", execute_color},
      {"exact", execute_exact}, {"bench", execute_bench}, {"selftest", execute_selftest}};
  return table;
}

Invocation invocation_from_manifest(const std::filesystem::path& path) {
  const json m = read_json_file(path);
  try {
    Invocation inv;
    inv.subcommand = m.at("subcommand").get<std::string>();
    inv.config = m.at("config");
    inv.inputs = m.value("inputs", json::object());
    inv.options = m.value("options", json::object());
    inv.out_dir = m.value("out_dir", std::string("."));
    inv.threads = m.value("threads", std::size_t{0});
    return inv;
  } catch (const json::exception& e) {
    throw ConfigError("malformed manifest '" + path.string() + "': " + e.what());
  }
}

int execute(Invocation inv, std::size_t threads_flag, bool threads_given, Context& ctx) {
  if (threads_given) inv.threads = threads_flag;
  set_num_threads(inv.threads);
  const auto it = executors().find(inv.subcommand);
  if (it == executors().end()) throw ConfigError("unknown subcommand '" + inv.subcommand + "'");
  prepare_out_dir(inv.out_dir);
  return it->second(inv, ctx);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  CLI::App app{"Distance-based tree-sliced Wasserstein distances", "dbtsw"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  auto* threads_opt =
      app.add_option("--threads", threads, "Worker threads for library loops (0 = all cores)");
  app.set_version_flag("--version", std::string(version()));

  std::map<std::string, Command> commands;
  commands["dist"] = register_dist(app);
  commands["flow"] = register_flow(app);
  commands["color-transfer"] = register_color(app);
  commands["exact"] = register_exact(app);
  commands["bench"] = register_bench(app);
  commands["selftest"] = register_selftest(app);

  auto* rerun = app.add_subcommand("rerun", "Re-execute a run from its manifest");
  std::string manifest_path;
  std::string rerun_out;
  rerun->add_option("manifest", manifest_path, "Manifest JSON written by a previous run")
      ->required();
  rerun->add_option("--out-dir", rerun_out, "Write outputs here instead of the original directory");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const bool threads_given = threads_opt->count() > 0;
  try {
    if (rerun->parsed()) {
      Invocation inv = invocation_from_manifest(manifest_path);
      if (!rerun_out.empty()) inv.out_dir = rerun_out;
      return execute(std::move(inv), threads, threads_given, ctx);
    }
    for (auto& [name, cmd] : commands) {
      if (app.got_subcommand(name)) {
        return execute(cmd.resolve(), threads, threads_given, ctx);
      }
    }
    err << "error: no subcommand\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DivergenceError& e) {
    err << "diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace dbtsw::cli
