#include <cstdint>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "commands.hpp"
#include "dbtsw/estimators.hpp"
#include "dbtsw/measure.hpp"
#include "dbtsw/projection.hpp"
#include "dbtsw/serialize.hpp"

namespace dbtsw::cli {

namespace {

struct DistFlags {
  CommonFlags common;
  std::string mu;
  std::string nu;
  std::string save_trees;
  std::string dump_projection;
};

}  // namespace

void add_estimator_flags(CLI::App* sub, FlagMap& f, const std::string& prefix) {
  f.add<std::string>(sub, "--variant", prefix + "/variant", "dbtsw, dbtsw-orth, tswsl or sw");
  f.add<std::size_t>(sub, "-L,--trees", prefix + "/L", "Number of sampled tree systems");
  f.add<std::size_t>(sub, "-k,--lines", prefix + "/k", "Lines per tree system");
  f.add<double>(sub, "--p", prefix + "/p", "SW order");
  f.add<double>(sub, "--delta", prefix + "/splitting/delta", "Splitting softmax scale");
  f.add<std::string>(sub, "--split", prefix + "/splitting/mode", "distance-softmax or uniform");
  f.add<double>(sub, "--root-half-width", prefix + "/sampler/root/half_width",
                "Half-width of the root cube");
  f.add<double>(sub, "--step-half-width", prefix + "/sampler/step_half_width",
                "Chain step half-width");
}

void add_seed_flags(CLI::App* sub, FlagMap& f, const std::string& prefix) {
  f.add<std::uint64_t>(sub, "--seed", prefix + "/seed/master", "Master seed");
  f.add<std::uint64_t>(sub, "--stream", prefix + "/seed/stream", "Seed stream");
}

Command register_dist(CLI::App& root) {
  auto flags = std::make_shared<DistFlags>();
  auto* sub = root.add_subcommand("dist", "Estimate the distance between two measure CSVs");
  add_common(sub, flags->common);
  sub->add_option("--mu", flags->mu, "First measure (CSV)")->required();
  sub->add_option("--nu", flags->nu, "Second measure (CSV)")->required();
  sub->add_option("--save-trees", flags->save_trees, "Write the sampled tree systems as JSON");
  sub->add_option("--dump-projection", flags->dump_projection,
                  "Write both projections on the first tree as JSON");
  add_estimator_flags(sub, flags->common.flags, "");
  add_seed_flags(sub, flags->common.flags, "");
  return {[flags] {
    EstimatorConfig cfg = estimator_from_json(load_config_file(flags->common));
    cfg = estimator_from_json(flags->common.flags.overrides(), cfg);
    Invocation inv;
    inv.subcommand = "dist";
    inv.config = to_json(cfg);
    inv.inputs = {{"mu", flags->mu}, {"nu", flags->nu}};
    inv.options = {{"save_trees", flags->save_trees}, {"dump_projection", flags->dump_projection}};
    inv.out_dir = flags->common.out_dir;
    return inv;
  }};
}

int execute_dist(const Invocation& inv, Context& ctx) {
  const std::string started = now_iso8601();
  const EstimatorConfig cfg = estimator_from_json(inv.config);
  const EmpiricalMeasure mu = read_measure_csv(inv.inputs.at("mu").get<std::string>());
  const EmpiricalMeasure nu = read_measure_csv(inv.inputs.at("nu").get<std::string>());
  const DistanceReport report = estimate(mu, nu, cfg);

  json outputs = json::object();
  const auto report_path = inv.out_dir / "dist_report.json";
  write_json_file(to_json(report), report_path);
  outputs["report"] = report_path.string();

  const auto trees_path = inv.options.value("save_trees", std::string());
  const auto projection_path = inv.options.value("dump_projection", std::string());
  if (!trees_path.empty() || !projection_path.empty()) {
    const auto trees = sample_estimator_trees(cfg, mu.dim());
    if (!trees_path.empty()) {
      write_json_file(to_json(trees), trees_path);
      outputs["trees"] = trees_path;
    }
    if (!projection_path.empty()) {
      write_json_file({{"mu", to_json(project(mu, trees.front(), cfg.splitting))},
                       {"nu", to_json(project(nu, trees.front(), cfg.splitting))}},
                      projection_path);
      outputs["projection"] = projection_path;
    }
  }
  write_manifest(inv, outputs, started);
  fmt::print(ctx.out, "{}\n", format_double(report.value));
  return 0;
}

}  // namespace dbtsw::cli
