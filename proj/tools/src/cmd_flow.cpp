#include <fmt/format.h>
#include <fmt/ostream.h>

#include "commands.hpp"
#include "dbtsw/error.hpp"
#include "dbtsw/flows.hpp"
#include "dbtsw/measure.hpp"
#include "dbtsw/serialize.hpp"

namespace dbtsw::cli {

namespace {

struct FlowFlags {
  CommonFlags common;
  std::string preset;
};

// Desk-scale versions of the published flow experiments: L = 25, k = 4,
// delta = 10, 2500 iterations, 100 supports.
FlowConfig preset_config(const std::string& name) {
  FlowConfig cfg;
  cfg.distance.L = 25;
  cfg.distance.k = 4;
  cfg.distance.splitting.delta = 10.0;
  cfg.iterations = 2500;
  cfg.eval_stride = 100;
  if (name.empty() || name == "swiss-roll") {
    cfg.dataset = SwissRollData{};
    cfg.learning_rate = 5e-3;
  } else if (name == "gaussians-25") {
    cfg.dataset = Gaussians25Data{};
    cfg.learning_rate = 5e-3;
  } else if (name == "gaussian-20d") {
    cfg.dataset = GaussianShiftData{};
    cfg.learning_rate = 5e-2;
  } else {
    throw ConfigError("unknown preset '" + name +
                      "' (expected swiss-roll, gaussians-25, gaussian-20d)");
  }
  return cfg;
}

}  // namespace

Command register_flow(CLI::App& root) {
  auto flags = std::make_shared<FlowFlags>();
  auto* sub = root.add_subcommand("flow", "Run a gradient flow towards a synthetic target");
  add_common(sub, flags->common);
  sub->add_option("--preset", flags->preset,
                  "swiss-roll (default), gaussians-25 or gaussian-20d");
  auto& f = flags->common.flags;
  f.add<std::string>(sub, "--dataset", "/dataset/type", "swiss-roll, gaussians-25, gaussian-shift");
  f.add<std::size_t>(sub, "--n", "/dataset/n", "Supports per measure");
  f.add<std::size_t>(sub, "--dim", "/dataset/d", "Dimension (gaussian-shift)");
  f.add<double>(sub, "--shift", "/dataset/shift", "Target mean per coordinate (gaussian-shift)");
  f.add<double>(sub, "--noise", "/dataset/noise", "Swiss roll noise");
  f.add<double>(sub, "--lr", "/learning_rate", "Learning rate");
  f.add<std::string>(sub, "--optimizer", "/optimizer", "adam or sgd");
  f.add<bool>(sub, "--center-roots", "/center_roots", "Centre tree roots on the target mean");
  f.add<std::size_t>(sub, "--iters", "/iterations", "Iterations");
  f.add<std::size_t>(sub, "--stride", "/eval_stride", "Evaluation stride");
  f.add<double>(sub, "--divergence-factor", "/divergence_factor", "Abort threshold on W2 growth");
  add_estimator_flags(sub, f, "/distance");
  add_seed_flags(sub, f, "");
  return {[flags] {
    FlowConfig cfg = flow_from_json(load_config_file(flags->common), preset_config(flags->preset));
    cfg = flow_from_json(flags->common.flags.overrides(), cfg);
    validate_flow(cfg);
    Invocation inv;
    inv.subcommand = "flow";
    inv.config = to_json(cfg);
    inv.out_dir = flags->common.out_dir;
    return inv;
  }};
}

int execute_flow(const Invocation& inv, Context& ctx) {
  const std::string started = now_iso8601();
  const FlowConfig cfg = flow_from_json(inv.config);
  FlowTrace trace;
  try {
    trace = run_flow(cfg);
  } catch (const DivergenceError& e) {
    write_manifest(inv, {{"error", e.what()}}, started);
    throw;
  }
  const auto trace_path = inv.out_dir / "flow_trace.csv";
  const auto summary_path = inv.out_dir / "flow_summary.json";
  const auto source_path = inv.out_dir / "flow_final_source.csv";
  write_flow_csv(trace, trace_path);
  write_measure_csv(uniform_measure(trace.final_source), source_path);
  const auto& last = trace.records.back();
  write_json_file({{"dataset", trace.dataset},
                   {"iterations", last.iteration},
                   {"final_w2", last.w2},
                   {"final_estimate", last.estimate},
                   {"initial_w2", trace.records.front().w2},
                   {"records", trace.records.size()},
                   {"config", inv.config}},
                  summary_path);
  write_manifest(inv,
                 {{"trace", trace_path.string()},
                  {"summary", summary_path.string()},
                  {"final_source", source_path.string()}},
                 started);
  fmt::print(ctx.out, "dataset {} iterations {} w2 {} estimate {}\n", trace.dataset,
             last.iteration, format_double(last.w2), format_double(last.estimate));
  return 0;
}

}  // namespace dbtsw::cli
