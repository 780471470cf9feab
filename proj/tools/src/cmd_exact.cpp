#include <cmath>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "commands.hpp"
#include "dbtsw/error.hpp"
#include "dbtsw/exactot.hpp"
#include "dbtsw/measure.hpp"
#include "dbtsw/serialize.hpp"

namespace dbtsw::cli {

namespace {

struct ExactFlags {
  CommonFlags common;
  std::string mu;
  std::string nu;
};

json exact_config(const json& j, json base) {
  if (!j.is_object()) throw ConfigError("exact config must be a JSON object");
  for (const auto& item : j.items()) {
    if (item.key() != "p" && item.key() != "method") {
      throw ConfigError("unknown key '" + item.key() + "' in exact config");
    }
    base[item.key()] = item.value();
  }
  if (!base["p"].is_number() || base["p"].get<double>() < 1.0) {
    throw ConfigError("--p must be a number >= 1");
  }
  const auto method = base["method"].is_string() ? base["method"].get<std::string>() : "";
  if (method != "auto" && method != "assignment" && method != "lp") {
    throw ConfigError("--method must be auto, assignment or lp");
  }
  return base;
}

bool uniform_weights(const EmpiricalMeasure& m) {
  const double u = 1.0 / static_cast<double>(m.size());
  return (m.weights().array() - u).abs().maxCoeff() <= 1e-15;
}

}  // namespace

Command register_exact(CLI::App& root) {
  auto flags = std::make_shared<ExactFlags>();
  auto* sub = root.add_subcommand("exact", "Exact Wasserstein distance between two measure CSVs");
  add_common(sub, flags->common);
  sub->add_option("--mu", flags->mu, "First measure (CSV)")->required();
  sub->add_option("--nu", flags->nu, "Second measure (CSV)")->required();
  flags->common.flags.add<double>(sub, "--p", "/p", "Order of the distance");
  flags->common.flags.add<std::string>(sub, "--method", "/method", "auto, assignment or lp");
  return {[flags] {
    json cfg = exact_config(load_config_file(flags->common), {{"p", 2.0}, {"method", "auto"}});
    cfg = exact_config(flags->common.flags.overrides(), cfg);
    Invocation inv;
    inv.subcommand = "exact";
    inv.config = cfg;
    inv.inputs = {{"mu", flags->mu}, {"nu", flags->nu}};
    inv.out_dir = flags->common.out_dir;
    return inv;
  }};
}

int execute_exact(const Invocation& inv, Context& ctx) {
  const std::string started = now_iso8601();
  const json cfg = exact_config(inv.config, {{"p", 2.0}, {"method", "auto"}});
  const double p = cfg["p"].get<double>();
  std::string method = cfg["method"].get<std::string>();
  const EmpiricalMeasure mu = read_measure_csv(inv.inputs.at("mu").get<std::string>());
  const EmpiricalMeasure nu = read_measure_csv(inv.inputs.at("nu").get<std::string>());
  if (mu.dim() != nu.dim()) throw DimensionError("measures have different dimensions");
  if (method == "auto") {
    method = mu.size() == nu.size() && uniform_weights(mu) && uniform_weights(nu) ? "assignment"
                                                                                  : "lp";
  }
  double value = 0.0;
  if (method == "assignment") {
    if (!uniform_weights(mu) || !uniform_weights(nu)) {
      throw DataError("assignment needs uniform weights; use --method lp");
    }
    value = exact_wp_assignment(mu.supports(), nu.supports(), p);
  } else {
    Matrix cost = euclidean_cost(mu.supports(), nu.supports());
    if (p != 1.0) cost = cost.array().pow(p).matrix();
    value = std::pow(exact_w1_lp(mu.weights(), nu.weights(), cost), 1.0 / p);
  }
  const auto path = inv.out_dir / "exact_report.json";
  write_json_file({{"value", value}, {"p", p}, {"method", method}}, path);
  write_manifest(inv, {{"report", path.string()}}, started);
  fmt::print(ctx.out, "{}\n", format_double(value));
  return 0;
}

}  // namespace dbtsw::cli
