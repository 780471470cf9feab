#include <cstdint>
#include <fstream>
#include <limits>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "commands.hpp"
#include "dbtsw/colortransfer.hpp"
#include "dbtsw/error.hpp"
#include "dbtsw/serialize.hpp"

namespace dbtsw::cli {

namespace {

struct ColorFlags {
  CommonFlags common;
  std::string source;
  std::string target;
  std::string out;
};

struct ColorConfig {
  std::size_t colors = 1000;
  TransferConfig transfer{};
};

ColorConfig color_from_json(const json& j, ColorConfig base) {
  if (!j.is_object()) throw ConfigError("color-transfer config must be a JSON object");
  for (const auto& item : j.items()) {
    if (item.key() != "colors" && item.key() != "transfer") {
      throw ConfigError("unknown key '" + item.key() + "' in color-transfer config");
    }
  }
  try {
    base.colors = j.value("colors", base.colors);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed colors: ") + e.what());
  }
  if (j.contains("transfer")) base.transfer = transfer_from_json(j["transfer"], base.transfer);
  return base;
}

json to_json(const ColorConfig& c) {
  return {{"colors", c.colors}, {"transfer", dbtsw::to_json(c.transfer)}};
}

constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();

}  // namespace

Command register_color(CLI::App& root) {
  auto flags = std::make_shared<ColorFlags>();
  auto* sub = root.add_subcommand("color-transfer", "Transfer the palette of one PNG to another");
  add_common(sub, flags->common);
  sub->add_option("--source", flags->source, "Source image (PNG)")->required();
  sub->add_option("--target", flags->target, "Target image (PNG)")->required();
  sub->add_option("--out", flags->out, "Output image (PNG)")->required();
  auto& f = flags->common.flags;
  f.add<std::size_t>(sub, "--colors", "/colors", "Palette size (k-means clusters)");
  f.add<std::size_t>(sub, "--iters", "/transfer/iterations", "Euler iterations");
  f.add<double>(sub, "--step", "/transfer/step", "Euler step size");
  f.add<std::size_t>(sub, "--trees", "/transfer/L", "Tree systems per step");
  f.add<std::size_t>(sub, "--lines", "/transfer/k", "Lines per tree system");
  f.add<double>(sub, "--delta", "/transfer/splitting/delta", "Splitting softmax scale");
  f.add<std::string>(sub, "--variant", "/transfer/variant", "dbtsw, dbtsw-orth or sw");
  f.add<double>(sub, "--rounding", "/transfer/rounding_fraction",
                "Fraction of final iterations that round and clamp");
  f.add<std::size_t>(sub, "--record-stride", "/transfer/record_stride",
                     "Record the estimate every N iterations");
  add_seed_flags(sub, f, "/transfer");
  return {[flags] {
    ColorConfig cfg = color_from_json(load_config_file(flags->common), ColorConfig{});
    cfg = color_from_json(flags->common.flags.overrides(), cfg);
    Invocation inv;
    inv.subcommand = "color-transfer";
    inv.config = to_json(cfg);
    inv.inputs = {{"source", flags->source}, {"target", flags->target}};
    inv.options = {{"out", flags->out}};
    inv.out_dir = flags->common.out_dir;
    return inv;
  }};
}

int execute_color(const Invocation& inv, Context& ctx) {
  const std::string started = now_iso8601();
  const ColorConfig cfg = color_from_json(inv.config, ColorConfig{});
  const TransferConfig& tc = cfg.transfer;
  const RgbImage source = read_png(inv.inputs.at("source").get<std::string>());
  const RgbImage target = read_png(inv.inputs.at("target").get<std::string>());
  const Palette src = kmeans_palette(image_pixels(source), cfg.colors, tc.seed.child(kMax));
  const Palette tgt = kmeans_palette(image_pixels(target), cfg.colors, tc.seed.child(kMax - 1));

  TransferResult result;
  try {
    result = transfer_curve(src, tgt, tc);
  } catch (const DivergenceError& e) {
    write_manifest(inv, {{"error", e.what()}}, started);
    throw;
  }
  const std::filesystem::path out_path = inv.options.at("out").get<std::string>();
  write_png(recolor(source, result.palette), out_path);

  const SeedSpec eval_seed = tc.seed.child(kMax - 2);
  const Vector w = src.weights();
  const double initial = palette_distance(src.colors, w, tgt.colors, tgt.weights(), tc, eval_seed);
  const double final_value =
      palette_distance(result.palette.colors, w, tgt.colors, tgt.weights(), tc, eval_seed);

  const auto curve_path = inv.out_dir / "color_estimates.csv";
  {
    std::ofstream csv(curve_path);
    if (!csv) throw IoError("cannot open '" + curve_path.string() + "' for writing");
    csv << "iteration,estimate\n";
    for (const auto& [it, v] : result.estimates) csv << it << ',' << format_double(v) << '\n';
  }
  const auto summary_path = inv.out_dir / "color_summary.json";
  write_json_file({{"initial_distance", initial},
                   {"final_distance", final_value},
                   {"ratio", initial > 0.0 ? final_value / initial : 0.0},
                   {"palette_size", src.size()},
                   {"width", source.width},
                   {"height", source.height}},
                  summary_path);
  write_manifest(inv,
                 {{"image", out_path.string()},
                  {"estimates", curve_path.string()},
                  {"summary", summary_path.string()}},
                 started);
  fmt::print(ctx.out, "initial {} final {} ratio {}\n", format_double(initial),
             format_double(final_value), format_double(initial > 0.0 ? final_value / initial : 0.0));
  return 0;
}

}  // namespace dbtsw::cli
