#include "dbtsw/serialize.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include "dbtsw/error.hpp"

namespace dbtsw {

using nlohmann::json;

namespace {

void check_object(const json& j, const char* what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const char* what) {
  check_object(j, what);
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) throw ConfigError(std::string("unknown key '") + item.key() + "' in " + what);
  }
}

// Runs `f`, turning nlohmann type errors into ConfigError.
template <class F>
auto guarded(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed ") + what + ": " + e.what());
  }
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) r.push_back(m(i, c));
    rows.push_back(std::move(r));
  }
  return rows;
}

Matrix matrix_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ConfigError(std::string(what) + " must be a non-empty array");
  const auto cols = j[0].size();
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_array() || j[i].size() != cols) {
      throw ConfigError(std::string(what) + " rows must have equal length");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = j[i][c].get<double>();
    }
  }
  return m;
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

const char* kind_name(TreeKind k) { return k == TreeKind::Chain ? "chain" : "concurrent"; }

TreeKind kind_from(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "concurrent") return TreeKind::Concurrent;
  if (s == "chain") return TreeKind::Chain;
  throw ConfigError("unknown tree kind '" + s + "' (expected concurrent, chain)");
}

json root_json(const RootDistribution& r) {
  if (const auto* c = std::get_if<UniformCube>(&r)) {
    json j{{"type", "uniform-cube"}, {"half_width", c->half_width}};
    if (c->center.size() != 0) j["center"] = vector_json(c->center);
    return j;
  }
  if (const auto* g = std::get_if<GaussianRoot>(&r)) {
    json j{{"type", "gaussian"}, {"stddev", g->stddev}};
    if (g->mean.size() != 0) j["mean"] = vector_json(g->mean);
    return j;
  }
  const auto& f = std::get<FixedRoot>(r);
  json j{{"type", "fixed"}};
  if (f.point.size() != 0) j["point"] = vector_json(f.point);
  return j;
}

const char* root_type(const RootDistribution& r) {
  if (std::holds_alternative<UniformCube>(r)) return "uniform-cube";
  if (std::holds_alternative<GaussianRoot>(r)) return "gaussian";
  return "fixed";
}

// Keys absent from `j` keep their value in `base` when the type is unchanged.
RootDistribution root_from(const json& j, const RootDistribution& base) {
  check_object(j, "root");
  const auto type = j.value("type", std::string(root_type(base)));
  const bool same = type == root_type(base);
  if (type == "uniform-cube") {
    check_keys(j, {"type", "half_width", "center"}, "root");
    UniformCube c = same ? std::get<UniformCube>(base) : UniformCube{};
    c.half_width = j.value("half_width", c.half_width);
    if (j.contains("center")) c.center = vector_from(j["center"]);
    return c;
  }
  if (type == "gaussian") {
    check_keys(j, {"type", "stddev", "mean"}, "root");
    GaussianRoot g = same ? std::get<GaussianRoot>(base) : GaussianRoot{};
    g.stddev = j.value("stddev", g.stddev);
    if (j.contains("mean")) g.mean = vector_from(j["mean"]);
    return g;
  }
  if (type == "fixed") {
    check_keys(j, {"type", "point"}, "root");
    FixedRoot f = same ? std::get<FixedRoot>(base) : FixedRoot{};
    if (j.contains("point")) f.point = vector_from(j["point"]);
    return f;
  }
  throw ConfigError("unknown root type '" + type + "' (expected uniform-cube, gaussian, fixed)");
}

json dataset_json(const FlowDataset& ds) {
  if (const auto* s = std::get_if<SwissRollData>(&ds)) {
    return {{"type", "swiss-roll"}, {"n", s->n}, {"noise", s->noise}};
  }
  if (const auto* g = std::get_if<Gaussians25Data>(&ds)) {
    return {{"type", "gaussians-25"}, {"n", g->n}};
  }
  const auto& g = std::get<GaussianShiftData>(ds);
  return {{"type", "gaussian-shift"}, {"d", g.d}, {"n", g.n}, {"shift", g.shift}};
}

FlowDataset dataset_from(const json& j, const FlowDataset& base) {
  check_object(j, "dataset");
  const auto type = j.value("type", dataset_name(base));
  if (type == "swiss-roll") {
    check_keys(j, {"type", "n", "noise"}, "dataset");
    SwissRollData s;
    if (const auto* b = std::get_if<SwissRollData>(&base)) s = *b;
    s.n = j.value("n", s.n);
    s.noise = j.value("noise", s.noise);
    return s;
  }
  if (type == "gaussians-25") {
    check_keys(j, {"type", "n"}, "dataset");
    Gaussians25Data g;
    if (const auto* b = std::get_if<Gaussians25Data>(&base)) g = *b;
    g.n = j.value("n", g.n);
    return g;
  }
  if (type == "gaussian-shift") {
    check_keys(j, {"type", "d", "n", "shift"}, "dataset");
    GaussianShiftData g;
    if (const auto* b = std::get_if<GaussianShiftData>(&base)) g = *b;
    g.d = j.value("d", g.d);
    g.n = j.value("n", g.n);
    g.shift = j.value("shift", g.shift);
    return g;
  }
  throw ConfigError("unknown dataset '" + type +
                    "' (expected swiss-roll, gaussians-25, gaussian-shift)");
}

}  // namespace

json to_json(const SeedSpec& s) { return {{"master", s.master}, {"stream", s.stream}}; }

SeedSpec seed_from_json(const json& j, SeedSpec base) {
  return guarded("seed", [&] {
    check_keys(j, {"master", "stream"}, "seed");
    base.master = j.value("master", base.master);
    base.stream = j.value("stream", base.stream);
    return base;
  });
}

json to_json(const TreeSystem& t) {
  json j{{"kind", kind_name(t.kind)},
         {"roots", matrix_json(t.roots)},
         {"directions", matrix_json(t.directions)}};
  if (t.kind == TreeKind::Chain) j["attachments"] = t.attachments;
  return j;
}

TreeSystem tree_from_json(const json& j) {
  return guarded("tree system", [&] {
    check_keys(j, {"kind", "roots", "directions", "attachments"}, "tree system");
    TreeSystem t;
    t.kind = kind_from(j.at("kind"));
    t.roots = matrix_from(j.at("roots"), "roots");
    t.directions = matrix_from(j.at("directions"), "directions");
    if (j.contains("attachments")) t.attachments = j["attachments"].get<std::vector<double>>();
    validate_tree(t);
    return t;
  });
}

json to_json(const std::vector<TreeSystem>& trees) {
  json a = json::array();
  for (const auto& t : trees) a.push_back(to_json(t));
  return a;
}

std::vector<TreeSystem> trees_from_json(const json& j) {
  if (!j.is_array()) throw ConfigError("tree list must be a JSON array");
  std::vector<TreeSystem> out;
  out.reserve(j.size());
  for (const auto& t : j) out.push_back(tree_from_json(t));
  return out;
}

json to_json(const ProjectedMeasure& p) {
  json lines = json::array();
  for (const auto& l : p.lines) lines.push_back({{"coords", l.coords}, {"masses", l.masses}});
  return {{"lines", std::move(lines)}};
}

json to_json(const SplittingConfig& s) {
  return {{"delta", s.delta},
          {"mode", s.mode == SplitMode::UniformSplit ? "uniform" : "distance-softmax"}};
}

SplittingConfig splitting_from_json(const json& j, SplittingConfig base) {
  return guarded("splitting", [&] {
    check_keys(j, {"delta", "mode"}, "splitting");
    base.delta = j.value("delta", base.delta);
    if (j.contains("mode")) {
      const auto m = j["mode"].get<std::string>();
      if (m == "distance-softmax") {
        base.mode = SplitMode::DistanceSoftmax;
      } else if (m == "uniform") {
        base.mode = SplitMode::UniformSplit;
      } else {
        throw ConfigError("unknown splitting mode '" + m + "' (expected distance-softmax, uniform)");
      }
    }
    return base;
  });
}

json to_json(const TreeSamplerConfig& s) {
  return {{"k", s.k},
          {"root", root_json(s.root)},
          {"orthogonalize", s.orthogonalize},
          {"structure", kind_name(s.structure)},
          {"step_half_width", s.step_half_width},
          {"step_half_widths", s.step_half_widths}};
}

TreeSamplerConfig sampler_from_json(const json& j, TreeSamplerConfig base) {
  return guarded("sampler", [&] {
    check_keys(j,
               {"k", "root", "orthogonalize", "structure", "step_half_width", "step_half_widths"},
               "sampler");
    base.k = j.value("k", base.k);
    if (j.contains("root")) base.root = root_from(j["root"], base.root);
    base.orthogonalize = j.value("orthogonalize", base.orthogonalize);
    if (j.contains("structure")) base.structure = kind_from(j["structure"]);
    base.step_half_width = j.value("step_half_width", base.step_half_width);
    if (j.contains("step_half_widths")) {
      base.step_half_widths = j["step_half_widths"].get<std::vector<double>>();
    }
    return base;
  });
}

json to_json(const EstimatorConfig& c) {
  return {{"variant", to_string(c.variant)}, {"L", c.L},
          {"k", c.k},                        {"p", c.p},
          {"splitting", to_json(c.splitting)}, {"sampler", to_json(c.sampler)},
          {"seed", to_json(c.seed)}};
}

EstimatorConfig estimator_from_json(const json& j, EstimatorConfig base) {
  return guarded("estimator", [&] {
    check_keys(j, {"variant", "L", "k", "p", "splitting", "sampler", "seed"}, "estimator");
    if (j.contains("variant")) base.variant = parse_variant(j["variant"].get<std::string>());
    base.L = j.value("L", base.L);
    base.k = j.value("k", base.k);
    base.p = j.value("p", base.p);
    if (j.contains("splitting")) base.splitting = splitting_from_json(j["splitting"], base.splitting);
    if (j.contains("sampler")) base.sampler = sampler_from_json(j["sampler"], base.sampler);
    if (j.contains("seed")) base.seed = seed_from_json(j["seed"], base.seed);
    return base;
  });
}

json to_json(const DistanceReport& r) {
  return {{"value", r.value},
          {"per_system", r.per_system},
          {"wall_seconds", r.wall_seconds},
          {"config", to_json(r.config)}};
}

json to_json(const FlowConfig& c) {
  return {{"distance", to_json(c.distance)},
          {"learning_rate", c.learning_rate},
          {"optimizer", to_string(c.optimizer)},
          {"center_roots", c.center_roots},
          {"iterations", c.iterations},
          {"eval_stride", c.eval_stride},
          {"dataset", dataset_json(c.dataset)},
          {"seed", to_json(c.seed)},
          {"divergence_factor", c.divergence_factor}};
}

FlowConfig flow_from_json(const json& j, FlowConfig base) {
  return guarded("flow config", [&] {
    check_keys(j,
               {"distance", "learning_rate", "optimizer", "center_roots", "iterations",
                "eval_stride", "dataset", "seed", "divergence_factor"},
               "flow config");
    if (j.contains("distance")) base.distance = estimator_from_json(j["distance"], base.distance);
    base.learning_rate = j.value("learning_rate", base.learning_rate);
    if (j.contains("optimizer")) base.optimizer = parse_optimizer(j["optimizer"].get<std::string>());
    base.center_roots = j.value("center_roots", base.center_roots);
    base.iterations = j.value("iterations", base.iterations);
    base.eval_stride = j.value("eval_stride", base.eval_stride);
    if (j.contains("dataset")) base.dataset = dataset_from(j["dataset"], base.dataset);
    if (j.contains("seed")) base.seed = seed_from_json(j["seed"], base.seed);
    base.divergence_factor = j.value("divergence_factor", base.divergence_factor);
    return base;
  });
}

json to_json(const FlowTrace& t) {
  json recs = json::array();
  for (const auto& r : t.records) {
    recs.push_back({{"iteration", r.iteration},
                    {"w2", r.w2},
                    {"estimate", r.estimate},
                    {"seconds", r.seconds}});
  }
  json j{{"dataset", t.dataset}, {"records", std::move(recs)}};
  if (t.final_source.size() != 0) j["final_source"] = matrix_json(t.final_source);
  return j;
}

json to_json(const TransferConfig& c) {
  return {{"iterations", c.iterations},
          {"step", c.step},
          {"L", c.L},
          {"k", c.k},
          {"splitting", to_json(c.splitting)},
          {"variant", to_string(c.variant)},
          {"rounding_fraction", c.rounding_fraction},
          {"seed", to_json(c.seed)},
          {"record_stride", c.record_stride},
          {"divergence_factor", c.divergence_factor}};
}

TransferConfig transfer_from_json(const json& j, TransferConfig base) {
  return guarded("transfer config", [&] {
    check_keys(j,
               {"iterations", "step", "L", "k", "splitting", "variant", "rounding_fraction", "seed",
                "record_stride", "divergence_factor"},
               "transfer config");
    base.iterations = j.value("iterations", base.iterations);
    base.step = j.value("step", base.step);
    base.L = j.value("L", base.L);
    base.k = j.value("k", base.k);
    if (j.contains("splitting")) base.splitting = splitting_from_json(j["splitting"], base.splitting);
    if (j.contains("variant")) base.variant = parse_variant(j["variant"].get<std::string>());
    base.rounding_fraction = j.value("rounding_fraction", base.rounding_fraction);
    if (j.contains("seed")) base.seed = seed_from_json(j["seed"], base.seed);
    base.record_stride = j.value("record_stride", base.record_stride);
    base.divergence_factor = j.value("divergence_factor", base.divergence_factor);
    return base;
  });
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in '" + path.string() + "': " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace dbtsw
