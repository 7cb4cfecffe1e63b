#include "sofa/harness/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include "sofa/objectives.hpp"

namespace sofa::harness {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& key, const std::string& what) {
  throw std::invalid_argument("config: " + key + ": " + what);
}

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(where, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(where + "." + item.key(), "unknown key");
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::size_t count_or(const json& obj, const std::string& key, std::size_t fallback,
                     const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
    fail(where + "." + key, "expected a non-negative integer");
  }
  return v.get<std::size_t>();
}

// Number (broadcast to `dims`) or array of exactly `dims` numbers.
std::vector<double> vector_of(const json& v, std::size_t dims, const std::string& where) {
  if (v.is_number()) return std::vector<double>(dims, v.get<double>());
  if (!v.is_array()) fail(where, "expected a number or an array");
  if (v.size() != dims) {
    fail(where, "expected " + std::to_string(dims) + " values, got " + std::to_string(v.size()));
  }
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) fail(where, "expected numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::array<double, dvm::kStageCount> stage_array(const json& obj, const std::string& key,
                                                 std::array<double, dvm::kStageCount> fallback,
                                                 const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto v = vector_of(obj.at(key), dvm::kStageCount, where + "." + key);
  return {v[0], v[1], v[2]};
}

std::size_t dvm_dimension(const json& objective) {
  const std::size_t n = 2 * count_or(objective, "harmonics", 2, "objective") + 1;
  return dvm::kStageCount * n;
}

SearchDomain parse_domain(const json& doc, const json& objective) {
  const std::string where = "domain";
  only_keys(doc, where, {"dimension", "centers", "widths", "from_piecewise"});
  if (doc.contains("from_piecewise")) {
    if (objective.value("type", "") != "dvm") fail(where, "from_piecewise needs a dvm objective");
    const json& p = doc.at("from_piecewise");
    const std::string pw = where + ".from_piecewise";
    only_keys(p, pw, {"stages", "constant_width", "harmonic_width", "decay"});
    const json& stages = p.at("stages");
    if (!stages.is_array() || stages.size() != dvm::kStageCount) fail(pw + ".stages", "expected 3 stages");
    dvm::PiecewiseTrajectory traj;
    for (std::size_t s = 0; s < dvm::kStageCount; ++s) {
      const std::string sw = pw + ".stages[" + std::to_string(s) + "]";
      only_keys(stages[s], sw, {"shallow", "deep", "t0", "t1"});
      try {
        traj.stages[s] = dvm::PiecewiseStage::symmetric(number(stages[s], "shallow", sw),
                                                        number(stages[s], "deep", sw),
                                                        number(stages[s], "t0", sw),
                                                        number(stages[s], "t1", sw));
      } catch (const std::invalid_argument& e) {
        fail(sw, e.what());
      }
    }
    const std::size_t harmonics = count_or(objective, "harmonics", 2, "objective");
    const auto start = dvm::fourier_of_piecewise(traj, harmonics);
    return dvm::domain_around(start, number(p, "constant_width", pw), number(p, "harmonic_width", pw),
                              number_or(p, "decay", 1.0, pw));
  }
  std::size_t dims = 0;
  if (doc.contains("dimension")) {
    dims = count_or(doc, "dimension", 0, where);
  } else if (doc.contains("centers") && doc.at("centers").is_array()) {
    dims = doc.at("centers").size();
  } else if (doc.contains("widths") && doc.at("widths").is_array()) {
    dims = doc.at("widths").size();
  } else if (objective.value("type", "") == "dvm") {
    dims = dvm_dimension(objective);
  }
  if (dims == 0) fail(where, "cannot infer the dimension; give \"dimension\" or arrays");
  if (!doc.contains("widths")) fail(where + ".widths", "required");
  std::vector<double> centers =
      doc.contains("centers") ? vector_of(doc.at("centers"), dims, where + ".centers")
                              : std::vector<double>(dims, 0.0);
  std::vector<double> widths = vector_of(doc.at("widths"), dims, where + ".widths");
  try {
    return SearchDomain(std::move(centers), std::move(widths));
  } catch (const std::invalid_argument& e) {
    fail(where, e.what());
  }
}

Objective parse_objective(const json& doc, const SearchDomain& domain,
                          std::shared_ptr<const dvm::DvmModel>& model) {
  const std::string where = "objective";
  if (!doc.is_object() || !doc.contains("type") || !doc.at("type").is_string()) {
    fail(where + ".type", "required string");
  }
  const std::string type = doc.at("type").get<std::string>();
  const std::size_t dims = domain.dimension();
  try {
    if (type == "constant") {
      only_keys(doc, where, {"type", "value"});
      return constant_objective(number_or(doc, "value", 1.0, where));
    }
    if (type == "gaussian_bump") {
      only_keys(doc, where, {"type", "center", "width"});
      return gaussian_bump(vector_of(doc.value("center", json(0.0)), dims, where + ".center"),
                           number(doc, "width", where));
    }
    if (type == "two_bump") {
      only_keys(doc, where, {"type", "center1", "height1", "center2", "height2", "width"});
      return two_bump(vector_of(doc.at("center1"), dims, where + ".center1"),
                      number_or(doc, "height1", 1.0, where),
                      vector_of(doc.at("center2"), dims, where + ".center2"),
                      number_or(doc, "height2", 0.9, where), number(doc, "width", where));
    }
    if (type == "spiky") {
      only_keys(doc, where, {"type", "base_center", "base_width", "spike_center", "spike_width",
                             "spike_height", "background"});
      return spiky(vector_of(doc.value("base_center", json(0.0)), dims, where + ".base_center"),
                   number(doc, "base_width", where),
                   vector_of(doc.at("spike_center"), dims, where + ".spike_center"),
                   number(doc, "spike_width", where), number(doc, "spike_height", where),
                   number_or(doc, "background", 1e-3, where));
    }
    if (type == "dvm") {
      only_keys(doc, where, {"type", "harmonics", "fitness_scale", "environment", "eigen"});
      if (dims != dvm_dimension(doc)) {
        fail(where, "domain dimension " + std::to_string(dims) + " does not match 3 (2N + 1) = " +
                        std::to_string(dvm_dimension(doc)));
      }
      dvm::EigenOptions eigen;
      if (doc.contains("eigen")) {
        const json& e = doc.at("eigen");
        only_keys(e, where + ".eigen", {"lo", "hi", "scan_points"});
        eigen.lo = number_or(e, "lo", eigen.lo, where + ".eigen");
        eigen.hi = number_or(e, "hi", eigen.hi, where + ".eigen");
        eigen.scan_points = count_or(e, "scan_points", eigen.scan_points, where + ".eigen");
      }
      model = std::make_shared<const dvm::DvmModel>(
          parse_environment(doc.value("environment", json::object())),
          count_or(doc, "harmonics", 2, where), number_or(doc, "fitness_scale", 1.0, where), eigen);
      return model->objective();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(where, e.what());
  }
  fail(where + ".type", "unknown objective '" + type + "'");
}

}  // namespace

SofaConfig parse_sofa(const json& doc) {
  const std::string where = "sofa";
  SofaConfig c;
  if (doc.is_null()) return c;
  only_keys(doc, where, {"kernel", "initial_dims", "dims_block", "growth_interval", "max_dims",
                         "termination_std_threshold", "termination_window", "infeasible",
                         "gaussian_radius"});
  if (doc.contains("kernel")) {
    const json& k = doc.at("kernel");
    only_keys(k, where + ".kernel", {"type", "a", "b"});
    const std::string type = k.value("type", "cauchy");
    if (type == "cauchy") {
      SimplifiedCauchy cauchy;
      cauchy.a = number_or(k, "a", cauchy.a, where + ".kernel");
      cauchy.b = number_or(k, "b", cauchy.b, where + ".kernel");
      c.kernel = cauchy;
    } else if (type == "gaussian") {
      if (k.contains("a") || k.contains("b")) fail(where + ".kernel", "gaussian takes no a/b");
      c.kernel = BasicGaussian{};
    } else {
      fail(where + ".kernel.type", "expected \"cauchy\" or \"gaussian\"");
    }
  }
  c.initial_dims = count_or(doc, "initial_dims", c.initial_dims, where);
  c.dims_block = count_or(doc, "dims_block", c.dims_block, where);
  c.growth_interval = count_or(doc, "growth_interval", c.growth_interval, where);
  c.max_dims = count_or(doc, "max_dims", c.max_dims, where);
  if (doc.contains("termination_std_threshold") && !doc.at("termination_std_threshold").is_null()) {
    c.termination_std_threshold = number(doc, "termination_std_threshold", where);
  }
  c.termination_window = count_or(doc, "termination_window", c.termination_window, where);
  if (doc.contains("infeasible")) {
    const json& p = doc.at("infeasible");
    only_keys(p, where + ".infeasible", {"policy", "max_retries", "floor"});
    const std::string policy = p.value("policy", "reject");
    if (policy == "reject") {
      c.infeasible_policy = RejectResample{count_or(p, "max_retries", 100, where + ".infeasible")};
    } else if (policy == "floor") {
      FloorFitness f;
      if (p.contains("floor")) f.floor = number(p, "floor", where + ".infeasible");
      c.infeasible_policy = f;
    } else {
      fail(where + ".infeasible.policy", "expected \"reject\" or \"floor\"");
    }
  }
  if (doc.contains("gaussian_radius")) {
    const std::string r = doc.at("gaussian_radius").get<std::string>();
    if (r == "full_cube") {
      c.gaussian_radius = GaussianRadius::FullCube;
    } else if (r == "active_projection") {
      c.gaussian_radius = GaussianRadius::ActiveProjection;
    } else {
      fail(where + ".gaussian_radius", "expected \"full_cube\" or \"active_projection\"");
    }
  }
  return c;
}

dvm::EnvironmentConfig parse_environment(const json& doc) {
  const std::string w = "objective.environment";
  only_keys(doc, w,
            {"daylight", "surface_light", "light_attenuation", "light_half_saturation",
             "visual_predation", "background_mortality", "max_depth", "boundary_mortality",
             "food_max", "food_peak_depth", "food_layer_width", "food_half_saturation",
             "max_intake", "feeding_depth", "feeding_depth_softness", "feeding_speed_threshold",
             "feeding_speed_softness", "basal_cost_surface", "basal_cost_deep",
             "thermocline_depth", "thermocline_width", "ascent_cost", "young_maturation_energy",
             "juvenile_maturation_energy", "adult_lifespan", "egg_conversion",
             "quadrature_points"});
  dvm::EnvironmentConfig e;
  if (doc.contains("daylight")) {
    const std::string d = doc.at("daylight").get<std::string>();
    if (d == "diel") {
      e.daylight = dvm::EnvironmentConfig::Daylight::Diel;
    } else if (d == "constant") {
      e.daylight = dvm::EnvironmentConfig::Daylight::Constant;
    } else {
      fail(w + ".daylight", "expected \"diel\" or \"constant\"");
    }
  }
  e.surface_light = number_or(doc, "surface_light", e.surface_light, w);
  e.light_attenuation = number_or(doc, "light_attenuation", e.light_attenuation, w);
  e.light_half_saturation = number_or(doc, "light_half_saturation", e.light_half_saturation, w);
  e.visual_predation = stage_array(doc, "visual_predation", e.visual_predation, w);
  e.background_mortality = stage_array(doc, "background_mortality", e.background_mortality, w);
  e.max_depth = number_or(doc, "max_depth", e.max_depth, w);
  e.boundary_mortality = number_or(doc, "boundary_mortality", e.boundary_mortality, w);
  e.food_max = number_or(doc, "food_max", e.food_max, w);
  e.food_peak_depth = number_or(doc, "food_peak_depth", e.food_peak_depth, w);
  e.food_layer_width = number_or(doc, "food_layer_width", e.food_layer_width, w);
  e.food_half_saturation = number_or(doc, "food_half_saturation", e.food_half_saturation, w);
  e.max_intake = stage_array(doc, "max_intake", e.max_intake, w);
  e.feeding_depth = number_or(doc, "feeding_depth", e.feeding_depth, w);
  e.feeding_depth_softness = number_or(doc, "feeding_depth_softness", e.feeding_depth_softness, w);
  e.feeding_speed_threshold = number_or(doc, "feeding_speed_threshold", e.feeding_speed_threshold, w);
  e.feeding_speed_softness = number_or(doc, "feeding_speed_softness", e.feeding_speed_softness, w);
  e.basal_cost_surface = stage_array(doc, "basal_cost_surface", e.basal_cost_surface, w);
  e.basal_cost_deep = stage_array(doc, "basal_cost_deep", e.basal_cost_deep, w);
  e.thermocline_depth = number_or(doc, "thermocline_depth", e.thermocline_depth, w);
  e.thermocline_width = number_or(doc, "thermocline_width", e.thermocline_width, w);
  e.ascent_cost = stage_array(doc, "ascent_cost", e.ascent_cost, w);
  e.young_maturation_energy = number_or(doc, "young_maturation_energy", e.young_maturation_energy, w);
  e.juvenile_maturation_energy =
      number_or(doc, "juvenile_maturation_energy", e.juvenile_maturation_energy, w);
  e.adult_lifespan = number_or(doc, "adult_lifespan", e.adult_lifespan, w);
  e.egg_conversion = number_or(doc, "egg_conversion", e.egg_conversion, w);
  e.quadrature_points = count_or(doc, "quadrature_points", e.quadrature_points, w);
  try {
    e.validate();
  } catch (const std::invalid_argument& ex) {
    fail(w, ex.what());
  }
  return e;
}

json environment_to_json(const dvm::EnvironmentConfig& e) {
  auto arr = [](const std::array<double, dvm::kStageCount>& a) { return json::array({a[0], a[1], a[2]}); };
  return json{
      {"daylight", e.daylight == dvm::EnvironmentConfig::Daylight::Diel ? "diel" : "constant"},
      {"surface_light", e.surface_light},
      {"light_attenuation", e.light_attenuation},
      {"light_half_saturation", e.light_half_saturation},
      {"visual_predation", arr(e.visual_predation)},
      {"background_mortality", arr(e.background_mortality)},
      {"max_depth", e.max_depth},
      {"boundary_mortality", e.boundary_mortality},
      {"food_max", e.food_max},
      {"food_peak_depth", e.food_peak_depth},
      {"food_layer_width", e.food_layer_width},
      {"food_half_saturation", e.food_half_saturation},
      {"max_intake", arr(e.max_intake)},
      {"feeding_depth", e.feeding_depth},
      {"feeding_depth_softness", e.feeding_depth_softness},
      {"feeding_speed_threshold", e.feeding_speed_threshold},
      {"feeding_speed_softness", e.feeding_speed_softness},
      {"basal_cost_surface", arr(e.basal_cost_surface)},
      {"basal_cost_deep", arr(e.basal_cost_deep)},
      {"thermocline_depth", e.thermocline_depth},
      {"thermocline_width", e.thermocline_width},
      {"ascent_cost", arr(e.ascent_cost)},
      {"young_maturation_energy", e.young_maturation_energy},
      {"juvenile_maturation_energy", e.juvenile_maturation_energy},
      {"adult_lifespan", e.adult_lifespan},
      {"egg_conversion", e.egg_conversion},
      {"quadrature_points", e.quadrature_points},
  };
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  const std::string where = "config";
  only_keys(doc, where,
            {"name", "seed", "repetitions", "iterations", "workers", "deltas", "output_dir",
             "objective", "domain", "sofa", "reference", "estimate", "density", "record_files",
             "unfeasible_window", "baseline"});
  ExperimentConfig c;
  c.raw = doc;
  try {
    c.name = doc.value("name", c.name);
    if (doc.contains("seed")) c.seed = doc.at("seed").get<std::uint64_t>();
    c.repetitions = count_or(doc, "repetitions", c.repetitions, where);
    c.iterations = count_or(doc, "iterations", c.iterations, where);
    c.workers = count_or(doc, "workers", c.workers, where);
    if (doc.contains("deltas")) {
      c.deltas.clear();
      for (const json& d : doc.at("deltas")) c.deltas.push_back(d.get<double>());
    }
    if (doc.contains("output_dir")) c.output_dir = doc.at("output_dir").get<std::string>();
    if (c.output_dir.is_relative() && !base_dir.empty()) c.output_dir = base_dir / c.output_dir;
    if (!doc.contains("objective")) fail("objective", "required");
    if (!doc.contains("domain")) fail("domain", "required");
    c.objective = doc.at("objective");
    c.domain = doc.at("domain");
    c.sofa = parse_sofa(doc.value("sofa", json()));
    if (doc.contains("reference")) {
      const json& r = doc.at("reference");
      only_keys(r, "reference", {"J_star", "v_star"});
      ReferenceOptimum ref;
      ref.value = number(r, "J_star", "reference");
      if (r.contains("v_star")) ref.coords = r.at("v_star").get<std::vector<double>>();
      ref.source = "config";
      c.reference = ref;
    }
    if (doc.contains("estimate")) {
      const json& e = doc.at("estimate");
      only_keys(e, "estimate", {"iterations_multiplier", "seeds"});
      c.estimate.iterations_multiplier =
          count_or(e, "iterations_multiplier", c.estimate.iterations_multiplier, "estimate");
      c.estimate.seeds = count_or(e, "seeds", c.estimate.seeds, "estimate");
    }
    if (doc.contains("density")) {
      const json& d = doc.at("density");
      only_keys(d, "density", {"coordinate", "checkpoints", "grid", "run"});
      DensityOptions opt;
      // 1-based in the file, matching the x1..xD record columns.
      const std::size_t coordinate = count_or(d, "coordinate", 1, "density");
      if (coordinate < 1) fail("density.coordinate", "coordinates are numbered from 1");
      opt.coordinate = coordinate - 1;
      if (d.contains("checkpoints")) opt.checkpoints = d.at("checkpoints").get<std::vector<std::size_t>>();
      opt.grid = count_or(d, "grid", opt.grid, "density");
      opt.run = count_or(d, "run", opt.run, "density");
      c.density = opt;
    }
    if (doc.contains("record_files")) {
      const json& r = doc.at("record_files");
      if (r.is_string() && r.get<std::string>() == "all") {
        c.record_files = {RecordFiles::Mode::All, 0};
      } else if (r.is_string() && r.get<std::string>() == "none") {
        c.record_files = {RecordFiles::Mode::None, 0};
      } else if (r.is_number_unsigned() || r.is_number_integer()) {
        c.record_files = {RecordFiles::Mode::First, r.get<std::size_t>()};
      } else {
        fail("record_files", "expected \"all\", \"none\" or a run count");
      }
    }
    c.unfeasible_window = count_or(doc, "unfeasible_window", c.unfeasible_window, where);
    c.baseline = doc.value("baseline", c.baseline);
  } catch (const nlohmann::json::exception& e) {
    fail(where, e.what());
  }

  if (c.repetitions < 1) fail("repetitions", "must be at least 1");
  if (c.iterations < 1) fail("iterations", "must be at least 1");
  if (c.deltas.empty()) fail("deltas", "need at least one threshold");
  for (double d : c.deltas) {
    if (!(d > 0.0) || !std::isfinite(d)) fail("deltas", "thresholds must be positive");
  }
  if (c.unfeasible_window < 1) fail("unfeasible_window", "must be positive");
  if (c.estimate.iterations_multiplier < 1 || c.estimate.seeds < 1) {
    fail("estimate", "multiplier and seeds must be positive");
  }
  if (c.reference && !(c.reference->value > 0.0)) fail("reference.J_star", "must be positive");

  const Problem problem = build_problem(c);
  SofaConfig probe = c.sofa;
  probe.max_iterations = c.iterations;
  try {
    probe = resolve(probe, problem.domain);
  } catch (const std::invalid_argument& e) {
    fail("sofa", e.what());
  }
  if (c.reference && !c.reference->coords.empty() &&
      c.reference->coords.size() != problem.domain.dimension()) {
    fail("reference.v_star", "length does not match the domain");
  }
  if (c.density) {
    if (c.density->coordinate >= problem.domain.dimension()) fail("density.coordinate", "out of range");
    if (c.density->grid < 1) fail("density.grid", "must be positive");
    if (c.density->run >= c.repetitions) fail("density.run", "must be below repetitions");
    for (std::size_t k : c.density->checkpoints) {
      if (k < 1 || k > c.iterations) fail("density.checkpoints", "must lie in [1, iterations]");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config: " + path.string() + ": " + e.what());
  }
  return parse_config(doc);
}

Problem build_problem(const ExperimentConfig& config) {
  SearchDomain domain = parse_domain(config.domain, config.objective);
  std::shared_ptr<const dvm::DvmModel> model;
  Objective objective = parse_objective(config.objective, domain, model);
  return Problem{std::move(domain), std::move(objective), std::move(model)};
}

}  // namespace sofa::harness
