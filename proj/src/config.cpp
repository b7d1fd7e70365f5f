#include "prmmc/config.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "prmmc/csv.hpp"

namespace prmmc {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end())
      throw ConfigError(ctx + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& ctx) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(ctx + "." + key + ": wrong type");
  }
}

void parse_model(const json& j, RunConfig& cfg) {
  check_keys(j, "model", {"kind", "seasonal", "vitality", "immigration", "season_period"});
  cfg.model.kind = get_or<std::string>(j, "kind", "sir", "model");
  if (cfg.model.kind != "sir" && cfg.model.kind != "seir" && cfg.model.kind != "seirs")
    throw ConfigError("model.kind must be sir, seir, or seirs");
  cfg.model.seasonal = get_or(j, "seasonal", false, "model");
  cfg.model.vitality = get_or(j, "vitality", false, "model");
  cfg.model.immigration = get_or(j, "immigration", false, "model");
  cfg.model.season_period = get_or(j, "season_period", 365.0, "model");
  if (cfg.model.season_period <= 0.0)
    throw ConfigError("model.season_period must be positive");
}

void parse_params(const json& j, RunConfig& cfg) {
  for (const auto& [key, val] : j.items()) {
    if (double* f = param_field(cfg.params, key)) {
      if (!val.is_number()) throw ConfigError("params." + key + ": not a number");
      *f = val.get<double>();
      if (!in_physical_support(key, *f))
        throw ConfigError("params." + key + ": outside physical support");
      continue;
    }
    std::int64_t* ic = nullptr;
    if (key == "s0") ic = &cfg.params.s0;
    else if (key == "e0") ic = &cfg.params.e0;
    else if (key == "i0") ic = &cfg.params.i0;
    else if (key == "r0") ic = &cfg.params.r0;
    if (!ic) throw ConfigError("params: unknown parameter '" + key + "'");
    if (!val.is_number_integer() || val.get<std::int64_t>() < 0)
      throw ConfigError("params." + key + ": must be a nonnegative integer");
    *ic = val.get<std::int64_t>();
  }
}

void parse_priors(const json& j, RunConfig& cfg) {
  for (const auto& [key, val] : j.items()) {
    Params probe;
    if (!param_field(probe, key))
      throw ConfigError("priors: unknown parameter '" + key + "'");
    if (!val.is_object()) throw ConfigError("priors." + key + ": expected object");
    check_keys(val, "priors." + key, {"kind", "a", "b"});
    PriorSpec spec;
    try {
      spec.kind = prior_kind_from_string(get_or<std::string>(val, "kind", "", "priors"));
    } catch (const std::domain_error& e) {
      throw ConfigError("priors." + key + ": " + e.what());
    }
    spec.a = get_or(val, "a", 0.0, "priors." + key);
    spec.b = get_or(val, "b", 0.0, "priors." + key);
    if (spec.kind == PriorKind::fixed) continue;  // explicit non-sampled marker
    if (spec.kind == PriorKind::uniform && !(spec.a < spec.b))
      throw ConfigError("priors." + key + ": uniform needs a < b");
    if ((spec.kind == PriorKind::normal || spec.kind == PriorKind::lognormal) &&
        !(spec.b > 0.0))
      throw ConfigError("priors." + key + ": scale b must be positive");
    cfg.space.names.push_back(key);
    cfg.space.priors.push_back(spec);
  }
}

DataKind parse_kind(const json& val, const std::string& ctx) {
  try {
    return data_kind_from_string(val.get<std::string>());
  } catch (const std::exception&) {
    throw ConfigError(ctx + ": bad observation kind");
  }
}

void parse_data(const json& j, RunConfig& cfg) {
  if (!j.is_array()) throw ConfigError("data: expected an array");
  int idx = 0;
  for (const auto& entry : j) {
    const std::string ctx = "data[" + std::to_string(idx++) + "]";
    if (!entry.is_object()) throw ConfigError(ctx + ": expected object");
    check_keys(entry, ctx, {"kind", "path", "n_sero", "positives", "t_obs"});
    DataRef ref;
    if (!entry.contains("kind")) throw ConfigError(ctx + ".kind required");
    ref.kind = parse_kind(entry.at("kind"), ctx + ".kind");
    if (ref.kind == DataKind::seroprevalence) {
      ref.n_sero = get_or<std::int64_t>(entry, "n_sero", 0, ctx);
      ref.positives = get_or<std::int64_t>(entry, "positives", 0, ctx);
      ref.t_obs = get_or(entry, "t_obs", 0.0, ctx);
      if (ref.n_sero < 1) throw ConfigError(ctx + ".n_sero must be >= 1");
      if (ref.positives < 0 || ref.positives > ref.n_sero)
        throw ConfigError(ctx + ".positives outside [0, n_sero]");
      if (ref.t_obs < 0.0) throw ConfigError(ctx + ".t_obs must be >= 0");
    } else {
      ref.path = get_or<std::string>(entry, "path", "", ctx);
      if (ref.path.empty()) throw ConfigError(ctx + ".path required");
    }
    cfg.data.push_back(std::move(ref));
  }
}

}  // namespace

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file: " + path);
  json root;
  try {
    root = json::parse(f);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!root.is_object()) throw ConfigError(path + ": config root must be an object");
  check_keys(root, "config",
             {"model", "params", "priors", "sample_ics", "grid", "mcmc", "simulator",
              "seed", "out_dir", "chains", "data", "simulate", "diagnose", "benchmark"});

  RunConfig cfg;
  if (root.contains("model")) parse_model(root.at("model"), cfg);
  if (root.contains("params")) parse_params(root.at("params"), cfg);
  if (root.contains("priors")) parse_priors(root.at("priors"), cfg);
  cfg.space.sample_ics = get_or(root, "sample_ics", false, "config");

  if (cfg.model.kind == "sir" && cfg.params.e0 != 0)
    throw ConfigError("params.e0 must be 0 for the sir model");
  for (std::size_t i = 0; i < cfg.space.names.size(); ++i)
    if (!cfg.space.priors[i].in_support(param_value(cfg.params, cfg.space.names[i])))
      throw ConfigError("params." + cfg.space.names[i] +
                        ": initial value outside its prior support");

  if (root.contains("grid")) {
    const json& g = root.at("grid");
    check_keys(g, "grid", {"horizon", "obs_interval", "column_width", "u_base"});
    cfg.horizon = get_or(g, "horizon", 0.0, "grid");
    cfg.obs_interval = get_or(g, "obs_interval", 10.0, "grid");
    cfg.column_width = get_or(g, "column_width", 0.0, "grid");
    cfg.u_base = get_or(g, "u_base", 1.0, "grid");
    if (cfg.horizon < 0.0) throw ConfigError("grid.horizon must be positive");
    if (cfg.obs_interval <= 0.0) throw ConfigError("grid.obs_interval must be positive");
    if (cfg.column_width < 0.0) throw ConfigError("grid.column_width must be >= 0");
    if (cfg.u_base <= 0.0) throw ConfigError("grid.u_base must be positive");
  }

  if (root.contains("mcmc")) {
    const json& m = root.at("mcmc");
    check_keys(m, "mcmc",
               {"n_iter", "stride", "adapt_iters", "warmup", "f_nu", "target_accept",
                "init_scale", "slice_width"});
    cfg.n_iter = get_or<long>(m, "n_iter", 0, "mcmc");
    cfg.stride = get_or<long>(m, "stride", 1, "mcmc");
    cfg.proposal.adapt_iters = get_or<long>(m, "adapt_iters", 200000, "mcmc");
    cfg.proposal.warmup = get_or<long>(m, "warmup", 100, "mcmc");
    cfg.proposal.f_nu = get_or(m, "f_nu", 0.05, "mcmc");
    cfg.proposal.target_accept = get_or(m, "target_accept", 0.234, "mcmc");
    cfg.proposal.init_scale = get_or(m, "init_scale", 0.1, "mcmc");
    cfg.slice_width = get_or(m, "slice_width", 0.0, "mcmc");
    if (cfg.n_iter < 0 || cfg.stride < 1 || cfg.proposal.adapt_iters < 0 ||
        cfg.proposal.warmup < 0)
      throw ConfigError("mcmc: iteration counts must be nonnegative, stride >= 1");
    if (!(cfg.proposal.f_nu > 0.0 && cfg.proposal.f_nu <= 1.0))
      throw ConfigError("mcmc.f_nu must be in (0,1]");
    if (!(cfg.proposal.target_accept > 0.0 && cfg.proposal.target_accept < 1.0))
      throw ConfigError("mcmc.target_accept must be in (0,1)");
    if (!(cfg.proposal.init_scale > 0.0))
      throw ConfigError("mcmc.init_scale must be positive");
    if (cfg.slice_width < 0.0) throw ConfigError("mcmc.slice_width must be >= 0");
  }

  const std::string sim = get_or<std::string>(root, "simulator", "exact", "config");
  if (sim != "exact" && sim != "approx")
    throw ConfigError("simulator must be 'exact' or 'approx'");
  cfg.approximate = sim == "approx";

  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned() && !root.at("seed").is_number_integer())
      throw ConfigError("seed must be an unsigned integer");
    const auto s = root.at("seed").get<std::int64_t>();
    if (s < 0) throw ConfigError("seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(s);
    cfg.seed_set = true;
  }
  cfg.out_dir = get_or<std::string>(root, "out_dir", ".", "config");
  cfg.chains = get_or(root, "chains", 1, "config");
  if (cfg.chains < 1) throw ConfigError("chains must be >= 1");

  if (root.contains("data")) parse_data(root.at("data"), cfg);

  if (root.contains("simulate")) {
    const json& s = root.at("simulate");
    check_keys(s, "simulate", {"emit", "rows", "sero_n", "sero_t"});
    if (s.contains("emit")) {
      if (!s.at("emit").is_array()) throw ConfigError("simulate.emit: expected array");
      for (const auto& e : s.at("emit"))
        cfg.simulate.emit.push_back(parse_kind(e, "simulate.emit"));
    }
    cfg.simulate.rows = get_or<std::string>(s, "rows", "jumps", "simulate");
    if (cfg.simulate.rows != "jumps" && cfg.simulate.rows != "observations")
      throw ConfigError("simulate.rows must be 'jumps' or 'observations'");
    cfg.simulate.sero_n = get_or<std::int64_t>(s, "sero_n", 196, "simulate");
    cfg.simulate.sero_t = get_or(s, "sero_t", 0.0, "simulate");
    if (cfg.simulate.sero_n < 1) throw ConfigError("simulate.sero_n must be >= 1");
  }

  if (root.contains("diagnose")) {
    const json& d = root.at("diagnose");
    check_keys(d, "diagnose", {"chain_dir", "residuals", "max_lag", "beta", "free_ics"});
    cfg.diagnose.chain_dir = get_or<std::string>(d, "chain_dir", "", "diagnose");
    cfg.diagnose.residuals = get_or(d, "residuals", true, "diagnose");
    cfg.diagnose.max_lag = get_or(d, "max_lag", 0, "diagnose");
    if (cfg.diagnose.max_lag < 0) throw ConfigError("diagnose.max_lag must be >= 0");
    cfg.diagnose.beta = get_or<std::string>(d, "beta", "beta_m", "diagnose");
    if (d.contains("free_ics")) {
      cfg.diagnose.free_ics.clear();
      for (const auto& e : d.at("free_ics"))
        cfg.diagnose.free_ics.push_back(e.get<std::string>());
      if (cfg.diagnose.free_ics.size() != 2)
        throw ConfigError("diagnose.free_ics must name exactly two columns");
    }
  }

  if (root.contains("benchmark")) {
    const json& b = root.at("benchmark");
    check_keys(b, "benchmark", {"sizes", "compare_simulators"});
    if (b.contains("sizes"))
      for (const auto& e : b.at("sizes")) {
        const auto n = e.get<std::int64_t>();
        if (n < 1) throw ConfigError("benchmark.sizes entries must be >= 1");
        cfg.benchmark.sizes.push_back(n);
      }
    cfg.benchmark.compare_simulators =
        get_or(b, "compare_simulators", false, "benchmark");
  }
  return cfg;
}

void echo_config(const RunConfig& cfg, const std::string& path) {
  json root;
  root["model"] = {{"kind", cfg.model.kind},
                   {"seasonal", cfg.model.seasonal},
                   {"vitality", cfg.model.vitality},
                   {"immigration", cfg.model.immigration},
                   {"season_period", cfg.model.season_period}};
  json params;
  Params p = cfg.params;
  for (const std::string& n : continuous_param_names()) params[n] = param_value(p, n);
  params["s0"] = p.s0;
  params["e0"] = p.e0;
  params["i0"] = p.i0;
  params["r0"] = p.r0;
  root["params"] = params;
  json priors;
  for (std::size_t i = 0; i < cfg.space.names.size(); ++i)
    priors[cfg.space.names[i]] = {{"kind", to_string(cfg.space.priors[i].kind)},
                                  {"a", cfg.space.priors[i].a},
                                  {"b", cfg.space.priors[i].b}};
  root["priors"] = priors;
  root["sample_ics"] = cfg.space.sample_ics;
  root["grid"] = {{"horizon", cfg.horizon},
                  {"obs_interval", cfg.obs_interval},
                  {"column_width", cfg.resolved_column_width()},
                  {"u_base", cfg.u_base}};
  root["mcmc"] = {{"n_iter", cfg.n_iter},
                  {"stride", cfg.stride},
                  {"adapt_iters", cfg.proposal.adapt_iters},
                  {"warmup", cfg.proposal.warmup},
                  {"f_nu", cfg.proposal.f_nu},
                  {"target_accept", cfg.proposal.target_accept},
                  {"init_scale", cfg.proposal.init_scale},
                  {"slice_width", cfg.slice_width}};
  root["simulator"] = cfg.approximate ? "approx" : "exact";
  root["seed"] = cfg.seed;
  root["out_dir"] = cfg.out_dir;
  root["chains"] = cfg.chains;
  json data = json::array();
  for (const DataRef& ref : cfg.data) {
    json e;
    e["kind"] = to_string(ref.kind);
    if (ref.kind == DataKind::seroprevalence) {
      e["n_sero"] = ref.n_sero;
      e["positives"] = ref.positives;
      e["t_obs"] = ref.t_obs;
    } else {
      e["path"] = ref.path;
    }
    data.push_back(e);
  }
  root["data"] = data;
  json emit = json::array();
  for (DataKind k : cfg.simulate.emit) emit.push_back(to_string(k));
  root["simulate"] = {{"emit", emit},
                      {"rows", cfg.simulate.rows},
                      {"sero_n", cfg.simulate.sero_n},
                      {"sero_t", cfg.simulate.sero_t}};
  root["diagnose"] = {{"chain_dir", cfg.diagnose.chain_dir},
                      {"residuals", cfg.diagnose.residuals},
                      {"max_lag", cfg.diagnose.max_lag},
                      {"beta", cfg.diagnose.beta},
                      {"free_ics", cfg.diagnose.free_ics}};
  root["benchmark"] = {{"sizes", cfg.benchmark.sizes},
                       {"compare_simulators", cfg.benchmark.compare_simulators}};

  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << root.dump(2) << "\n";
}

GridPtr make_grid(const RunConfig& cfg) {
  if (cfg.horizon <= 0.0) throw ConfigError("grid.horizon required and positive");
  return std::make_shared<const GridSpec>(
      GridSpec::uniform(cfg.horizon, cfg.resolved_column_width(), cfg.u_base));
}

ModelSpec make_model(const RunConfig& cfg) { return build_model(cfg.model); }

std::vector<Dataset> load_datasets(const RunConfig& cfg) {
  std::vector<Dataset> out;
  for (const DataRef& ref : cfg.data) {
    Dataset d;
    if (ref.kind == DataKind::seroprevalence) {
      d.kind = ref.kind;
      d.times = {ref.t_obs};
      d.counts = {ref.positives};
      d.n_sero = ref.n_sero;
    } else {
      try {
        d = read_dataset_csv(ref.path, ref.kind);
      } catch (const std::runtime_error& e) {
        throw ConfigError(e.what());
      }
    }
    try {
      d.validate(cfg.horizon);
    } catch (const std::domain_error& e) {
      throw ConfigError(std::string("data (") + to_string(ref.kind) + "): " + e.what());
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace prmmc
