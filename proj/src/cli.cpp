#include "ecodispatch/cli.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "ecodispatch/assign.hpp"
#include "ecodispatch/csv.hpp"
#include "ecodispatch/errors.hpp"
#include "ecodispatch/ingest.hpp"
#include "ecodispatch/metrics.hpp"
#include "ecodispatch/routing.hpp"
#include "ecodispatch/sim.hpp"
#include "json.hpp"

namespace ecodispatch::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return fmt::format("{:016x}", h);
}

namespace {

struct Options {
  // Inputs.
  std::string trips, fleet, emissions, mapping, routes;
  // Simulation.
  std::string policy = "tora";
  double phi = 1.0;
  double e0 = assign::kDefaultE0;
  double lev_threshold = fleet::kLevThreshold;
  double hev_threshold = fleet::kHevThreshold;
  double ev_fraction = 0.0;
  double horizon_s = 600.0;
  double speed_kmh = 30.0;
  double detour = geo::kDefaultDetourFactor;
  std::string routing = "shortest";
  bool route_deadhead = false;
  double max_wait_s = 3600.0;
  std::size_t era_cap = 10'000;
  std::string baseline = "none";
  bool no_event_log = false;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::string out;
  // Sweep.
  std::vector<double> phis;
  std::vector<double> ev_fractions = {0.0};
  // Oracle.
  std::size_t instances = 200;
  std::size_t min_requests = 3, max_requests = 6;
  std::size_t min_drivers = 2, max_drivers = 3;
  // Synthetic data.
  ingest::SynthConfig synth;
};

struct Inputs {
  ingest::Dataset dataset;
  std::map<std::string, routing::RouteTriple> routes;
  bool has_routes = false;
  json manifest_inputs = json::array();
  json manifest_dataset = json::object();
};

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << text;
}

void report_diagnostics(std::ostream& err, const std::string& source,
                        const std::vector<std::string>& diags) {
  constexpr std::size_t kShown = 20;
  for (std::size_t i = 0; i < diags.size() && i < kShown; ++i) {
    err << source << ": " << diags[i] << '\n';
  }
  if (diags.size() > kShown) {
    err << source << ": ... " << diags.size() - kShown << " more diagnostics\n";
  }
}

json input_entry(const char* role, const std::string& path) {
  return {{"role", role}, {"path", path}, {"fnv1a64", file_digest(path)}};
}

Inputs load_inputs(const Options& o, std::ostream& err, bool need_fleet = true) {
  if (o.trips.empty()) throw ConfigError("--trips is required");
  Inputs in;
  std::optional<ingest::EmissionTableLoad> table;
  if (!o.emissions.empty()) {
    table = ingest::load_vehicle_emissions(o.emissions);
    report_diagnostics(err, o.emissions, table->diagnostics);
    in.manifest_inputs.push_back(input_entry("emissions", o.emissions));
  }
  ingest::LoadOptions lo;
  if (!o.mapping.empty()) {
    lo.mapping = ingest::load_column_mapping(o.mapping);
    in.manifest_inputs.push_back(input_entry("mapping", o.mapping));
  }
  if (table) lo.emissions = &table->table;
  auto loaded = ingest::load_trips(o.trips, lo);
  in.manifest_inputs.push_back(input_entry("trips", o.trips));
  report_diagnostics(err, o.trips, loaded.diagnostics);
  in.dataset = std::move(loaded.dataset);
  if (!o.fleet.empty()) {
    ingest::load_fleet(o.fleet, in.dataset);
    in.manifest_inputs.push_back(input_entry("fleet", o.fleet));
  }
  if (need_fleet) ingest::validate(in.dataset);
  if (!o.routes.empty()) {
    auto r = routing::load_route_triples(o.routes);
    report_diagnostics(err, o.routes, r.diagnostics);
    in.routes = std::move(r.table);
    in.has_routes = true;
    in.manifest_inputs.push_back(input_entry("routes", o.routes));
  }
  const auto& trips = in.dataset.trips;
  in.manifest_dataset = {{"trips_accepted", loaded.accepted},
                         {"trips_rejected", loaded.rejected},
                         {"drivers", in.dataset.fleet.size()},
                         {"first_request_ts", trips.empty() ? 0 : trips.front().request_ts},
                         {"last_request_ts", trips.empty() ? 0 : trips.back().request_ts}};
  return in;
}

sim::SimConfig sim_config(const Options& o, const Inputs* in) {
  sim::SimConfig cfg;
  cfg.policy = sim::parse_policy(o.policy);
  cfg.phi = o.phi;
  cfg.e0 = o.e0;
  cfg.deadhead_speed_kmh = o.speed_kmh;
  cfg.availability_horizon_s = o.horizon_s;
  cfg.routing_policy = routing::parse_route_policy(o.routing);
  cfg.route_deadhead = o.route_deadhead;
  cfg.detour_factor = o.detour;
  cfg.seed = o.seed;
  cfg.max_queue_wait_s = o.max_wait_s;
  cfg.lev_threshold = o.lev_threshold;
  cfg.hev_threshold = o.hev_threshold;
  cfg.era.frontier_cap = o.era_cap;
  if (in && in->has_routes) cfg.routes = &in->routes;
  cfg.validate();
  return cfg;
}

json config_json(const Options& o) {
  return {{"policy", o.policy},
          {"phi", o.phi},
          {"e0", o.e0},
          {"lev_threshold", o.lev_threshold},
          {"hev_threshold", o.hev_threshold},
          {"ev_fraction", o.ev_fraction},
          {"horizon_s", o.horizon_s},
          {"speed_kmh", o.speed_kmh},
          {"detour", o.detour},
          {"routing", o.routing},
          {"route_deadhead", o.route_deadhead},
          {"max_wait_s", o.max_wait_s},
          {"era_cap", o.era_cap},
          {"seed", o.seed}};
}

json manifest(const std::string& command, const json& config, const Inputs* in) {
  json m = {{"tool", kToolName}, {"version", kVersion}, {"command", command}};
  m["seed"] = config.contains("seed") ? config["seed"] : json(0);
  m["config"] = config;
  m["inputs"] = in ? in->manifest_inputs : json::array();
  // Reports carry the dataset's own time span instead of wall-clock time so
  // reruns stay byte-identical.
  m["dataset"] = in ? in->manifest_dataset : json::object();
  return m;
}

std::string manifest_comment(const json& m) { return "# manifest: " + m.dump() + "\n"; }

// ---------------------------------------------------------------------------

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  Inputs in = load_inputs(o, err);
  if (o.ev_fraction > 0.0) {
    in.dataset = ingest::inject_evs(std::move(in.dataset), o.ev_fraction, o.seed, o.lev_threshold);
  }
  const sim::SimConfig cfg = sim_config(o, &in);
  const sim::SimResult result = sim::run(in.dataset, cfg);
  const auto summary = metrics::summarize(result);

  json m = manifest("simulate", config_json(o), &in);
  json report = {{"manifest", m}};
  report["summary"] = metrics::to_json(summary);
  report["equity"] = metrics::to_json(metrics::equity(result));
  report["lev_fraction"] = ingest::lev_share(in.dataset, o.lev_threshold);
  report["era_frontier_capped"] = result.era_frontier_capped;
  if (o.baseline != "none") {
    sim::SimConfig base_cfg = cfg;
    base_cfg.policy = sim::parse_policy(o.baseline);
    const auto base = metrics::summarize(sim::run(in.dataset, base_cfg));
    report["baseline"] = {{"policy", o.baseline}, {"summary", metrics::to_json(base)}};
    try {
      report["baseline"]["deltas"] = metrics::to_json(metrics::compare(summary, base));
    } catch (const DomainError& e) {
      report["baseline"]["deltas"] = nullptr;
      err << "baseline comparison undefined: " << e.what() << '\n';
    }
  }
  if (cfg.policy == sim::Policy::Replay) {
    const auto diag = sim::replay_wait_diagnostic(in.dataset, result);
    report["replay_wait_check"] = {{"compared", diag.compared},
                                   {"mean_abs_error_s", diag.mean_abs_error_s},
                                   {"mean_recorded_wait_s", diag.mean_recorded_wait_s}};
  }
  for (const auto& r : result.rides) {
    if (r.dropped) err << "dropped " << r.ride_id << ": " << r.diagnostic << '\n';
  }

  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  write_text(dir / "summary.json", report.dump(2) + "\n");
  if (!o.no_event_log) {
    std::ostringstream rides;
    rides << manifest_comment(m);
    sim::write_event_log(result, rides);
    write_text(dir / "rides.csv", rides.str());
  }
  out << fmt::format("served {} dropped {} deadhead_g {:.1f} total_g {:.1f} mean_wait_s {:.1f}\n",
                     summary.served, summary.dropped, summary.deadhead_g, summary.total_g,
                     summary.mean_wait_s);
  return kOk;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.phis.empty()) throw ConfigError("--phis must list at least one value");
  Inputs in = load_inputs(o, err);
  Options tora = o;
  tora.policy = "tora";
  const sim::SimConfig base = sim_config(tora, &in);

  std::vector<ingest::Dataset> variants;
  std::vector<double> lev_shares;
  for (double f : o.ev_fractions) {
    variants.push_back(ingest::inject_evs(in.dataset, f, o.seed, o.lev_threshold));
    lev_shares.push_back(ingest::lev_share(variants.back(), o.lev_threshold));
  }

  const std::size_t cells = o.ev_fractions.size() * o.phis.size();
  std::vector<metrics::SweepRow> rows(cells);
  std::vector<std::exception_ptr> errors(cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells; i = next++) {
      try {
        const std::size_t v = i / o.phis.size();
        sim::SimConfig cfg = base;
        cfg.phi = o.phis[i % o.phis.size()];
        const auto result = sim::run(variants[v], cfg);
        rows[i] = {cfg.phi, lev_shares[v], metrics::summarize(result), metrics::equity(result)};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::clamp<unsigned>(o.jobs, 1, static_cast<unsigned>(cells));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  json cfg = config_json(tora);
  cfg.erase("phi");
  cfg.erase("ev_fraction");
  cfg["phis"] = o.phis;
  cfg["ev_fractions"] = o.ev_fractions;
  std::ostringstream table;
  table << manifest_comment(manifest("sweep", cfg, &in));
  metrics::write_sweep_header(table);
  for (const auto& row : rows) metrics::write_sweep_row(row, table);
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  write_text(dir / "sweep.csv", table.str());
  out << "wrote " << cells << " sweep rows to " << (dir / "sweep.csv").string() << '\n';
  return kOk;
}

json oracle_entry(const assign::OfflineInstance& inst) {
  const double era = assign::erap_objective(assign::era_assign(inst));
  const double opt = assign::erap_objective(assign::brute_force_optimal(inst));
  const double nearest = assign::erap_objective(assign::nearest_sequence(inst));
  const double gap = opt > 0.0 ? (era - opt) / opt * 100.0 : 0.0;
  return {{"requests", inst.requests.size()},
          {"drivers", inst.drivers.size()},
          {"era_g", era},
          {"optimum_g", opt},
          {"nearest_g", nearest},
          {"gap_pct", gap}};
}

int cmd_oracle(const Options& o, std::ostream& out, std::ostream& err) {
  json entries = json::array();
  std::optional<Inputs> in;
  if (!o.trips.empty()) {
    in = load_inputs(o, err);
    Options plain = o;
    plain.policy = "nearest";
    const sim::SimConfig cfg = sim_config(plain, &*in);
    entries.push_back(oracle_entry(sim::offline_instance(in->dataset, cfg)));
  } else {
    if (o.min_requests > o.max_requests || o.min_drivers > o.max_drivers || o.min_drivers == 0) {
      throw ConfigError("instance size bounds are inconsistent");
    }
    for (std::size_t k = 0; k < o.instances; ++k) {
      Rng rng = Rng::derive(o.seed, k);
      const std::size_t n = o.min_requests + rng.below(o.max_requests - o.min_requests + 1);
      const std::size_t m = o.min_drivers + rng.below(o.max_drivers - o.min_drivers + 1);
      entries.push_back(oracle_entry(assign::random_instance(rng, n, m)));
    }
  }

  std::size_t inversions = 0, era_le_nearest = 0;
  double gap_sum = 0.0, gap_max = 0.0, era_sum = 0.0, nearest_sum = 0.0, opt_sum = 0.0;
  for (const auto& e : entries) {
    const double era = e["era_g"], opt = e["optimum_g"], nearest = e["nearest_g"];
    if (era < opt - assign::kTieEpsilon * std::abs(opt)) ++inversions;
    if (era <= nearest) ++era_le_nearest;
    gap_sum += e["gap_pct"].get<double>();
    gap_max = std::max(gap_max, e["gap_pct"].get<double>());
    era_sum += era;
    nearest_sum += nearest;
    opt_sum += opt;
  }
  const double count = static_cast<double>(std::max<std::size_t>(entries.size(), 1));
  json cfg = {{"seed", o.seed},
              {"instances", in ? 1 : o.instances},
              {"requests", {o.min_requests, o.max_requests}},
              {"drivers", {o.min_drivers, o.max_drivers}}};
  json report = {{"manifest", manifest("oracle", cfg, in ? &*in : nullptr)}};
  report["aggregate"] = {{"instances", entries.size()},
                         {"inversions", inversions},
                         {"mean_gap_pct", gap_sum / count},
                         {"max_gap_pct", gap_max},
                         {"era_le_nearest", era_le_nearest},
                         {"mean_era_g", era_sum / count},
                         {"mean_nearest_g", nearest_sum / count},
                         {"mean_optimum_g", opt_sum / count}};
  report["instances"] = entries;
  const std::string text = report.dump(2) + "\n";
  if (o.out.empty()) {
    out << text;
  } else {
    write_text(o.out, text);
    out << fmt::format("{} instances, {} inversions, mean gap {:.3f}%\n", entries.size(),
                       inversions, gap_sum / count);
  }
  return kOk;
}

void write_dataset(const fs::path& dir, const ingest::Dataset& ds, const json& m,
                   const Options& o) {
  std::ostringstream trips, fleet;
  trips << manifest_comment(m);
  ingest::write_trips(ds, trips, {true, o.lev_threshold, o.hev_threshold});
  fleet << manifest_comment(m);
  ingest::write_fleet(ds, fleet, o.lev_threshold, o.hev_threshold);
  write_text(dir / "trips.csv", trips.str());
  write_text(dir / "fleet.csv", fleet.str());
}

int cmd_inject_ev(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw ConfigError("--out is required");
  Inputs in = load_inputs(o, err);
  const double before = ingest::lev_share(in.dataset, o.lev_threshold);
  auto ds = ingest::inject_evs(in.dataset, o.ev_fraction, o.seed, o.lev_threshold);
  std::size_t converted = 0;
  for (const auto& [id, v] : ds.fleet) converted += v != in.dataset.fleet.at(id);
  write_dataset(o.out, ds,
                manifest("inject-ev", {{"ev_fraction", o.ev_fraction}, {"seed", o.seed}}, &in), o);
  out << fmt::format("converted {} vehicles; LEV share {:.4f} -> {:.4f}\n", converted, before,
                     ingest::lev_share(ds, o.lev_threshold));
  return kOk;
}

int cmd_gen_synth(const Options& o, std::ostream& out, std::ostream&) {
  if (o.out.empty()) throw ConfigError("--out is required");
  const auto ds = ingest::gen_synthetic(o.synth, o.seed);
  const json cfg = {{"seed", o.seed},
                    {"drivers", o.synth.drivers},
                    {"requests", o.synth.requests},
                    {"extent_km", o.synth.extent_km},
                    {"span_s", o.synth.span_s},
                    {"lev_fraction", o.synth.lev_fraction}};
  write_dataset(o.out, ds, manifest("gen-synth", cfg, nullptr), o);
  out << fmt::format("generated {} trips, {} drivers, LEV share {:.4f}\n", ds.trips.size(),
                     ds.fleet.size(), ingest::lev_share(ds, o.lev_threshold));
  return kOk;
}

int cmd_augment(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw ConfigError("--out is required");
  Inputs in = load_inputs(o, err);
  std::ostringstream text;
  text << manifest_comment(manifest("augment",
                                    {{"lev_threshold", o.lev_threshold},
                                     {"hev_threshold", o.hev_threshold},
                                     {"seed", o.seed}},
                                    &in));
  ingest::write_trips(in.dataset, text, {true, o.lev_threshold, o.hev_threshold});
  write_text(o.out, text.str());
  std::size_t imputed = 0;
  for (const auto& [id, v] : in.dataset.fleet) imputed += v.emission_imputed;
  out << fmt::format("augmented {} trips; {} of {} vehicles imputed from the fleet median\n",
                     in.dataset.trips.size(), imputed, in.dataset.fleet.size());
  return kOk;
}

int cmd_routes_gen(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw ConfigError("--out is required");
  Inputs in = load_inputs(o, err, false);
  Options plain = o;
  plain.policy = "nearest";
  const auto cfg = sim_config(plain, nullptr);
  const auto triples = sim::route_triples(in.dataset, cfg);
  std::map<std::string, routing::RouteTriple> table;
  for (std::size_t i = 0; i < triples.size(); ++i) {
    table[in.dataset.trips[i].ride_id] = triples[i];
  }
  std::ostringstream text;
  text << manifest_comment(manifest("routes-gen",
                                    {{"seed", o.seed},
                                     {"speed_kmh", o.speed_kmh},
                                     {"detour", o.detour}},
                                    &in));
  routing::write_route_triples(table, text);
  write_text(o.out, text.str());
  out << "wrote " << table.size() << " route triples\n";
  return kOk;
}

int cmd_routes_check(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.routes.empty()) throw ConfigError("--routes is required");
  const auto r = routing::load_route_triples(o.routes);
  report_diagnostics(err, o.routes, r.diagnostics);
  std::array<std::size_t, 3> per_category{};
  for (const auto& [id, t] : r.table) ++per_category[static_cast<std::size_t>(t.category)];
  out << fmt::format("accepted {} rejected {} (short {}, medium {}, long {})\n", r.accepted,
                     r.rejected, per_category[0], per_category[1], per_category[2]);
  return r.rejected ? kDataError : kOk;
}

void add_data_flags(CLI::App* sub, Options& o) {
  sub->add_option("--trips", o.trips, "Trips CSV")->check(CLI::ExistingFile);
  sub->add_option("--fleet", o.fleet, "Fleet CSV (overrides emission lookups)")
      ->check(CLI::ExistingFile);
  sub->add_option("--emissions", o.emissions, "Vehicle emissions CSV")->check(CLI::ExistingFile);
  sub->add_option("--mapping", o.mapping, "Column-mapping file (canonical=source)")
      ->check(CLI::ExistingFile);
  sub->add_option("--lev-threshold", o.lev_threshold, "LEV threshold, g CO2eq/km")
      ->check(CLI::PositiveNumber);
  sub->add_option("--hev-threshold", o.hev_threshold, "HEV threshold, L/100km")
      ->check(CLI::PositiveNumber);
  sub->add_option("--seed", o.seed, "Seed for every random draw");
}

void add_sim_flags(CLI::App* sub, Options& o) {
  sub->add_option("--routes", o.routes, "Route triples CSV")->check(CLI::ExistingFile);
  sub->add_option("--policy", o.policy, "Assignment policy")
      ->check(CLI::IsMember({"replay", "nearest", "tora", "era"}));
  sub->add_option("--phi", o.phi, "TORA threshold")->check(CLI::NonNegativeNumber);
  sub->add_option("--e0", o.e0, "Baseline unit emission, g CO2eq/km")
      ->check(CLI::PositiveNumber);
  sub->add_option("--ev-fraction", o.ev_fraction, "Share of non-LEV vehicles converted to EVs")
      ->check(CLI::Range(0.0, 1.0));
  sub->add_option("--horizon-s", o.horizon_s, "Availability horizon for busy drivers, s")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--speed-kmh", o.speed_kmh, "Travel speed, km/h")->check(CLI::PositiveNumber);
  sub->add_option("--detour", o.detour, "Road/great-circle detour factor")
      ->check(CLI::Range(1.0, 100.0));
  sub->add_option("--routing", o.routing, "Passenger route choice")
      ->check(CLI::IsMember({"shortest", "fastest", "fuel"}));
  sub->add_flag("--route-deadhead", o.route_deadhead, "Apply route choice to deadhead legs");
  sub->add_option("--max-wait-s", o.max_wait_s, "Drop requests queued longer than this, s")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--era-cap", o.era_cap, "ERA frontier cap")->check(CLI::PositiveNumber);
  sub->add_option("--jobs", o.jobs, "Concurrent runs")->check(CLI::PositiveNumber);
}

// CLI11 only reads config files for the top-level app, so a subcommand's
// --config file is expanded into flags here. Flags given explicitly win.
std::vector<std::string> with_config_defaults(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> explicit_flags;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
    } else if (a.rfind("--config=", 0) == 0) {
      path = a.substr(9);
    } else if (a.rfind("--", 0) == 0) {
      explicit_flags.push_back(a.substr(0, a.find('=')));
    }
  }
  if (path.empty() || !fs::is_regular_file(path)) return args;

  std::vector<std::string> out = args;
  for (const CLI::ConfigItem& item : CLI::ConfigTOML().from_file(path)) {
    if (!item.parents.empty() || item.name.empty()) continue;
    std::string flag = "--" + item.name;
    std::replace(flag.begin(), flag.end(), '_', '-');
    if (std::find(explicit_flags.begin(), explicit_flags.end(), flag) != explicit_flags.end()) {
      continue;
    }
    std::string value;
    for (std::size_t k = 0; k < item.inputs.size(); ++k) {
      value += (k ? "," : "") + item.inputs[k];
    }
    out.push_back(flag + "=" + value);
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Emission-aware ride assignment engine and experiment harness", kToolName};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* simulate = app.add_subcommand("simulate", "Run one simulation and write a report");
  add_data_flags(simulate, o);
  add_sim_flags(simulate, o);
  simulate->add_option("--baseline", o.baseline, "Also run a baseline policy and report deltas")
      ->check(CLI::IsMember({"none", "replay", "nearest", "tora", "era"}));
  simulate->add_flag("--no-event-log", o.no_event_log, "Skip rides.csv");
  simulate->add_option("--out", o.out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "TORA over phi x EV-fraction grid");
  add_data_flags(sweep, o);
  add_sim_flags(sweep, o);
  sweep->add_option("--phis", o.phis, "Comma-separated phi values")
      ->required()
      ->delimiter(',')
      ->check(CLI::NonNegativeNumber);
  sweep->add_option("--ev-fractions", o.ev_fractions, "Comma-separated EV injection fractions")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  sweep->add_option("--out", o.out, "Output directory");

  auto* oracle = app.add_subcommand("oracle", "Compare ERA with the exhaustive optimum");
  add_data_flags(oracle, o);
  add_sim_flags(oracle, o);
  oracle->add_option("--instances", o.instances, "Random instances to generate");
  oracle->add_option("--min-requests", o.min_requests);
  oracle->add_option("--max-requests", o.max_requests);
  oracle->add_option("--min-drivers", o.min_drivers);
  oracle->add_option("--max-drivers", o.max_drivers);
  oracle->add_option("--out", o.out, "Report file (default stdout)");

  auto* inject = app.add_subcommand("inject-ev", "Convert a share of non-LEV vehicles to EVs");
  add_data_flags(inject, o);
  inject->add_option("--ev-fraction", o.ev_fraction)->required()->check(CLI::Range(0.0, 1.0));
  inject->add_option("--out", o.out, "Output directory");

  auto* synth = app.add_subcommand("gen-synth", "Generate a synthetic dataset");
  synth->add_option("--drivers", o.synth.drivers);
  synth->add_option("--requests", o.synth.requests);
  synth->add_option("--extent-km", o.synth.extent_km)->check(CLI::PositiveNumber);
  synth->add_option("--span-s", o.synth.span_s)->check(CLI::PositiveNumber);
  synth->add_option("--lev-fraction", o.synth.lev_fraction);
  synth->add_option("--lev-threshold", o.lev_threshold)->check(CLI::PositiveNumber);
  synth->add_option("--hev-threshold", o.hev_threshold)->check(CLI::PositiveNumber);
  synth->add_option("--seed", o.seed);
  synth->add_option("--out", o.out, "Output directory");

  auto* augment = app.add_subcommand("augment", "Add unit emission and class columns to trips");
  add_data_flags(augment, o);
  augment->add_option("--out", o.out, "Output trips CSV");

  auto* routes_gen = app.add_subcommand("routes-gen", "Synthesize route triples for trips");
  routes_gen->add_option("--trips", o.trips)->required()->check(CLI::ExistingFile);
  routes_gen->add_option("--mapping", o.mapping)->check(CLI::ExistingFile);
  routes_gen->add_option("--seed", o.seed);
  routes_gen->add_option("--speed-kmh", o.speed_kmh)->check(CLI::PositiveNumber);
  routes_gen->add_option("--detour", o.detour)->check(CLI::Range(1.0, 100.0));
  routes_gen->add_option("--out", o.out, "Output routes CSV");

  auto* routes_check = app.add_subcommand("routes-check", "Validate a route triples CSV");
  routes_check->add_option("--routes", o.routes)->required()->check(CLI::ExistingFile);

  std::string config_file;
  for (auto* sub : app.get_subcommands({})) {
    sub->add_option("--config", config_file, "TOML/INI file of flag defaults")
        ->check(CLI::ExistingFile);
  }

  try {
    const std::vector<std::string> full = with_config_defaults(args);
    std::vector<std::string> reversed(full.rbegin(), full.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out, err);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (oracle->parsed()) return cmd_oracle(o, out, err);
    if (inject->parsed()) return cmd_inject_ev(o, out, err);
    if (synth->parsed()) return cmd_gen_synth(o, out, err);
    if (augment->parsed()) return cmd_augment(o, out, err);
    if (routes_gen->parsed()) return cmd_routes_gen(o, out, err);
    if (routes_check->parsed()) return cmd_routes_check(o, out, err);
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsageError;
}

}  // namespace ecodispatch::cli
