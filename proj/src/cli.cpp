#include "gboson/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "gboson/dynamics.hpp"
#include "gboson/errors.hpp"
#include "gboson/fbs.hpp"
#include "gboson/gbs.hpp"
#include "gboson/serialization.hpp"

namespace gboson::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ValueKind { Text, Boson, Unitary, Occupation, IntList, Int, Unsigned, Policy, Path };

struct OptionSpec {
  const char* name;
  ValueKind kind;
  const char* fallback;  // nullptr: no default
  bool required;
  const char* help;
};

const OptionSpec kBoson{"boson", ValueKind::Boson, "standard", false,
                        "species: standard | boson_pair | spin_s:S | q_boson:q | m_paraboson:m | file:PATH"};
const OptionSpec kUnitary{"unitary", ValueKind::Unitary, nullptr, true, "mode unitary: haar:M=..,seed=.. | file:PATH"};
const OptionSpec kIn{"in", ValueKind::Occupation, nullptr, true, "input occupations, comma separated"};
const OptionSpec kOut{"out", ValueKind::Occupation, nullptr, true, "output occupations, comma separated"};
const OptionSpec kThreads{"threads", ValueKind::Int, "1", false, "worker threads"};
const OptionSpec kSeed{"seed", ValueKind::Unsigned, "0", false, "random seed"};
const OptionSpec kOutput{"output", ValueKind::Path, nullptr, false, "result file (stdout when omitted)"};

struct CommandSpec {
  const char* name;
  const char* help;
  std::vector<OptionSpec> options;
};

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> specs = {
      {"catalog",
       "bosonic factor and commutator table of a species with the catalog consistency check",
       {{"boson", ValueKind::Boson, nullptr, true, kBoson.help},
        {"n-max", ValueKind::Int, "8", false, "largest level to tabulate"},
        kOutput}},
      {"prob", "probability of one Fock outcome", {kBoson, kUnitary, kIn, kOut, kOutput}},
      {"distribution",
       "all outcome probabilities for a Fock input",
       {kBoson, kUnitary, kIn, {"policy", ValueKind::Policy, "raw", false, "raw | renormalize"}, kThreads, kOutput}},
      {"sample",
       "draws outcomes from the (renormalized) distribution as JSON lines",
       {kBoson,
        kUnitary,
        kIn,
        {"policy", ValueKind::Policy, "renormalize", false, "raw | renormalize"},
        {"count", ValueKind::Int, "1000", false, "number of samples"},
        kSeed,
        kThreads,
        kOutput}},
      {"dynamics",
       "mode-swapping Hamiltonian simulation of the mode transformation",
       {kBoson,
        kUnitary,
        kIn,
        {"cutoff", ValueKind::Int, nullptr, false, "uniform Fock cutoff (default: local_dim or N+1)"},
        {"export-hamiltonian", ValueKind::Path, nullptr, false, "write the sparse Hamiltonian to this file"},
        kOutput}},
      {"scaling",
       "TV distance to ideal linear optics versus mode count over Haar draws",
       {kBoson,
        {"n", ValueKind::Int, "2", false, "particles (collision-free input)"},
        {"m-list", ValueKind::IntList, "4,6,8", false, "mode counts, comma separated"},
        {"trials", ValueKind::Int, "20", false, "Haar draws per mode count"},
        kSeed,
        kThreads,
        {"csv", ValueKind::Path, nullptr, false, "also write the table as CSV"},
        kOutput}},
      {"gbs",
       "binary-outcome probabilities of a Gaussian Q-function state",
       {kBoson,
        {"state", ValueKind::Path, nullptr, true, "Gaussian state JSON file"},
        {"out", ValueKind::Occupation, nullptr, false, "single binary outcome (default: all outcomes)"},
        kOutput}},
  };
  return specs;
}

std::string one_line(std::string text) {
  for (char& c : text) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return text;
}

/// Config-file value to the textual form accepted on the command line.
std::string raw_from_json(const std::string& key, const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return v.dump();
  if (v.is_array()) {
    std::string joined;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) throw UsageError("config key '" + key + "' must hold integers");
      joined += (i ? "," : "") + v[i].dump();
    }
    return joined;
  }
  throw UsageError("config key '" + key + "' has an unsupported type");
}

Json typed_value(const OptionSpec& spec, const std::string& raw) {
  try {
    switch (spec.kind) {
      case ValueKind::Text:
      case ValueKind::Boson:
      case ValueKind::Unitary:
      case ValueKind::Path:
        if (raw.empty()) throw UsageError(std::string("empty value for ") + spec.name);
        return raw;
      case ValueKind::Occupation:
        return parse_occupation(raw).counts;
      case ValueKind::IntList:
        return parse_int_list(raw);
      case ValueKind::Int: {
        const auto values = parse_int_list(raw);
        if (values.size() != 1) throw UsageError(std::string("expected one integer for ") + spec.name);
        return values.front();
      }
      case ValueKind::Unsigned: {
        std::uint64_t value = 0;
        const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
        if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size()) {
          throw UsageError(std::string("invalid unsigned integer for ") + spec.name + ": '" + raw + "'");
        }
        return value;
      }
      case ValueKind::Policy:
        if (raw != "raw" && raw != "renormalize") throw UsageError("policy must be raw or renormalize");
        return raw;
    }
  } catch (const ValidationError& e) {
    throw UsageError(std::string(spec.name) + ": " + e.what());
  }
  return nullptr;
}

/// Flags > config file > defaults.
Json resolve(const CommandSpec& cmd, const std::map<std::string, std::string>& flags,
             const std::optional<std::string>& config_path) {
  Json file_cfg = Json::object();
  if (config_path) {
    try {
      file_cfg = read_json_file(*config_path);
    } catch (const ValidationError& e) {
      throw UsageError(e.what());
    }
    if (!file_cfg.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, value] : file_cfg.items()) {
      const bool known = std::any_of(cmd.options.begin(), cmd.options.end(),
                                     [&](const OptionSpec& o) { return key == o.name; });
      if (!known) throw UsageError("unknown config key: " + key);
    }
  }
  Json config = Json::object();
  for (const auto& opt : cmd.options) {
    std::optional<std::string> raw;
    if (const auto it = flags.find(opt.name); it != flags.end()) {
      raw = it->second;
    } else if (file_cfg.contains(opt.name) && !file_cfg.at(opt.name).is_null()) {
      raw = raw_from_json(opt.name, file_cfg.at(opt.name));
    } else if (opt.fallback) {
      raw = opt.fallback;
    }
    if (!raw) {
      if (opt.required) throw UsageError(std::string("missing required: ") + opt.name);
      continue;
    }
    config[opt.name] = typed_value(opt, *raw);
  }
  return config;
}

GeneralizedBoson boson_of(const Json& config) {
  try {
    return parse_boson_spec(config.at("boson").get<std::string>());
  } catch (const ValidationError& e) {
    throw UsageError(std::string("boson: ") + e.what());
  }
}

ModeUnitary unitary_of(const Json& config) {
  try {
    return parse_unitary_spec(config.at("unitary").get<std::string>());
  } catch (const ValidationError& e) {
    throw UsageError(std::string("unitary: ") + e.what());
  }
}

OccupationVector occupation_of(const Json& config, const char* key) {
  return OccupationVector(config.at(key).get<std::vector<int>>());
}

int positive_int(const Json& config, const char* key, int min_value) {
  const int v = config.at(key).get<int>();
  if (v < min_value) throw UsageError(std::string(key) + " must be >= " + std::to_string(min_value));
  return v;
}

NormalizationPolicy policy_of(const Json& config) {
  return config.at("policy").get<std::string>() == "raw" ? NormalizationPolicy::Raw : NormalizationPolicy::Renormalize;
}

Json envelope(const std::string& command, const Json& config) {
  return Json{{"format_version", kFormatVersion}, {"command", command}, {"config", config}, {"status", "ok"}};
}

void write_atomically(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot write " + path);
    out << text;
    if (!out) throw UsageError("cannot write " + path);
  }
  std::filesystem::rename(tmp, target);
}

struct Artifact {
  std::string text;
  // Extra files, written only after the main result succeeded.
  std::vector<std::pair<std::string, std::string>> side_files;
};

Artifact run_catalog(const Json& config) {
  const GeneralizedBoson boson = boson_of(config);
  const int n_max = positive_int(config, "n-max", 0);
  Json result{{"species", species_to_json(boson)}, {"name", boson.name()}};
  result["local_dim"] = boson.local_dim() ? Json(*boson.local_dim()) : Json(nullptr);
  result["branch_warning"] = boson.branch_warning();
  result["roundtrip"] = roundtrip_to_json(roundtrip_check(boson, n_max));
  Json doc = envelope("catalog", config);
  doc["result"] = result;
  return {doc.dump(2) + "\n", {}};
}

Artifact run_prob(const Json& config) {
  const GeneralizedBoson boson = boson_of(config);
  const ModeUnitary u = unitary_of(config);
  const OccupationVector l = occupation_of(config, "in");
  const OccupationVector k = occupation_of(config, "out");
  const double p = outcome_probability(boson, u, l, k);
  Json doc = envelope("prob", config);
  doc["result"] = Json{{"in", l.counts}, {"out", k.counts}, {"probability", p}};
  return {doc.dump(2) + "\n", {}};
}

Artifact run_distribution(const Json& config) {
  const GeneralizedBoson boson = boson_of(config);
  const ModeUnitary u = unitary_of(config);
  const OccupationVector l = occupation_of(config, "in");
  const Distribution dist = full_distribution(boson, u, l, policy_of(config), positive_int(config, "threads", 1));
  Json doc = envelope("distribution", config);
  doc["result"] = distribution_to_json(dist);
  return {doc.dump(2) + "\n", {}};
}

Artifact run_sample(const Json& config) {
  const GeneralizedBoson boson = boson_of(config);
  const ModeUnitary u = unitary_of(config);
  const OccupationVector l = occupation_of(config, "in");
  const Distribution dist = full_distribution(boson, u, l, policy_of(config), positive_int(config, "threads", 1));
  const auto count = static_cast<std::size_t>(positive_int(config, "count", 0));
  const auto draws = sample(dist, count, config.at("seed").get<std::uint64_t>());
  Json header = envelope("sample", config);
  header["result"] = Json{{"count", count}, {"total_mass", dist.total_mass}};
  std::string text = header.dump() + "\n";
  for (const auto& k : draws) text += occupation_to_json(k).dump() + "\n";
  return {text, {}};
}

Artifact run_dynamics(const Json& config) {
  const GeneralizedBoson boson = boson_of(config);
  const ModeUnitary r = unitary_of(config);
  const OccupationVector l = occupation_of(config, "in");
  if (static_cast<int>(l.modes()) != r.dim()) throw DimensionError("input occupation needs one entry per mode");
  std::vector<int> cutoffs = default_cutoffs(boson, 2 * r.dim(), l.total());
  if (config.contains("cutoff")) cutoffs.assign(cutoffs.size(), positive_int(config, "cutoff", 1));
  if (boson.local_dim()) {
    for (int& c : cutoffs) c = std::min(c, *boson.local_dim());
  }
  const SwapResult swap = peropadre_distribution(boson, r, l, cutoffs);
  const Distribution ideal = full_distribution(GeneralizedBoson::standard(), r, l, NormalizationPolicy::Raw);

  Json result{{"cutoffs", cutoffs},
              {"evolution_time", swap.evolution_time},
              {"leakage", swap.leakage},
              {"norm_error", swap.norm_error},
              {"tv_to_ideal", total_variation(swap.distribution, ideal)},
              {"distribution", distribution_to_json(swap.distribution)}};
  Artifact art;
  if (config.contains("export-hamiltonian")) {
    const FockSpace space(2 * r.dim(), cutoffs);
    Json h{{"format_version", kFormatVersion}, {"hamiltonian", sparse_to_json(build_bs_hamiltonian(boson, r, space))}};
    art.side_files.emplace_back(config.at("export-hamiltonian").get<std::string>(), h.dump(2) + "\n");
  }
  Json doc = envelope("dynamics", config);
  doc["result"] = result;
  art.text = doc.dump(2) + "\n";
  return art;
}

Artifact run_scaling(const Json& config) {
  const GeneralizedBoson boson = boson_of(config);
  const auto modes = config.at("m-list").get<std::vector<int>>();
  if (modes.empty()) throw UsageError("m-list must not be empty");
  const ScalingTable table =
      tv_scaling_experiment(boson, positive_int(config, "n", 0), modes, positive_int(config, "trials", 1),
                            config.at("seed").get<std::uint64_t>(), positive_int(config, "threads", 1));
  Artifact art;
  if (config.contains("csv")) art.side_files.emplace_back(config.at("csv").get<std::string>(), scaling_to_csv(table));
  Json doc = envelope("scaling", config);
  doc["result"] = scaling_to_json(table);
  art.text = doc.dump(2) + "\n";
  return art;
}

Artifact run_gbs(const Json& config) {
  const GeneralizedBoson boson = boson_of(config);
  GaussianState state;
  try {
    state = gaussian_state_from_json(read_json_file(config.at("state").get<std::string>()));
  } catch (const ValidationError& e) {
    throw UsageError(std::string("state: ") + e.what());
  }
  GbsDiagnostics diag;
  Json result;
  if (config.contains("out")) {
    const OccupationVector n = occupation_of(config, "out");
    const double p = state.displacement ? displaced_probability(boson, state, n, &diag)
                                        : gaussian_threshold_probability(boson, state, n, &diag);
    result = Json{{"out", n.counts}, {"probability", p}};
  } else {
    result = Json{{"distribution", distribution_to_json(gaussian_binary_distribution(boson, state, &diag))}};
  }
  result["norm_g"] = state.norm_g;
  result["clipped"] = diag.clipped;
  Json doc = envelope("gbs", config);
  doc["result"] = result;
  return {doc.dump(2) + "\n", {}};
}

Artifact dispatch(const std::string& command, const Json& config) {
  if (command == "catalog") return run_catalog(config);
  if (command == "prob") return run_prob(config);
  if (command == "distribution") return run_distribution(config);
  if (command == "sample") return run_sample(config);
  if (command == "dynamics") return run_dynamics(config);
  if (command == "scaling") return run_scaling(config);
  return run_gbs(config);
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const GuardError*>(&e)) return "guard";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  return "internal";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized-boson sampling toolkit", args.empty() ? "gboson" : args.front()};
  app.require_subcommand(1);
  std::map<std::string, std::map<std::string, std::string>> raw_values;
  std::map<std::string, CLI::App*> subcommands;
  std::map<std::string, std::string> config_paths;
  for (const auto& cmd : commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    subcommands[cmd.name] = sub;
    auto& store = raw_values[cmd.name];
    for (const auto& opt : cmd.options) {
      std::string help = opt.help;
      if (opt.fallback) help += " (default: " + std::string(opt.fallback) + ")";
      if (opt.required) help += " (required)";
      sub->add_option(std::string("--") + opt.name, store[opt.name], help);
    }
    sub->add_option("--config", config_paths[cmd.name], "JSON file with option values; flags take precedence");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  }

  const CommandSpec* cmd = nullptr;
  for (const auto& c : commands()) {
    if (subcommands[c.name]->parsed()) cmd = &c;
  }
  if (!cmd) {
    err << "error: missing subcommand\n";
    return kExitUsage;
  }

  std::map<std::string, std::string> flags;
  CLI::App* sub = subcommands[cmd->name];
  for (const auto& opt : cmd->options) {
    if (sub->get_option(std::string("--") + opt.name)->count() > 0) flags[opt.name] = raw_values[cmd->name][opt.name];
  }
  std::optional<std::string> config_path;
  if (sub->get_option("--config")->count() > 0) config_path = config_paths[cmd->name];

  Json config;
  try {
    config = resolve(*cmd, flags, config_path);
  } catch (const UsageError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  }
  const std::optional<std::string> output_path =
      config.contains("output") ? std::optional(config.at("output").get<std::string>()) : std::nullopt;

  auto emit = [&](const std::string& text) {
    if (output_path) {
      write_atomically(*output_path, text);
    } else {
      out << text;
    }
  };

  try {
    const Artifact art = dispatch(cmd->name, config);
    for (const auto& [path, text] : art.side_files) write_atomically(path, text);
    emit(art.text);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const Json::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    Json failed = envelope(cmd->name, config);
    failed["status"] = "failed";
    failed["error"] = Json{{"kind", error_kind(e)}, {"message", one_line(e.what())}};
    try {
      emit(failed.dump(2) + "\n");
    } catch (const std::exception& write_error) {
      err << "error: " << one_line(write_error.what()) << "\n";
    }
    return kExitNumerical;
  }
}

}  // namespace gboson::cli
