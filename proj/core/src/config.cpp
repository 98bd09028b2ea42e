#include "topolattice/config.hpp"

#include <cmath>
#include <stdexcept>

#include "json_detail.hpp"

namespace topolattice {

namespace {

const std::vector<std::string> kConfigKeys = {
    "task",      "output_prefix",    "lattice",  "magnon",       "ports",
    "currents_a", "omegas_ghz", "delta_gammas_mhz", "n_values"};

const std::vector<std::string> kRangeKeys = {"min", "max", "count"};

struct TaskInfo {
  Task task;
  const char* name;
  bool magnon, ports, currents, omegas, delta_gammas, n_values;
};

constexpr TaskInfo kTasks[] = {
    {Task::spectrum, "spectrum", false, false, false, false, false, false},
    {Task::winding, "winding", false, false, false, false, false, false},
    {Task::ep_scan, "ep-scan", false, false, false, false, true, false},
    {Task::threshold_scaling, "threshold-scaling", false, false, false, false,
     false, true},
    {Task::map, "map", true, true, true, true, false, false},
    {Task::absorptivity, "absorptivity", false, true, false, true, false, false},
    {Task::fit, "fit", true, true, true, true, false, false},
};

const TaskInfo& info_for(Task t) {
  for (const auto& info : kTasks) {
    if (info.task == t) return info;
  }
  throw std::logic_error("unreachable task");
}

std::optional<Range> parse_range(const detail::json& obj, const std::string& context,
                                 std::vector<std::string>& errors) {
  if (!obj.is_object()) {
    errors.push_back(context + ": expected an object with min, max, count");
    return std::nullopt;
  }
  detail::check_keys(obj, kRangeKeys, context, errors);
  Range range;
  range.min = detail::get_num(obj, "min", context, errors, true);
  range.max = detail::get_num(obj, "max", context, errors, true);
  range.count =
      static_cast<int>(detail::get_int(obj, "count", context, errors, true, 0));
  if (!std::isfinite(range.min) || !std::isfinite(range.max)) {
    errors.push_back(context + ": min and max must be finite");
    return std::nullopt;
  }
  if (range.count < 1) {
    errors.push_back(context + ": count must be >= 1");
    return std::nullopt;
  }
  if (range.count == 1 && range.min != range.max) {
    errors.push_back(context + ": count 1 requires min == max");
    return std::nullopt;
  }
  if (range.count > 1 && !(range.max > range.min)) {
    errors.push_back(context + ": max must exceed min");
    return std::nullopt;
  }
  return range;
}

detail::json range_to_json(const Range& range) {
  detail::json obj;
  obj["min"] = range.min;
  obj["max"] = range.max;
  obj["count"] = range.count;
  return obj;
}

}  // namespace

const char* to_string(Task t) { return info_for(t).name; }

std::optional<Task> task_from_string(const std::string& name) {
  for (const auto& info : kTasks) {
    if (name == info.name) return info.task;
  }
  return std::nullopt;
}

std::vector<double> Range::points() const {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(count));
  if (count == 1) {
    out.push_back(min);
    return out;
  }
  const double step = (max - min) / static_cast<double>(count - 1);
  for (int i = 0; i < count - 1; ++i) {
    out.push_back(min + step * i);
  }
  out.push_back(max);  // exact endpoint regardless of rounding
  return out;
}

std::string ExperimentConfig::to_json() const {
  detail::json doc;
  doc["task"] = to_string(task);
  doc["output_prefix"] = output_prefix;
  doc["lattice"] = detail::lattice_to_json(lattice);
  if (magnon) doc["magnon"] = detail::magnon_to_json(*magnon);
  if (ports) doc["ports"] = detail::ports_to_json(*ports);
  if (currents_a) doc["currents_a"] = range_to_json(*currents_a);
  if (omegas_ghz) doc["omegas_ghz"] = range_to_json(*omegas_ghz);
  if (delta_gammas_mhz) doc["delta_gammas_mhz"] = range_to_json(*delta_gammas_mhz);
  if (!n_values.empty()) doc["n_values"] = n_values;
  return doc.dump(2);
}

ParseOutcome parse_config(const std::string& text) {
  ParseOutcome outcome;
  auto& errors = outcome.errors;
  detail::json doc = detail::parse_document(text, errors);
  if (!errors.empty()) return outcome;

  detail::check_keys(doc, kConfigKeys, "config", errors);

  ExperimentConfig config;
  if (!doc.contains("task") || !doc["task"].is_string()) {
    errors.push_back("config.task: required string");
  } else if (auto task = task_from_string(doc["task"].get<std::string>())) {
    config.task = *task;
  } else {
    std::string valid;
    for (const auto& info : kTasks) {
      valid += valid.empty() ? info.name : std::string(" | ") + info.name;
    }
    errors.push_back("config.task: unknown task '" +
                     doc["task"].get<std::string>() + "' (expected " + valid + ")");
  }

  if (doc.contains("output_prefix")) {
    if (!doc["output_prefix"].is_string()) {
      errors.push_back("config.output_prefix: expected a string");
    } else {
      config.output_prefix = doc["output_prefix"].get<std::string>();
      if (config.output_prefix.empty() ||
          config.output_prefix.find('/') != std::string::npos ||
          config.output_prefix.find('\\') != std::string::npos) {
        errors.push_back(
            "config.output_prefix: must be a nonempty name without path separators");
      }
    }
  }

  if (doc.contains("lattice")) {
    config.lattice = detail::parse_lattice(doc["lattice"], "lattice", errors);
  } else {
    errors.push_back("config.lattice: missing required section");
  }

  if (doc.contains("magnon")) {
    config.magnon = detail::parse_magnon(doc["magnon"], "magnon", errors);
    if (errors.empty()) {
      try {
        config.magnon->validate(config.lattice.sites());
      } catch (const std::invalid_argument& e) {
        errors.push_back(e.what());
      }
    }
  }
  if (doc.contains("ports")) {
    config.ports = detail::parse_ports(doc["ports"], "ports", errors);
    if (errors.empty()) {
      try {
        config.ports->validate(config.lattice.sites());
      } catch (const std::invalid_argument& e) {
        errors.push_back(e.what());
      }
    }
  }
  if (doc.contains("currents_a")) {
    config.currents_a = parse_range(doc["currents_a"], "currents_a", errors);
  }
  if (doc.contains("omegas_ghz")) {
    config.omegas_ghz = parse_range(doc["omegas_ghz"], "omegas_ghz", errors);
  }
  if (doc.contains("delta_gammas_mhz")) {
    config.delta_gammas_mhz =
        parse_range(doc["delta_gammas_mhz"], "delta_gammas_mhz", errors);
    if (config.delta_gammas_mhz && config.delta_gammas_mhz->min < 0) {
      errors.push_back("delta_gammas_mhz: loss contrasts must be >= 0");
    }
  }
  if (doc.contains("n_values")) {
    if (!doc["n_values"].is_array()) {
      errors.push_back("config.n_values: expected an array of integers");
    } else {
      for (const auto& v : doc["n_values"]) {
        if (!v.is_number_integer()) {
          errors.push_back("config.n_values: expected an array of integers");
          config.n_values.clear();
          break;
        }
        config.n_values.push_back(v.get<int>());
      }
      for (size_t i = 0; i < config.n_values.size(); ++i) {
        if (config.n_values[i] < 2) {
          errors.push_back("config.n_values: chain lengths must be >= 2");
          break;
        }
        if (i > 0 && config.n_values[i] <= config.n_values[i - 1]) {
          errors.push_back("config.n_values: must be strictly ascending");
          break;
        }
      }
    }
  }

  // Task/section cross-checks only make sense on a structurally valid config.
  if (errors.empty()) {
    const TaskInfo& info = info_for(config.task);
    auto need = [&](bool required, bool present, const char* section) {
      if (required && !present) {
        errors.push_back(std::string("config: task '") + info.name +
                         "' requires the '" + section + "' section");
      } else if (!required && present) {
        errors.push_back(std::string("config: section '") + section +
                         "' is not used by task '" + info.name + "'");
      }
    };
    need(info.magnon, config.magnon.has_value(), "magnon");
    need(info.ports, config.ports.has_value(), "ports");
    need(info.currents, config.currents_a.has_value(), "currents_a");
    need(info.omegas, config.omegas_ghz.has_value(), "omegas_ghz");
    need(info.delta_gammas, config.delta_gammas_mhz.has_value(), "delta_gammas_mhz");
    need(info.n_values, !config.n_values.empty(), "n_values");
  }

  if (errors.empty()) outcome.config = std::move(config);
  return outcome;
}

namespace {

LatticeSpec hermitian_lattice() {
  LatticeSpec spec;
  spec.n_cells = 6;
  spec.omega0_ghz = 5.62;
  spec.gamma_a_mhz = 24.42;
  spec.gamma_b_mhz = 24.42;
  spec.v_mhz = 216.5;
  spec.w_mhz = 341.0;
  return spec;
}

LatticeSpec lossy_lattice() {
  LatticeSpec spec;
  spec.n_cells = 6;
  spec.omega0_ghz = 5.48;
  spec.gamma_a_mhz = 36.0;
  spec.gamma_b_mhz = 73.0;
  spec.v_mhz = 208.5;
  spec.w_mhz = 335.5;
  return spec;
}

MagnonSpec sphere_at(int site) {
  MagnonSpec magnon;
  magnon.site = site;
  magnon.g0_mhz = 144.81;
  magnon.gamma_n_mhz = 16.0;
  magnon.c0_ghz = 3.2;
  magnon.c1_ghz_per_a = 0.42;
  return magnon;
}

PortConfig end_ports() {
  PortConfig ports;
  ports.port1_site = 1;
  ports.port2_site = 12;
  ports.kappa1_mhz = 20.0;
  ports.kappa2_mhz = 20.0;
  return ports;
}

ExperimentConfig build_preset(const std::string& name) {
  ExperimentConfig config;
  config.output_prefix = name;
  if (name == "fig1c") {
    config.task = Task::spectrum;
    config.lattice = hermitian_lattice();
  } else if (name == "fig1e") {
    config.task = Task::spectrum;
    config.lattice = lossy_lattice();
  } else if (name == "fig2") {
    config.task = Task::map;
    config.lattice = hermitian_lattice();
    config.magnon = sphere_at(1);
    config.ports = end_ports();
    config.currents_a = Range{5.2, 6.3, 111};
    config.omegas_ghz = Range{5.25, 6.0, 301};
  } else if (name == "fig3") {
    config.task = Task::map;
    config.lattice = lossy_lattice();
    config.magnon = sphere_at(1);
    config.ports = end_ports();
    config.currents_a = Range{4.9, 6.0, 111};
    config.omegas_ghz = Range{5.1, 5.85, 301};
  } else if (name == "fig4a") {
    config.task = Task::absorptivity;
    config.lattice = hermitian_lattice();
    config.ports = end_ports();
    config.omegas_ghz = Range{5.32, 5.92, 2401};
  } else if (name == "fig4b") {
    config.task = Task::absorptivity;
    config.lattice = lossy_lattice();
    config.ports = end_ports();
    config.omegas_ghz = Range{5.18, 5.78, 2401};
  } else if (name == "fig4cd") {
    config.task = Task::ep_scan;
    config.lattice = lossy_lattice();
    config.delta_gammas_mhz = Range{2.0, 544.0, 272};
  } else {
    throw std::out_of_range("unknown preset '" + name + "'");
  }
  return config;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"fig1c", "fig1e", "fig2", "fig3", "fig4a", "fig4b", "fig4cd"};
}

std::string preset(const std::string& name) {
  return build_preset(name).to_json();
}

}  // namespace topolattice
