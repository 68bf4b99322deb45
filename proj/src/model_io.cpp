#include "marginforge/model_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "marginforge/error.hpp"

namespace marginforge {

using nlohmann::json;

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

json kernel_to_json(const KernelSpec& spec) {
  json j;
  j["kernel"] = std::string(to_string(spec.family));
  if (spec.family != KernelFamily::Linear) j["gamma"] = spec.gamma;
  if (spec.family == KernelFamily::Polynomial) j["degree"] = spec.degree;
  j["cost"] = spec.cost;
  j["formulation"] = std::string(to_string(spec.formulation));
  return j;
}

KernelSpec kernel_from_json(const json& j) {
  try {
    KernelSpec spec;
    spec.family = parse_kernel_family(j.value("kernel", std::string("rbf")));
    spec.gamma = j.value("gamma", 1.0);
    spec.degree = j.value("degree", 3);
    spec.cost = j.value("cost", 1.0);
    spec.formulation =
        parse_formulation(j.value("formulation", std::string("l1")));
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("kernel spec: ") + e.what());
  }
}

json model_to_json(const SvmModel& model) {
  json rows = json::array();
  for (std::size_t s = 0; s < model.num_sv(); ++s) {
    json x = json::array();
    for (const Feature& f : model.support_vectors[s].entries())
      x.push_back({f.index, f.value});
    rows.push_back({{"sv_index", model.sv_indices[s]},
                    {"y", static_cast<int>(model.sv_labels[s])},
                    {"alpha", model.alphas[s]},
                    {"x", std::move(x)}});
  }
  return {{"format", "marginforge-model"},
          {"version", 1},
          {"spec", kernel_to_json(model.spec)},
          {"bias", model.bias},
          {"training_view_id", hex64(model.training_view_id)},
          {"degenerate", model.degenerate},
          {"unconverged", model.unconverged},
          {"rows", std::move(rows)}};
}

SvmModel model_from_json(const json& j) {
  try {
    if (j.value("format", std::string()) != "marginforge-model")
      throw ConfigError("not a marginforge model document");
    SvmModel m;
    m.spec = kernel_from_json(j.at("spec"));
    m.bias = j.at("bias").get<double>();
    m.training_view_id =
        std::stoull(j.at("training_view_id").get<std::string>(), nullptr, 16);
    m.degenerate = j.value("degenerate", false);
    m.unconverged = j.value("unconverged", false);
    for (const json& row : j.at("rows")) {
      const int y = row.at("y").get<int>();
      if (y != 1 && y != -1) throw ConfigError("model row label must be +1/-1");
      const double alpha = row.at("alpha").get<double>();
      if (!(alpha > 0.0)) throw ConfigError("model row alpha must be positive");
      std::vector<Feature> entries;
      for (const json& e : row.at("x"))
        entries.push_back({e.at(0).get<std::int32_t>(), e.at(1).get<double>()});
      m.sv_indices.push_back(row.at("sv_index").get<std::size_t>());
      m.sv_labels.push_back(static_cast<Label>(y));
      m.alphas.push_back(alpha);
      m.support_vectors.emplace_back(std::move(entries));
    }
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model document: ") + e.what());
  } catch (const ContractError& e) {
    throw ConfigError(std::string("model document: ") + e.what());
  }
}

void save_model(const std::string& path, const SvmModel& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write model '" + path + "'");
  out << model_to_json(model).dump(2) << '\n';
}

SvmModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("model '" + path + "': " + e.what());
  }
  return model_from_json(j);
}

json trace_to_json(const EnrichmentTrace& trace) {
  constexpr std::size_t kBins = 10;
  double max_weight = 0.0;
  for (double w : trace.weights) max_weight = std::max(max_weight, w);
  std::vector<std::size_t> counts(kBins, 0);
  for (double w : trace.weights) {
    const auto bin = max_weight > 0.0
                         ? static_cast<std::size_t>(w / max_weight * kBins)
                         : std::size_t{0};
    ++counts[std::min(bin, kBins - 1)];
  }
  std::size_t drawn = 0, candidates = 0;
  for (const auto& d : trace.draws) drawn += d.size();
  for (std::size_t c : trace.candidate_counts) candidates += c;
  return {{"support_union", trace.support_union.size()},
          {"k", trace.k},
          {"median_radius", trace.median_radius},
          {"beta", trace.beta},
          {"radius", trace.radius},
          {"candidates", candidates},
          {"drawn", drawn},
          {"training_set", trace.training_set.size()},
          {"weight_histogram", {{"max", max_weight}, {"counts", counts}}}};
}

}  // namespace marginforge
