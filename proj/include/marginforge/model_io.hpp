#pragma once

#include <string>

#include <json.hpp>

#include "marginforge/kernel.hpp"
#include "marginforge/local_sampling.hpp"
#include "marginforge/solver.hpp"

namespace marginforge {

// KernelSpec <-> {"kernel": "rbf", "gamma": .., "degree": .., "cost": ..,
//                 "formulation": "l1"}
nlohmann::json kernel_to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const nlohmann::json& j);

// Model document: kernel, bias, flags and one row per support vector with
// its training index, label, multiplier and features.
nlohmann::json model_to_json(const SvmModel& model);
SvmModel model_from_json(const nlohmann::json& j);

void save_model(const std::string& path, const SvmModel& model);
SvmModel load_model(const std::string& path);

// Enrichment summary: sizes, k, radius and a 10-bin histogram of the
// sampling weights over [0, max weight]. Timings are left to the caller.
nlohmann::json trace_to_json(const EnrichmentTrace& trace);

std::string hex64(std::uint64_t v);

}  // namespace marginforge
