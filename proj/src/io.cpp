#include "cycleweights/io.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cycleweights/errors.hpp"

namespace cycleweights::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", v);
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const FamilyParams& p) {
  json j = {{"family", std::string(family_name(p.kind))}};
  switch (p.kind) {
    case FamilyKind::Uniform: break;
    case FamilyKind::Ewens:
    case FamilyKind::AsymptoticEwens: j["theta"] = p.theta; break;
    case FamilyKind::Custom: {
      json arr = json::array();
      for (double v : p.custom_log_weights) arr.push_back(number_or_null(v));
      j["custom_log_weights"] = std::move(arr);
      break;
    }
    default: j["gamma"] = p.gamma; break;
  }
  return j;
}

FamilyParams family_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("family config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (key != "family" && key != "theta" && key != "gamma" && key != "custom_log_weights") {
      throw ConfigError(fmt::format("unknown family key '{}'", key));
    }
  }
  if (!j.contains("family") || !j["family"].is_string()) throw ConfigError("family config needs a string 'family'");
  FamilyParams p;
  p.kind = parse_family(j["family"].get<std::string>());
  auto number = [&](const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) throw ConfigError(fmt::format("'{}' must be a number", key));
    out = j[key].get<double>();
  };
  number("theta", p.theta);
  number("gamma", p.gamma);
  if (j.contains("custom_log_weights")) {
    const json& arr = j["custom_log_weights"];
    if (!arr.is_array()) throw ConfigError("'custom_log_weights' must be an array");
    for (const json& v : arr) {
      if (v.is_null()) {
        p.custom_log_weights.push_back(-std::numeric_limits<double>::infinity());
      } else if (v.is_number()) {
        p.custom_log_weights.push_back(v.get<double>());
      } else {
        throw ConfigError("'custom_log_weights' entries must be numbers or null");
      }
    }
  }
  p.validate();
  return p;
}

json to_json(const Pmf& pmf) {
  json rows = json::array();
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    rows.push_back({{"k", pmf.support[i]},
                    {"probability", pmf.probability(i)},
                    {"log_probability", number_or_null(pmf.log_prob[i])}});
  }
  return {{"label", pmf.label}, {"rows", std::move(rows)}};
}

json to_json(const BatchStats& st) {
  auto hist = [](const std::vector<double>& h) {
    json out = json::object();
    for (std::size_t k = 0; k < h.size(); ++k) {
      if (h[k] > 0.0) out[std::to_string(k)] = h[k];
    }
    return out;
  };
  auto moment = [](const MomentEstimate& m) { return json{{"mean", m.mean}, {"standard_error", m.standard_error}}; };
  json j = {{"n", st.n},
            {"num_samples", st.num_samples},
            {"seed", st.seed},
            {"j_max", st.j_max},
            {"digest", fmt::format("{:016x}", st.digest)}};
  if (!st.error.empty()) {
    j["error"] = st.error;
    return j;
  }
  j["L1"] = {{"histogram", hist(st.hist_L1)}, {"moment", moment(st.L1)}};
  j["K"] = {{"histogram", hist(st.hist_K)}, {"moment", moment(st.K)}};
  json rj = json::array();
  for (std::size_t i = 0; i < st.j_max; ++i) {
    rj.push_back({{"j", i + 1}, {"histogram", hist(st.hist_Rj[i])}, {"moment", moment(st.Rj[i])}});
  }
  j["R"] = std::move(rj);
  return j;
}

json to_json(const LimitLaw& law) {
  json params = json::object();
  for (const auto& [k, v] : law.params) params[k] = number_or_null(v);
  return {{"law", std::string(law_name(law.kind))}, {"params", std::move(params)}, {"rescale", law.rescale}};
}

std::string pmf_csv(const Pmf& pmf) {
  std::string out = "k,probability,log_probability\n";
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    out += fmt::format("{},{},{}\n", pmf.support[i], format_double(pmf.probability(i)), format_double(pmf.log_prob[i]));
  }
  return out;
}

std::string samples_csv(const std::vector<SampleRecord>& samples) {
  std::string out = "sample_index,K,L1,sorted_lengths\n";
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const SampleRecord& s = samples[i];
    out += fmt::format("{},{},{},{}\n", i, s.K, s.ordered_lengths.front(), fmt::join(s.sorted_lengths, ";"));
  }
  return out;
}

}  // namespace cycleweights::io
