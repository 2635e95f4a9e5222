#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "besselhit/errors.hpp"

namespace besselhit {

/// Labelled simulation output.
struct SampleSet {
  std::vector<double> values;
  std::string label;
  std::uint64_t seed = 0;
  std::size_t n_requested = 0;
  std::size_t n_valid = 0;
  /// Extra configuration echoed into serialized output.
  nlohmann::ordered_json metadata = nlohmann::ordered_json::object();

  SampleSet() = default;
  SampleSet(std::vector<double> v, std::string name, std::uint64_t s,
            std::size_t requested)
      : values(std::move(v)), label(std::move(name)), seed(s), n_requested(requested) {
    n_valid = values.size();
    validate();
  }

  std::span<const double> view() const noexcept { return values; }

  void validate() const {
    if (n_valid > n_requested) throw DomainError("SampleSet: n_valid > n_requested");
    if (n_valid != values.size()) throw DomainError("SampleSet: n_valid != size");
    for (double v : values) {
      if (!std::isfinite(v)) throw DomainError("SampleSet: non-finite value");
    }
  }

  nlohmann::ordered_json header() const {
    nlohmann::ordered_json h;
    h["label"] = label;
    h["seed"] = seed;
    h["n_requested"] = n_requested;
    h["n_valid"] = n_valid;
    for (const auto& [k, v] : metadata.items()) h[k] = v;
    return h;
  }

  nlohmann::ordered_json to_json() const {
    auto j = header();
    j["values"] = values;
    return j;
  }
};

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double x) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

/// `# key: value` lines, then a `value` column.
inline void write_csv(std::ostream& os, const SampleSet& set) {
  const auto header = set.header();
  for (const auto& [k, v] : header.items()) {
    os << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
  }
  os << "value\n";
  for (double v : set.values) os << format_double(v) << '\n';
}

inline void write_json(std::ostream& os, const SampleSet& set) {
  os << set.to_json().dump(2) << '\n';
}

}  // namespace besselhit
