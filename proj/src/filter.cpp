// SPDX-License-Identifier: Apache-2.0
#include "ppiref/filter.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "ppiref/error.hpp"
#include "ppiref/log.hpp"
#include "ppiref/sasa.hpp"

namespace ppiref {

namespace {

std::string lower_trim(const std::string& s) {
  std::string out;
  for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.front()))) out.erase(out.begin());
  while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
  return out;
}

bool method_allowed(const std::string& method, const std::set<std::string>& allowed) {
  if (allowed.empty()) return true;
  std::set<std::string> normalized;
  for (const auto& a : allowed) normalized.insert(lower_trim(a));
  // Hybrid entries list several methods; any allowed one suffices.
  std::size_t pos = 0;
  while (pos <= method.size()) {
    std::size_t semi = method.find(';', pos);
    if (semi == std::string::npos) semi = method.size();
    if (normalized.count(lower_trim(method.substr(pos, semi - pos)))) return true;
    pos = semi + 1;
  }
  return false;
}

}  // namespace

void FilterCriteria::validate() const {
  if (max_resolution && !(*max_resolution > 0.0))
    fail(ErrorCode::InvalidArgument, "max_resolution must be positive");
  if (!(min_bsa >= 0.0)) fail(ErrorCode::InvalidArgument, "min_bsa must be non-negative");
}

std::string to_string(FilterReason reason) {
  switch (reason) {
    case FilterReason::Method: return "method";
    case FilterReason::Resolution: return "resolution";
    case FilterReason::Bsa: return "bsa";
  }
  return "unknown";
}

std::vector<FilterReason> check_criteria(const std::string& method, std::optional<double> resolution, double bsa,
                                         const FilterCriteria& criteria) {
  std::vector<FilterReason> reasons;
  if (!method_allowed(method, criteria.allowed_methods)) reasons.push_back(FilterReason::Method);
  if (criteria.max_resolution && !(resolution && *resolution <= *criteria.max_resolution))
    reasons.push_back(FilterReason::Resolution);
  if (!(bsa >= criteria.min_bsa)) reasons.push_back(FilterReason::Bsa);
  return reasons;
}

FilterResult filter_interfaces(const std::vector<Interface>& interfaces,
                               const std::map<std::string, const Structure*>& structures,
                               const FilterCriteria& criteria) {
  criteria.validate();
  FilterResult result;
  FilterReport& report = result.report;
  // Isolated-chain SASA is shared by every interface a chain takes part in.
  std::map<std::pair<std::string, std::string>, double> chain_sasa;
  auto bsa_of = [&](const Structure& s, const Interface& iface) {
    double separate = 0.0;
    for (const std::string& id : iface.chain_ids()) {
      auto [it, fresh] = chain_sasa.try_emplace({s.entry_id, id}, 0.0);
      if (fresh) {
        const std::string one[] = {id};
        it->second = total_sasa(sasa_atoms(s, one));
      }
      separate += it->second;
    }
    const auto ids = iface.chain_ids();
    return std::max(0.0, separate - total_sasa(sasa_atoms(s, ids)));
  };
  for (const Interface& iface : interfaces) {
    auto it = structures.find(iface.source);
    if (it == structures.end() || it->second == nullptr)
      fail(ErrorCode::InvalidArgument, "source structure '" + iface.source + "' of " + iface.id + " not available");
    const Structure& s = *it->second;

    InterfaceVerdict v;
    v.id = iface.id;
    v.method = s.method;
    v.resolution = s.resolution;
    v.bsa = bsa_of(s, iface);
    v.reasons = check_criteria(s.method, s.resolution, v.bsa, criteria);
    if (s.method.empty()) log_warning(iface.id + ": no experiment method recorded");
    if (!s.resolution && criteria.max_resolution) log_warning(iface.id + ": no resolution recorded");

    ++report.total;
    auto failed = [&](FilterReason r) { return std::find(v.reasons.begin(), v.reasons.end(), r) != v.reasons.end(); };
    if (!failed(FilterReason::Method)) ++report.pass_method;
    if (!failed(FilterReason::Resolution)) ++report.pass_resolution;
    if (!failed(FilterReason::Bsa)) ++report.pass_bsa;
    if (v.passed()) {
      ++report.retained;
      result.retained.push_back(iface);
    }
    report.verdicts.push_back(std::move(v));
  }
  return result;
}

}  // namespace ppiref
