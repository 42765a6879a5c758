// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ppiref/interface.hpp"
#include "ppiref/structure.hpp"

namespace ppiref {

/// Biophysical acceptance criteria for putative interactions. An empty
/// method set or an absent resolution bound disables that criterion.
struct FilterCriteria {
  std::set<std::string> allowed_methods = {"x-ray diffraction", "electron microscopy"};
  std::optional<double> max_resolution = 3.5;
  double min_bsa = 500.0;

  /// Criteria that every interface passes.
  static FilterCriteria permissive() { return FilterCriteria{{}, std::nullopt, 0.0}; }
  void validate() const;
};

enum class FilterReason { Method, Resolution, Bsa };
std::string to_string(FilterReason reason);

struct InterfaceVerdict {
  std::string id;
  std::string method;
  std::optional<double> resolution;
  double bsa = 0.0;
  std::vector<FilterReason> reasons;  // empty when retained

  bool passed() const { return reasons.empty(); }
};

struct FilterReport {
  std::size_t total = 0;
  std::size_t pass_method = 0;
  std::size_t pass_resolution = 0;
  std::size_t pass_bsa = 0;
  std::size_t retained = 0;
  std::vector<InterfaceVerdict> verdicts;  // input order
};

/// Failed criteria for one interface's metadata and BSA.
std::vector<FilterReason> check_criteria(const std::string& method, std::optional<double> resolution, double bsa,
                                         const FilterCriteria& criteria);

struct FilterResult {
  std::vector<Interface> retained;
  FilterReport report;
};

/// Keeps interfaces whose source structure passes method and resolution
/// and whose BSA reaches the minimum. `structures` is keyed by entry id;
/// a missing source throws Error(InvalidArgument).
FilterResult filter_interfaces(const std::vector<Interface>& interfaces,
                               const std::map<std::string, const Structure*>& structures,
                               const FilterCriteria& criteria);

}  // namespace ppiref
