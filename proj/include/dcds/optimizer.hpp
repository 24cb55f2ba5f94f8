#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dcds/analysis.hpp"
#include "dcds/ir.hpp"

namespace dcds {

struct PassReport {
  std::string pass;
  std::vector<std::string> removed_functions;   // qualified "Spec.fn"
  std::vector<std::string> removed_attributes;  // qualified "Spec.attr"
  std::vector<std::pair<std::string, Value>> folded_attributes;
  int iteration = 1;  // fixed-point round the pass ran in

  bool changed() const {
    return !removed_functions.empty() || !removed_attributes.empty() ||
           !folded_attributes.empty();
  }
  std::string to_string() const;
};

// The four logical passes. Each takes a serial spec plus rw sets
// computed for exactly that spec, and returns a transformed copy.
SpecPtr prune_unused_functions(const SpecPtr& spec, const RWSetTable& rw,
                               PassReport* report = nullptr);
SpecPtr remove_unused_attributes(const SpecPtr& spec, const RWSetTable& rw,
                                 PassReport* report = nullptr);
SpecPtr fold_readonly_attributes(const SpecPtr& spec, const RWSetTable& rw,
                                 PassReport* report = nullptr);
SpecPtr remove_writeonly_attributes(const SpecPtr& spec, const RWSetTable& rw,
                                    PassReport* report = nullptr);

/// Runs passes 1-4 in order, recomputing rw sets after each, and
/// repeats the sequence until a full round changes nothing.
std::pair<SpecPtr, std::vector<PassReport>> optimize(const SpecPtr& spec);

}  // namespace dcds
