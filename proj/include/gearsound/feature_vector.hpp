#pragma once

#include <string>
#include <vector>

#include "gearsound/errors.hpp"

namespace gearsound {

// Named, ordered real-valued features. Names are unique and parallel to
// values; order is part of the contract for downstream concatenation.
struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }

  void push(std::string name, double value) {
    names.push_back(std::move(name));
    values.push_back(value);
  }

  // Appends all entries of other, prefix-free; names must stay unique.
  void append(const FeatureVector& other) {
    for (std::size_t i = 0; i < other.size(); ++i) {
      push(other.names[i], other.values[i]);
    }
  }
};

}  // namespace gearsound
