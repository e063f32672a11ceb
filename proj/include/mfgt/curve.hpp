#pragma once

#include <optional>
#include <vector>

namespace mfgt {

// Grid path: one cell per time index k = 0..n_t.
struct DiscreteCurve {
  std::vector<int> nodes;
  // Rectangle-rule action, when known.
  std::optional<double> action;

  int start() const { return nodes.front(); }
  int end() const { return nodes.back(); }
  int n_steps() const { return static_cast<int>(nodes.size()) - 1; }

  static DiscreteCurve constant(int cell, int n_steps) {
    return DiscreteCurve{std::vector<int>(static_cast<std::size_t>(n_steps) + 1, cell),
                         std::nullopt};
  }
};

}  // namespace mfgt
