#pragma once

#include <array>
#include <string_view>

namespace med {

/// Bundled experiment setups: the six reward configurations with MED
/// (r = 2, d = 0.01), UCB-tuned and UCB2 (alpha = 0.001), 1000 runs each.
/// `--runs` scales the replication count down.
struct Preset {
  std::string_view name;
  std::string_view description;
  std::string_view json;
};

inline constexpr std::array<Preset, 6> kPresets{{
    {"dist1", "Bernoulli arms 0.55 / 0.45", R"json({
  "name": "dist1",
  "description": "Bernoulli arms 0.55 / 0.45",
  "bounds": [0.0, 1.0],
  "arms": [
    {"kind": "bernoulli", "p": 0.55},
    {"kind": "bernoulli", "p": 0.45}
  ],
  "policies": [
    {"policy": "med", "r": 2, "d": 0.01},
    {"policy": "ucb-tuned"},
    {"policy": "ucb2", "alpha": 0.001}
  ],
  "horizon": 10000,
  "runs": 1000,
  "seed": 42,
  "checkpoints": "log",
  "output": "dist1.csv",
  "bound_atoms": 10000
})json"},
    {"dist2", "two-point uniform arms {0.4, 0.8} / {0.2, 0.6}", R"json({
  "name": "dist2",
  "description": "two-point uniform arms {0.4, 0.8} / {0.2, 0.6}",
  "bounds": [0.0, 1.0],
  "arms": [
    {"kind": "discrete", "points": [0.4, 0.8], "probs": [0.5, 0.5]},
    {"kind": "discrete", "points": [0.2, 0.6], "probs": [0.5, 0.5]}
  ],
  "policies": [
    {"policy": "med", "r": 2, "d": 0.01},
    {"policy": "ucb-tuned"},
    {"policy": "ucb2", "alpha": 0.001}
  ],
  "horizon": 10000,
  "runs": 1000,
  "seed": 42,
  "checkpoints": "log",
  "output": "dist2.csv",
  "bound_atoms": 10000
})json"},
    {"dist3", "11-point grid with extra mass at 1 (mean 0.56) vs uniform grid (mean 0.5)", R"json({
  "name": "dist3",
  "description": "11-point grid with extra mass at 1 (mean 0.56) vs uniform grid (mean 0.5)",
  "bounds": [0.0, 1.0],
  "arms": [
    {"kind": "discrete", "points": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0], "probs": [0.08, 0.08, 0.08, 0.08, 0.08, 0.08, 0.08, 0.08, 0.08, 0.08, 0.2]},
    {"kind": "discrete", "points": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0], "probs": [0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912]}
  ],
  "policies": [
    {"policy": "med", "r": 2, "d": 0.01},
    {"policy": "ucb-tuned"},
    {"policy": "ucb2", "alpha": 0.001}
  ],
  "horizon": 10000,
  "runs": 1000,
  "seed": 42,
  "checkpoints": "log",
  "output": "dist3.csv",
  "bound_atoms": 10000
})json"},
    {"dist4", "very confusing arms: Bernoulli 0.01 vs {0.008, 0.009}", R"json({
  "name": "dist4",
  "description": "very confusing arms: Bernoulli 0.01 vs {0.008, 0.009}",
  "bounds": [0.0, 1.0],
  "arms": [
    {"kind": "discrete", "points": [0.0, 1.0], "probs": [0.99, 0.01]},
    {"kind": "discrete", "points": [0.008, 0.009], "probs": [0.5, 0.5]}
  ],
  "policies": [
    {"policy": "med", "r": 2, "d": 0.01},
    {"policy": "ucb-tuned"},
    {"policy": "ucb2", "alpha": 0.001}
  ],
  "horizon": 10000,
  "runs": 1000,
  "seed": 42,
  "checkpoints": "log",
  "output": "dist4.csv",
  "bound_atoms": 10000
})json"},
    {"dist5", "5 arms with 11-point support", R"json({
  "name": "dist5",
  "description": "5 arms with 11-point support",
  "bounds": [0.0, 1.0],
  "arms": [
    {"kind": "discrete", "points": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0], "probs": [0.08, 0.08, 0.08, 0.08, 0.08, 0.08, 0.08, 0.08, 0.08, 0.08, 0.2]},
    {"kind": "discrete", "points": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0], "probs": [0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912]},
    {"kind": "discrete", "points": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0], "probs": [0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912]},
    {"kind": "discrete", "points": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0], "probs": [0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912]},
    {"kind": "discrete", "points": [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0], "probs": [0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912, 0.090909090909090912]}
  ],
  "policies": [
    {"policy": "med", "r": 2, "d": 0.01},
    {"policy": "ucb-tuned"},
    {"policy": "ucb2", "alpha": 0.001}
  ],
  "horizon": 10000,
  "runs": 1000,
  "seed": 42,
  "checkpoints": "log",
  "output": "dist5.csv",
  "bound_atoms": 10000
})json"},
    {"dist6", "5 beta arms with means 0.9 / 0.7 / 0.5 / 0.3 / 0.1", R"json({
  "name": "dist6",
  "description": "5 beta arms with means 0.9 / 0.7 / 0.5 / 0.3 / 0.1",
  "bounds": [0.0, 1.0],
  "arms": [
    {"kind": "beta", "alpha": 0.9, "beta": 0.1},
    {"kind": "beta", "alpha": 7, "beta": 3},
    {"kind": "beta", "alpha": 0.5, "beta": 0.5},
    {"kind": "beta", "alpha": 3, "beta": 7},
    {"kind": "beta", "alpha": 0.1, "beta": 0.9}
  ],
  "policies": [
    {"policy": "med", "r": 2, "d": 0.01},
    {"policy": "ucb-tuned"},
    {"policy": "ucb2", "alpha": 0.001}
  ],
  "horizon": 10000,
  "runs": 1000,
  "seed": 42,
  "checkpoints": "log",
  "output": "dist6.csv",
  "bound_atoms": 10000
})json"},
}};

inline const Preset* find_preset(std::string_view name) {
  for (const auto& p : kPresets) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

}  // namespace med
