#pragma once

// Built-in scenario library.  The entries are ordinary scenario files kept as
// JSON text so `describe` prints exactly what `run` executes and every
// builtin goes through the same schema validation as user files.

#include <string>
#include <vector>

#include "gluecd/common.hpp"

namespace gluecd {

struct BuiltinEntry {
    const char* name;
    const char* summary;
    const char* text;
};

inline const std::vector<BuiltinEntry>& builtin_scenarios() {
    static const std::vector<BuiltinEntry> entries = {
        {"disk-doubling",
         "two flat unit disks glued along their boundary circles; convex doubling, CD(0,2)",
         R"json({
  "name": "disk-doubling",
  "description": "Two flat unit disks glued along their boundary circles (convex doubling).",
  "space": {
    "type": "glued",
    "side0": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 0.9]],
              "metric": ["(1-x2)^2", "0", "1"], "weight": "1", "N": 2,
              "faces": [{"axis": 2, "side": "min", "role": "glue"},
                         {"axis": 2, "side": "max", "role": "free"}]},
    "side1": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 0.9]],
              "metric": ["(1-x2)^2", "0", "1"], "weight": "1", "N": 2,
              "faces": [{"axis": 2, "side": "min", "role": "glue"},
                         {"axis": 2, "side": "max", "role": "free"}]}
  },
  "tasks": [
    {"type": "compatibility"},
    {"type": "c1-check", "delta": 0.1},
    {"type": "needle", "y": [[3.141592653589793]], "t_range": [-0.5, 0.5], "K": 0, "N": 2},
    {"type": "tilted-needle", "y": [3.141592653589793], "b": [0, 0.1, 0.5]},
    {"type": "smooth-sweep", "deltas": [0.2, 0.1, 0.05], "K": 0, "N": 2, "max_epsilon": 0.1}
  ]
})json"},
        {"annulus-doubling",
         "two flat annuli glued along the inner circle; concave interface, fails CD",
         R"json({
  "name": "annulus-doubling",
  "description": "Two flat annuli glued along their inner boundary circles (concave gluing).",
  "space": {
    "type": "glued",
    "side0": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 0.9]],
              "metric": ["(1+x2)^2", "0", "1"], "weight": "1", "N": 2,
              "faces": [{"axis": 2, "side": "min", "role": "glue"},
                         {"axis": 2, "side": "max", "role": "free"}]},
    "side1": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 0.9]],
              "metric": ["(1+x2)^2", "0", "1"], "weight": "1", "N": 2,
              "faces": [{"axis": 2, "side": "min", "role": "glue"},
                         {"axis": 2, "side": "max", "role": "free"}]}
  },
  "tasks": [
    {"type": "compatibility"},
    {"type": "needle", "y": [[1.0]], "t_range": [-0.5, 0.5], "K": 0, "N": 2}
  ]
})json"},
        {"hemisphere-doubling",
         "two unit hemispheres glued along the equator; the round sphere, CD(1,2)",
         R"json({
  "name": "hemisphere-doubling",
  "description": "Two unit hemispheres glued along their equators (the round sphere).",
  "space": {
    "type": "glued",
    "side0": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 0.8]],
              "metric": ["cos(x2)^2", "0", "1"], "weight": "1", "N": 2,
              "faces": [{"axis": 2, "side": "min", "role": "glue"},
                         {"axis": 2, "side": "max", "role": "free"}]},
    "side1": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 0.8]],
              "metric": ["cos(x2)^2", "0", "1"], "weight": "1", "N": 2,
              "faces": [{"axis": 2, "side": "min", "role": "glue"},
                         {"axis": 2, "side": "max", "role": "free"}]}
  },
  "tasks": [
    {"type": "compatibility"},
    {"type": "needle", "y": [[2.0]], "t_range": [-0.5, 0.5], "K": 1, "N": 2},
    {"type": "smooth-sweep", "deltas": [0.2, 0.1, 0.05], "K": 1, "N": 2, "max_epsilon": 0.2}
  ]
})json"},
        {"weighted-disk",
         "doubled flat disk with weight 2 - r; boundary case H^Phi = 0",
         R"json({
  "name": "weighted-disk",
  "description": "Doubled flat unit disk carrying the weight 2 - r (H^Phi = 0 on the circle).",
  "space": {
    "type": "glued",
    "side0": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 0.9]],
              "metric": ["(1-x2)^2", "0", "1"], "weight": "1 + x2", "N": 3,
              "faces": [{"axis": 2, "side": "min", "role": "glue"},
                         {"axis": 2, "side": "max", "role": "free"}]},
    "side1": {"dim": 2, "domain": [[0, 6.283185307179586], [0, 0.9]],
              "metric": ["(1-x2)^2", "0", "1"], "weight": "1 + x2", "N": 3,
              "faces": [{"axis": 2, "side": "min", "role": "glue"},
                         {"axis": 2, "side": "max", "role": "free"}]}
  },
  "tasks": [
    {"type": "compatibility"},
    {"type": "needle", "y": [[4.0]], "t_range": [-0.5, 0.5], "K": 0, "N": 3}
  ]
})json"},
        {"1d-sin-doubling",
         "sin^{N-1} density doubled at its maximum; stays (N-1, N)-concave",
         R"json({
  "name": "1d-sin-doubling",
  "description": "The density sin^2 on [0, pi/2] doubled at pi/2 (glued density sin^2 on [0, pi]).",
  "space": {
    "type": "interval-pair",
    "left":  {"domain": [0, 1.5707963267948966], "density": "sin(x1)^2"},
    "right": {"domain": [1.5707963267948966, 3.141592653589793], "density": "sin(x1)^2"},
    "K": 2, "N": 3
  },
  "tasks": [
    {"type": "glue-1d"},
    {"type": "kn-concavity"},
    {"type": "wasserstein", "scan": true}
  ]
})json"},
        {"1d-affine-fail",
         "affine density doubled at a valley kink; CD(0,2) fails",
         R"json({
  "name": "1d-affine-fail",
  "description": "The density 1 - t/2 on [0,1] doubled at 1: the valley kink breaks CD(0,2).",
  "space": {
    "type": "interval-pair",
    "left":  {"domain": [0, 1], "density": "1 - x1/2"},
    "right": {"domain": [1, 2], "density": "x1/2"},
    "K": 0, "N": 2
  },
  "tasks": [
    {"type": "glue-1d"},
    {"type": "wasserstein", "scan": true}
  ]
})json"},
        {"warped-sphere",
         "interval base with sin weight; warped product is the round 3-sphere",
         R"json({
  "name": "warped-sphere",
  "description": "Base (0, pi) with weight sin^2, N = 3: the warped product over a round fiber is S^3.",
  "space": {
    "type": "manifold",
    "side0": {"dim": 1, "domain": [[0, 3.141592653589793]],
              "metric": ["1"], "weight": "sin(x1)^2", "N": 3,
              "faces": [{"axis": 1, "side": "min", "role": "zero-set"},
                         {"axis": 1, "side": "max", "role": "zero-set"}]}
  },
  "tasks": [
    {"type": "ricci-sweep", "K": 2},
    {"type": "warp", "kappa": 1, "K_F": 1, "kappa_bar": 1, "eta": 1, "L": 1}
  ]
})json"},
        {"sin-weight-interval",
         "weighted interval ([0,pi], sin^{N-1} dt); sharp CD(N-1, N) example",
         R"json({
  "name": "sin-weight-interval",
  "description": "The model space ([0, pi], sin^2 dt) with N = 3, K = N - 1 = 2.",
  "space": {
    "type": "interval",
    "domain": [0, 3.141592653589793],
    "density": "sin(x1)^2",
    "K": 2, "N": 3
  },
  "tasks": [
    {"type": "kn-concavity"},
    {"type": "wasserstein", "mu0": "exp(-4*(x1-1)^2)", "mu1": "exp(-4*(x1-2.1)^2)"},
    {"type": "weight-concavity", "kappa_bar": 1, "eta": 1},
    {"type": "gradient-bound", "k": 1, "L": 1}
  ]
})json"},
    };
    return entries;
}

inline std::string builtin_scenario_text(const std::string& name) {
    for (const BuiltinEntry& e : builtin_scenarios())
        if (name == e.name) return e.text;
    throw ValidationError("unknown builtin scenario '" + name + "'");
}

inline bool is_builtin_scenario(const std::string& name) {
    for (const BuiltinEntry& e : builtin_scenarios())
        if (name == e.name) return true;
    return false;
}

}  // namespace gluecd
