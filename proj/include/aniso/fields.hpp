#pragma once

#include <map>
#include <string>

#include "aniso/types.hpp"

namespace aniso {

/// C-infinity step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t);

/// C-infinity bump profile on (-1,1): exp(1 - 1/(1 - t^2)), 0 outside.
double smooth_bump(double t);

struct BuiltinParam {
  std::string name;
  double default_value = 0.0;
  bool required = false;
  std::string doc;
};

struct BuiltinInfo {
  std::string name;
  std::string doc;
  std::vector<BuiltinParam> params;
};

/// Closed catalog of named fields with constructor-certified bounds and
/// support radii.  Vector-valued parameters use suffixed names (k1..kn,
/// r1..rn).
const std::vector<BuiltinInfo>& builtin_catalog();

/// Instantiates a catalog field on R^dim.  Unknown names raise an error
/// listing the nearest matches; unknown parameter keys are rejected.
ScalarField make_builtin(const std::string& name,
                         const std::map<std::string, double>& params, int dim);

}  // namespace aniso
