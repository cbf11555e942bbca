#pragma once

#include "varmin/analysis.hpp"

#include <doctest.h>

#include <cmath>

namespace testing {

using varmin::Vec;

inline Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

inline double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline varmin::LagrangianModel catalog(const std::string& name, int dim = 1,
                                       varmin::Params params = {}) {
  return varmin::catalog_lookup(name, params, dim);
}

/// Every catalog model in dimensions 1 and 2.
inline std::vector<varmin::LagrangianModel> all_catalog_models() {
  std::vector<varmin::LagrangianModel> out;
  for (int d : {1, 2}) {
    for (const auto& name : varmin::catalog_names()) out.push_back(varmin::catalog_lookup(name, {}, d));
  }
  out.push_back(varmin::catalog_lookup("anisotropic_quadratic", {{"mass0", 2.0}, {"mass1", 0.5}}, 2));
  out.push_back(varmin::catalog_lookup("mechanical", {{"amplitude", 0.7}, {"wavenumber", 2.0}}, 2));
  return out;
}

}  // namespace testing
