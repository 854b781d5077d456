#pragma once

// Reference systems shared by the tests.

#include <cmath>
#include <numbers>

#include "ifsg/ifs_core.hpp"

namespace ifsg::test {

inline SimSystem gasket() {
  const Point v3{0.5, std::sqrt(3.0) / 2};
  return SimSystem({Similarity(0.5, 0, false, 0), Similarity(0.5, 0, false, 0.5), Similarity(0.5, 0, false, v3 / 2.0)});
}

inline SimSystem vicsek() {
  const double t = 1.0 / 3;
  return SimSystem({Similarity(t, 0, false, 0), Similarity(t, 0, false, {2 * t, 0}), Similarity(t, 0, false, {0, 2 * t}),
                    Similarity(t, 0, false, {2 * t, 2 * t}), Similarity(t, 0, false, {t, t})});
}

// Center map z -> i z / 3 + (2 + i) / 3; same attractor as vicsek().
inline SimSystem vicsek_rotated() {
  const double t = 1.0 / 3;
  return SimSystem({Similarity(t, 0, false, 0), Similarity(t, 0, false, {2 * t, 0}), Similarity(t, 0, false, {0, 2 * t}),
                    Similarity(t, 0, false, {2 * t, 2 * t}),
                    Similarity(t, std::numbers::pi / 2, false, {2 * t, t})});
}

inline SimSystem cantor() { return SimSystem({Similarity(1.0 / 3, 0, false, 0), Similarity(1.0 / 3, 0, false, 2.0 / 3)}); }

inline SimSystem overlap() { return SimSystem({Similarity(0.7, 0, false, 0), Similarity(0.7, 0, false, 0.3)}); }

inline SimSystem segment() { return SimSystem({Similarity(0.5, 0, false, 0), Similarity(0.5, 0, false, 0.5)}); }

}  // namespace ifsg::test
