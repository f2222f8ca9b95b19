#pragma once

// Numbered arc seeds shared by the CLI and the explorer service. Period 1:
// seed j is the mid-arc point at arg z0 = 2 pi j / (d + 1). Odd k >= 3: seed j
// marches from the j-th census center of period k toward the origin. Going
// outward from a real center lands exactly on a cusp.

#include <algorithm>
#include <string>
#include <vector>

#include "multicorn/census.hpp"
#include "multicorn/parabolic.hpp"

namespace multicorn {

/// Number of seeds for (d, k); 0 when k is even (no parabolic arcs).
inline int arc_seed_count(int d, int k) {
  if (k < 1 || k % 2 == 0) return 0;
  if (k == 1) return d + 1;
  return static_cast<int>(find_centers(d, k).size());
}

/// Throws not_periodic when the seed does not exist.
inline ArcSample seed_arc(int d, int k, int index, const SampleOptions& opt = {}) {
  if (d < 2) throw Error(ErrorKind::invalid_argument, "degree must be >= 2");
  if (k < 1 || k % 2 == 0) throw Error(ErrorKind::not_periodic, "no parabolic arcs of even period");
  if (k == 1) {
    if (index < 0 || index > d) throw Error(ErrorKind::not_periodic, "no period-1 arc seed " + std::to_string(index));
    const auto [c, z] = main_arc_closed_form(d, 2.0 * pi * index / (d + 1));
    return solve_parabolic(MapSpec(d, c), 1, z, opt);
  }
  const std::vector<Cplx> centers = find_centers(d, k);
  if (index < 0 || index >= static_cast<int>(centers.size()))
    throw Error(ErrorKind::not_periodic, "no period-" + std::to_string(k) + " arc seed " + std::to_string(index));
  const Cplx center = centers[static_cast<std::size_t>(index)];
  const auto [c, z] = seed_from_center(d, k, center, -center);
  return solve_parabolic(MapSpec(d, c), k, z, opt);
}

/// Arc of odd period k on the boundary of the component whose center is
/// nearest `target`, reached by marching from that center toward `target`.
inline std::vector<ArcSample> arc_facing(int d, int k, Cplx target, const TraceOptions& opt = {}) {
  const std::vector<Cplx> centers = find_centers(d, k);
  if (centers.empty()) throw Error(ErrorKind::not_periodic, "no centers of period " + std::to_string(k));
  const Cplx center = *std::min_element(centers.begin(), centers.end(), [&](Cplx a, Cplx b) {
    return std::abs(a - target) < std::abs(b - target);
  });
  const auto [c, z] = seed_from_center(d, k, center, target == center ? center : target - center);
  return trace_full_arc(solve_parabolic(MapSpec(d, c), k, z, opt.sample), opt);
}

}  // namespace multicorn
