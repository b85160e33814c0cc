#pragma once

#include <utility>
#include <vector>

#include "rydopt/propagator.hpp"

namespace rydopt {

// Split of a block's survival amplitude U_T,11 into returning-path classes:
//   u0      never leaves the ground component,
//   u1      one excursion that comes down at the very next pulse,
//   ud      one excursion that dwells in the Rydberg manifold through one or
//           more intermediate pulses,
//   u2      two disjoint excursions,
//   u_extra three or more excursions (possible only for N_p >= 6).
// The classes always sum to U_T,11 exactly; classification is by pulse
// index, so a dwell across a pulse that happens to act as the identity on
// the block still counts as a d-loop.
struct LoopDecomposition {
  double u0 = 0.0;
  double u1 = 0.0;
  double ud = 0.0;
  double u2 = 0.0;
  double u_extra = 0.0;

  double total() const { return u0 + u1 + ud + u2 + u_extra; }
};

LoopDecomposition loop_decomposition(const Protocol& protocol, const Subsystem& sub);

// Mechanism-square coordinates. Components are first normalized against the
// block's target sign (u~ = -sign * u) so that a pure loop that hits its
// target lands on the corner the ranking expects, then
//   x = u~0 + u~1 - u~d - u~2,   y = u~0 + u~d - u~1 - u~2,
// with u_extra treated like u2 (subtracted from both).
std::pair<double, double> mechanism_coords(const LoopDecomposition& dec, int target_sign);

// 3x3 box rank of a point in the mechanism square: floor indices
// clamp(floor(3(x+1)/2)+1, 1, 3) per axis, omega = box_y + 3 (box_x - 1).
// Pure 0-loops land on omega=1, 1-loops on 3, d-loops on 7, 2-loops on 9;
// points outside [-1,1] clamp to the boundary boxes.
int mechanism_rank(double x, double y);

struct SubsystemMechanism {
  Subsystem subsystem;
  int target_sign = 0;
  LoopDecomposition loops;
  double x = 0.0;
  double y = 0.0;
  int omega = 0;
};

struct MechanismRecord {
  // All blocks with n >= 1, in basis order of their ground states.
  std::vector<SubsystemMechanism> entries;
  // omega values grouped by excitation class: omega_groups[n-1] lists the
  // omega of every V^(n,m) ordered by m. For N=3 this is the pair of cube
  // coordinates (omega^(1,*)), (omega^(2,*)) plus the single omega^(3,1).
  std::vector<std::vector<int>> omega_groups;
  std::vector<int> omega_group_sums;

  // Per-block omegas in entries order; the census key.
  std::vector<int> omega_tuple() const;
};

MechanismRecord mechanism_signature(const Protocol& protocol, const GateSpec& gate);

}  // namespace rydopt
