#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rydopt {

// A computational basis state of N qubits. Qubit 1 ("a") is the leftmost
// character of the printed bitstring and the most significant of the N
// stored bits.
using BitId = std::uint32_t;

// Enumeration is exponential in N; anything beyond this is a usage error.
constexpr int kMaxQubits = 12;

int qubit_bit(BitId state, int n_qubits, int qubit);
std::string bit_to_string(BitId state, int n_qubits);
BitId bit_from_string(const std::string& s);  // throws std::invalid_argument

// Canonical basis order used for signatures, amplitude maps and mechanism
// tuples: by number of 1-bits ascending, then lexicographic. For N=3 this is
// |000>,|001>,|010>,|100>,|011>,|101>,|110>,|111>.
std::vector<BitId> basis_order(int n_qubits);

// Diagonal CZ-type entangling gate P_Q on a subset Q of qubits: the
// signature is +1 exactly on basis states where every qubit in Q is 1,
// and -1 elsewhere, regardless of the remaining qubits.
struct GateSpec {
  int n_qubits = 0;
  std::vector<int> target_set;  // 1-based qubit indices, ascending

  // |targets| must be 2 or 3; throws std::invalid_argument otherwise.
  static GateSpec cz(int n_qubits, std::vector<int> targets);

  int sign_of(BitId state) const;
  std::string name() const;  // "pab", "pabc", "p{1,3}", ...
};

// Signature diagonal in basis order.
std::vector<int> gate_signature(const GateSpec& gate);

// One V^(n,m) block of the blockade-restricted Hilbert space: a ground
// computational state plus the n single-Rydberg states reached by promoting
// one of its 0-bits. Under perfect blockade these blocks are disconnected.
struct Subsystem {
  int n_qubits = 0;
  BitId ground = 0;
  std::vector<int> coupled_qubits;  // 1-based 0-bit positions, ascending
  int n = 0;                        // number of reachable Rydberg states
  int m = 0;                        // V^(n,m) label, see subsystem_of()

  std::string ground_string() const;
  // Rydberg states in coupled_qubits order, e.g. "r10" for ground "010"... n strings.
  std::vector<std::string> rydberg_state_strings() const;
};

// The m label follows the convention that V^(N-1,m) has its single excited
// qubit at position m (ground |10...0> is m=1); other classes are labeled
// by lexicographic rank of the ground bitstring, which for the two-level
// V^(1,m) class coincides with the position of the empty site.
Subsystem subsystem_of(BitId ground, int n_qubits);
Subsystem subsystem_of(const std::string& ground);  // throws on malformed input

// All 2^N subsystems in basis order.
std::vector<Subsystem> enumerate_subsystems(int n_qubits);

// 2^N + N 2^(N-1)
long reachable_state_count(int n_qubits);

}  // namespace rydopt
