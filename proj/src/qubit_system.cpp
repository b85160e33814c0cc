#include "rydopt/qubit_system.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace rydopt {

namespace {

void check_n_qubits(int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::invalid_argument("n_qubits must be in [1, " +
                                std::to_string(kMaxQubits) + "], got " +
                                std::to_string(n_qubits));
}

}  // namespace

int qubit_bit(BitId state, int n_qubits, int qubit) {
  return static_cast<int>((state >> (n_qubits - qubit)) & 1u);
}

std::string bit_to_string(BitId state, int n_qubits) {
  std::string s(static_cast<size_t>(n_qubits), '0');
  for (int q = 1; q <= n_qubits; ++q)
    if (qubit_bit(state, n_qubits, q)) s[static_cast<size_t>(q - 1)] = '1';
  return s;
}

BitId bit_from_string(const std::string& s) {
  if (s.empty() || s.size() > static_cast<size_t>(kMaxQubits))
    throw std::invalid_argument("bitstring length must be in [1, " +
                                std::to_string(kMaxQubits) + "]: \"" + s + "\"");
  BitId v = 0;
  for (char c : s) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("bitstring may contain only 0/1: \"" + s + "\"");
    v = (v << 1) | static_cast<BitId>(c - '0');
  }
  return v;
}

std::vector<BitId> basis_order(int n_qubits) {
  check_n_qubits(n_qubits);
  std::vector<BitId> order;
  order.reserve(1u << n_qubits);
  for (BitId v = 0; v < (1u << n_qubits); ++v) order.push_back(v);
  std::stable_sort(order.begin(), order.end(), [](BitId a, BitId b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  });
  return order;
}

GateSpec GateSpec::cz(int n_qubits, std::vector<int> targets) {
  check_n_qubits(n_qubits);
  std::sort(targets.begin(), targets.end());
  if (targets.size() < 2)
    throw std::invalid_argument("entangling gate needs at least 2 target qubits");
  if (targets.size() > 3)
    throw std::invalid_argument("only 2- and 3-qubit entangling gates are supported");
  for (size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 1 || targets[i] > n_qubits)
      throw std::invalid_argument("target qubit out of range");
    if (i > 0 && targets[i] == targets[i - 1])
      throw std::invalid_argument("duplicate target qubit");
  }
  GateSpec g;
  g.n_qubits = n_qubits;
  g.target_set = std::move(targets);
  return g;
}

int GateSpec::sign_of(BitId state) const {
  for (int q : target_set)
    if (!qubit_bit(state, n_qubits, q)) return -1;
  return +1;
}

std::string GateSpec::name() const {
  bool canonical = true;
  for (size_t i = 0; i < target_set.size(); ++i)
    if (target_set[i] != static_cast<int>(i) + 1) canonical = false;
  if (canonical) return target_set.size() == 2 ? "pab" : "pabc";
  std::string s = "p{";
  for (size_t i = 0; i < target_set.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(target_set[i]);
  }
  return s + "}";
}

std::vector<int> gate_signature(const GateSpec& gate) {
  std::vector<int> sig;
  for (BitId v : basis_order(gate.n_qubits)) sig.push_back(gate.sign_of(v));
  return sig;
}

std::string Subsystem::ground_string() const {
  return bit_to_string(ground, n_qubits);
}

std::vector<std::string> Subsystem::rydberg_state_strings() const {
  std::vector<std::string> out;
  for (int q : coupled_qubits) {
    std::string s = ground_string();
    s[static_cast<size_t>(q - 1)] = 'r';
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

int subsystem_label(BitId ground, int n_qubits, int n) {
  if (n == n_qubits || n == 0) return 1;
  if (n == n_qubits - 1) {
    // Single excited qubit: m is its position.
    for (int q = 1; q <= n_qubits; ++q)
      if (qubit_bit(ground, n_qubits, q)) return q;
  }
  // Lexicographic rank within the class of equal excitation number.
  const int pop = std::popcount(ground);
  int rank = 1;
  for (BitId v = 0; v < ground; ++v)
    if (std::popcount(v) == pop) ++rank;
  return rank;
}

}  // namespace

Subsystem subsystem_of(BitId ground, int n_qubits) {
  check_n_qubits(n_qubits);
  if (ground >= (1u << n_qubits))
    throw std::invalid_argument("ground state out of range for n_qubits");
  Subsystem sub;
  sub.n_qubits = n_qubits;
  sub.ground = ground;
  for (int q = 1; q <= n_qubits; ++q)
    if (!qubit_bit(ground, n_qubits, q)) sub.coupled_qubits.push_back(q);
  sub.n = static_cast<int>(sub.coupled_qubits.size());
  sub.m = subsystem_label(ground, n_qubits, sub.n);
  return sub;
}

Subsystem subsystem_of(const std::string& ground) {
  return subsystem_of(bit_from_string(ground), static_cast<int>(ground.size()));
}

std::vector<Subsystem> enumerate_subsystems(int n_qubits) {
  check_n_qubits(n_qubits);
  std::vector<Subsystem> out;
  out.reserve(1u << n_qubits);
  for (BitId v : basis_order(n_qubits)) out.push_back(subsystem_of(v, n_qubits));
  return out;
}

long reachable_state_count(int n_qubits) {
  check_n_qubits(n_qubits);
  return (1L << n_qubits) + static_cast<long>(n_qubits) * (1L << (n_qubits - 1));
}

}  // namespace rydopt
