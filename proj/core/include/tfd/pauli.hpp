#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tfd/numkernel.hpp"

namespace tfd::models {

enum class Pauli : std::uint8_t { X = 1, Y = 2, Z = 3 };

char to_char(Pauli p);
Pauli pauli_from_char(char c);

/// One site operator of a Pauli string; sites are 0-based.
using SiteOp = std::pair<int, Pauli>;

/// A real-weighted tensor product of single-site Paulis. `ops` is sorted by
/// site and never contains identities; an empty `ops` is the identity.
struct PauliString {
  std::vector<SiteOp> ops;
  double coefficient = 0.0;

  PauliString() = default;
  PauliString(std::vector<SiteOp> ops, double coefficient);

  int count(Pauli p) const;
  int min_site() const { return ops.empty() ? -1 : ops.front().first; }
  int max_site() const { return ops.empty() ? -1 : ops.back().first; }
  int span() const { return ops.empty() ? 0 : max_site() - min_site() + 1; }
};

/// Product of two Pauli strings (ignoring coefficients): returns the phase
/// in {+-1, +-i} and the resulting sorted op list.
std::pair<cplx, std::vector<SiteOp>> multiply_ops(const std::vector<SiteOp>& a,
                                                  const std::vector<SiteOp>& b);

class PauliSum {
 public:
  PauliSum() = default;
  PauliSum(int n_sites, std::string label = {});

  int n_sites() const { return n_sites_; }
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }
  const std::vector<PauliString>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// Appends a term; sites must lie in [0, n_sites).
  void add(std::vector<SiteOp> ops, double coefficient);
  void add(const PauliString& term);
  void add_constant(double value) { add({}, value); }

  /// Merges duplicate strings and drops exact zeros; result ordering is
  /// deterministic (lexicographic in ops). Idempotent.
  PauliSum canonical() const;

  PauliSum scaled(double factor) const;
  /// Relabels sites via `site_map[old] -> new` onto a lattice of `n_sites`.
  PauliSum remapped(const std::vector<int>& site_map, int n_sites) const;

  PauliSum& operator+=(const PauliSum& other);
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a += b.scaled(-1.0); }

  /// Operator product. Throws InvalidMatrix if the product is not Hermitian
  /// (imaginary parts that fail to cancel).
  PauliSum times(const PauliSum& other) const;

  double constant() const;
  double coefficient_l1() const;
  int max_span() const;

  bool operator==(const PauliSum& other) const;

 private:
  int n_sites_ = 0;
  std::string label_;
  std::vector<PauliString> terms_;
};

/// Line format: `coeff site:op site:op ...` with 0-based sites; a `# n_sites=<n>`
/// header line carries the lattice size and `# label=<text>` the label.
std::string to_text(const PauliSum& h);
PauliSum from_text(const std::string& text);
void write_text(std::ostream& os, const PauliSum& h);

}  // namespace tfd::models
