#include "tfd/pauli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "tfd/error.hpp"

namespace tfd::models {

char to_char(Pauli p) {
  switch (p) {
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'X': case 'x': return Pauli::X;
    case 'Y': case 'y': return Pauli::Y;
    case 'Z': case 'z': return Pauli::Z;
    default: break;
  }
  throw Error(ErrorCode::ParseError, std::string("unknown Pauli '") + c + "'");
}

PauliString::PauliString(std::vector<SiteOp> ops_in, double coeff)
    : ops(std::move(ops_in)), coefficient(coeff) {
  std::sort(ops.begin(), ops.end());
  for (std::size_t i = 1; i < ops.size(); ++i) {
    if (ops[i].first == ops[i - 1].first) {
      throw Error(ErrorCode::InvalidMatrix,
                  "site " + std::to_string(ops[i].first) + " repeated in Pauli string");
    }
  }
}

int PauliString::count(Pauli p) const {
  return static_cast<int>(std::count_if(ops.begin(), ops.end(),
                                        [p](const SiteOp& op) { return op.second == p; }));
}

namespace {

// Single-site product a*b = phase * c, with identity encoded as 0.
std::pair<cplx, int> multiply_single(int a, int b) {
  if (a == 0) return {1.0, b};
  if (b == 0) return {1.0, a};
  if (a == b) return {1.0, 0};
  const int c = 6 - a - b;
  // Cyclic order X->Y->Z->X gives +i.
  const bool cyclic = (b - a + 3) % 3 == 1;
  return {cyclic ? cplx(0, 1) : cplx(0, -1), c};
}

}  // namespace

std::pair<cplx, std::vector<SiteOp>> multiply_ops(const std::vector<SiteOp>& a,
                                                  const std::vector<SiteOp>& b) {
  cplx phase = 1.0;
  std::vector<SiteOp> out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.push_back(b[j++]);
    } else {
      auto [ph, c] = multiply_single(static_cast<int>(a[i].second), static_cast<int>(b[j].second));
      phase *= ph;
      if (c != 0) out.emplace_back(a[i].first, static_cast<Pauli>(c));
      ++i;
      ++j;
    }
  }
  return {phase, out};
}

PauliSum::PauliSum(int n_sites, std::string label) : n_sites_(n_sites), label_(std::move(label)) {}

void PauliSum::add(std::vector<SiteOp> ops, double coefficient) {
  add(PauliString(std::move(ops), coefficient));
}

void PauliSum::add(const PauliString& term) {
  for (const auto& [site, op] : term.ops) {
    if (site < 0 || site >= n_sites_) {
      throw Error(ErrorCode::InvalidMatrix, "site " + std::to_string(site) +
                                                " outside lattice of " + std::to_string(n_sites_));
    }
  }
  terms_.push_back(term);
}

PauliSum PauliSum::canonical() const {
  std::map<std::vector<SiteOp>, double> merged;
  for (const auto& t : terms_) merged[t.ops] += t.coefficient;
  PauliSum out(n_sites_, label_);
  for (auto& [ops, c] : merged) {
    if (c != 0.0) out.terms_.emplace_back(ops, c);
  }
  return out;
}

PauliSum PauliSum::scaled(double factor) const {
  PauliSum out = *this;
  for (auto& t : out.terms_) t.coefficient *= factor;
  return out;
}

PauliSum PauliSum::remapped(const std::vector<int>& site_map, int n_sites) const {
  PauliSum out(n_sites, label_);
  for (const auto& t : terms_) {
    std::vector<SiteOp> ops;
    ops.reserve(t.ops.size());
    for (const auto& [site, op] : t.ops) ops.emplace_back(site_map.at(site), op);
    out.add(PauliString(std::move(ops), t.coefficient));
  }
  return out;
}

PauliSum& PauliSum::operator+=(const PauliSum& other) {
  if (other.n_sites_ > n_sites_) n_sites_ = other.n_sites_;
  terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
  return *this;
}

PauliSum PauliSum::times(const PauliSum& other) const {
  std::map<std::vector<SiteOp>, cplx> acc;
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) {
      auto [phase, ops] = multiply_ops(a.ops, b.ops);
      acc[std::move(ops)] += phase * a.coefficient * b.coefficient;
    }
  }
  double scale = 0.0;
  for (const auto& [ops, c] : acc) scale = std::max(scale, std::abs(c));
  PauliSum out(std::max(n_sites_, other.n_sites_), label_);
  for (auto& [ops, c] : acc) {
    if (std::abs(c.imag()) > 1e-12 * std::max(1.0, scale)) {
      throw Error(ErrorCode::InvalidMatrix, "operator product is not Hermitian");
    }
    if (std::abs(c.real()) > 1e-15 * std::max(1.0, scale)) out.terms_.emplace_back(ops, c.real());
  }
  return out;
}

double PauliSum::constant() const {
  double c = 0.0;
  for (const auto& t : terms_) {
    if (t.ops.empty()) c += t.coefficient;
  }
  return c;
}

double PauliSum::coefficient_l1() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coefficient);
  return s;
}

int PauliSum::max_span() const {
  int s = 0;
  for (const auto& t : terms_) s = std::max(s, t.span());
  return s;
}

bool PauliSum::operator==(const PauliSum& other) const {
  if (n_sites_ != other.n_sites_ || terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (terms_[i].ops != other.terms_[i].ops ||
        terms_[i].coefficient != other.terms_[i].coefficient) {
      return false;
    }
  }
  return true;
}

void write_text(std::ostream& os, const PauliSum& h) {
  os << "# n_sites=" << h.n_sites() << '\n';
  if (!h.label().empty()) os << "# label=" << h.label() << '\n';
  os << std::setprecision(17);
  for (const auto& t : h.terms()) {
    os << t.coefficient;
    for (const auto& [site, op] : t.ops) os << ' ' << site << ':' << to_char(op);
    os << '\n';
  }
}

std::string to_text(const PauliSum& h) {
  std::ostringstream os;
  write_text(os, h);
  return os.str();
}

PauliSum from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int n_sites = -1;
  std::string label;
  std::vector<PauliString> terms;
  int max_site = -1;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# n_sites=", 0) == 0) n_sites = std::stoi(line.substr(10));
      if (line.rfind("# label=", 0) == 0) label = line.substr(8);
      continue;
    }
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;
    double coeff = 0.0;
    try {
      coeff = std::stod(tok);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad coefficient");
    }
    std::vector<SiteOp> ops;
    while (ls >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon + 2 != tok.size()) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad token '" + tok + "'");
      }
      int site = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + colon, site);
      if (ec != std::errc() || ptr != tok.data() + colon || site < 0) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad site in '" + tok + "'");
      }
      ops.emplace_back(site, pauli_from_char(tok[colon + 1]));
      max_site = std::max(max_site, site);
    }
    terms.emplace_back(std::move(ops), coeff);
  }
  if (n_sites < 0) n_sites = max_site + 1;
  PauliSum out(n_sites, label);
  for (auto& t : terms) out.add(t);
  return out;
}

}  // namespace tfd::models
