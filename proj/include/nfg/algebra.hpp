#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace nfg {

using Complex = std::complex<double>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input: bad ids, mismatched alphabets, violated preconditions.
struct ValidationError : Error {
  using Error::Error;
};

// A numerical contract could not be met (zero mass, non-indicator tables, rejection budget).
struct NumericalError : Error {
  using Error::Error;
};

enum class AlphabetKind { plain, ordered, group };

inline const char* kind_name(AlphabetKind k) {
  switch (k) {
    case AlphabetKind::plain: return "plain";
    case AlphabetKind::ordered: return "ordered";
    case AlphabetKind::group: return "group";
  }
  return "?";
}

// Finite alphabet on the symbols 0..size-1.
//
// Ordered and group alphabets may be products: symbols are then mixed-radix
// encodings of component tuples, last component fastest. Ordered products carry
// the componentwise partial order; groups are products of cyclic groups.
class Alphabet {
 public:
  Alphabet() : Alphabet(AlphabetKind::plain, {1}) {}

  static Alphabet plain(std::size_t n) {
    if (n < 1) throw ValidationError("alphabet size must be at least 1");
    return Alphabet(AlphabetKind::plain, {n});
  }
  static Alphabet ordered(std::size_t n) { return ordered_product({n}); }
  static Alphabet ordered_product(std::vector<std::size_t> sizes) {
    if (sizes.empty()) throw ValidationError("ordered alphabet needs at least one component");
    for (auto s : sizes)
      if (s < 1) throw ValidationError("ordered component size must be at least 1");
    return Alphabet(AlphabetKind::ordered, std::move(sizes));
  }
  static Alphabet group(std::vector<std::size_t> moduli) {
    if (moduli.empty()) throw ValidationError("group needs at least one cyclic factor");
    for (auto m : moduli)
      if (m < 2) throw ValidationError("group moduli must be at least 2");
    return Alphabet(AlphabetKind::group, std::move(moduli));
  }
  static Alphabet cyclic(std::size_t m) { return group({m}); }

  AlphabetKind kind() const { return kind_; }
  std::size_t size() const { return size_; }
  const std::vector<std::size_t>& radices() const { return radices_; }
  bool is_group() const { return kind_ == AlphabetKind::group; }
  bool is_ordered() const { return kind_ == AlphabetKind::ordered; }

  // Axes are interchangeable when sizes agree.
  bool compatible(const Alphabet& o) const { return size_ == o.size_; }
  bool operator==(const Alphabet& o) const { return kind_ == o.kind_ && radices_ == o.radices_; }

  std::string describe() const {
    std::string s = kind_name(kind_);
    s += "(";
    for (std::size_t i = 0; i < radices_.size(); ++i) {
      if (i) s += "x";
      s += std::to_string(radices_[i]);
    }
    return s + ")";
  }

  void check(std::size_t x) const {
    if (x >= size_)
      throw ValidationError("symbol " + std::to_string(x) + " out of range for " + describe());
  }

  std::vector<std::size_t> decode(std::size_t x) const {
    check(x);
    std::vector<std::size_t> c(radices_.size());
    for (std::size_t i = radices_.size(); i-- > 0;) {
      c[i] = x % radices_[i];
      x /= radices_[i];
    }
    return c;
  }

  std::size_t encode(const std::vector<std::size_t>& c) const {
    if (c.size() != radices_.size()) throw ValidationError("component count mismatch for " + describe());
    std::size_t x = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] >= radices_[i]) throw ValidationError("component out of range for " + describe());
      x = x * radices_[i] + c[i];
    }
    return x;
  }

  // One-based rank of a scalar ordered symbol.
  std::size_t rank(std::size_t x) const {
    check(x);
    return x + 1;
  }

  std::size_t top() const { return size_ - 1; }

  bool leq(std::size_t a, std::size_t b) const {
    require(AlphabetKind::ordered, "leq");
    auto ca = decode(a), cb = decode(b);
    for (std::size_t i = 0; i < ca.size(); ++i)
      if (ca[i] > cb[i]) return false;
    return true;
  }

  std::size_t join(std::size_t a, std::size_t b) const {
    require(AlphabetKind::ordered, "max");
    auto ca = decode(a), cb = decode(b);
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] = std::max(ca[i], cb[i]);
    return encode(ca);
  }

  std::size_t add(std::size_t a, std::size_t b) const {
    require(AlphabetKind::group, "add");
    auto ca = decode(a), cb = decode(b);
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] = (ca[i] + cb[i]) % radices_[i];
    return encode(ca);
  }

  std::size_t neg(std::size_t a) const {
    require(AlphabetKind::group, "neg");
    auto ca = decode(a);
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] = (radices_[i] - ca[i]) % radices_[i];
    return encode(ca);
  }

  // Integer multiple a*x, componentwise.
  std::size_t scale(std::size_t a, std::size_t x) const {
    require(AlphabetKind::group, "scale");
    auto c = decode(x);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = (a % radices_[i]) * c[i] % radices_[i];
    return encode(c);
  }

  // kappa(x, xhat) = prod_i exp(2 pi i x_i xhat_i / m_i).
  Complex character(std::size_t x, std::size_t xhat) const {
    require(AlphabetKind::group, "character");
    auto cx = decode(x), ch = decode(xhat);
    Complex r{1.0, 0.0};
    for (std::size_t i = 0; i < cx.size(); ++i) {
      std::size_t k = cx[i] * ch[i] % radices_[i];
      r *= unit_root(static_cast<double>(k) / static_cast<double>(radices_[i]));
    }
    return r;
  }

  // kappa(x, -xhat) / |X|.
  Complex dual_character(std::size_t x, std::size_t xhat) const {
    return character(x, neg(xhat)) / static_cast<double>(size_);
  }

 private:
  Alphabet(AlphabetKind k, std::vector<std::size_t> r) : kind_(k), radices_(std::move(r)) {
    size_ = 1;
    for (auto v : radices_) size_ *= v;
  }

  void require(AlphabetKind k, const char* op) const {
    if (kind_ != k)
      throw ValidationError(std::string(op) + " requires a " + kind_name(k) + " alphabet, got " + describe());
  }

  // exp(2 pi i t) with exact values at quarter turns.
  static Complex unit_root(double turns) {
    turns -= std::floor(turns);
    if (turns == 0.0) return {1.0, 0.0};
    if (turns == 0.25) return {0.0, 1.0};
    if (turns == 0.5) return {-1.0, 0.0};
    if (turns == 0.75) return {0.0, -1.0};
    double a = 2.0 * std::numbers::pi * turns;
    return {std::cos(a), std::sin(a)};
  }

  AlphabetKind kind_;
  std::vector<std::size_t> radices_;
  std::size_t size_ = 1;
};

struct Axis {
  std::string label;
  Alphabet alphabet;
};

// Ordered list of labeled axes, row-major with the last axis fastest.
class ProductDomain {
 public:
  ProductDomain() = default;
  explicit ProductDomain(std::vector<Axis> axes) : axes_(std::move(axes)) {
    strides_.resize(axes_.size());
    size_ = 1;
    for (std::size_t i = axes_.size(); i-- > 0;) {
      strides_[i] = size_;
      size_ *= axes_[i].alphabet.size();
    }
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      if (!index_.emplace(axes_[i].label, i).second)
        throw ValidationError("duplicate axis label '" + axes_[i].label + "'");
    }
  }

  std::size_t size() const { return size_; }
  std::size_t rank() const { return axes_.size(); }
  const std::vector<Axis>& axes() const { return axes_; }
  const Axis& axis(std::size_t i) const { return axes_.at(i); }
  std::size_t stride(std::size_t i) const { return strides_.at(i); }
  std::size_t dim(std::size_t i) const { return axes_.at(i).alphabet.size(); }

  bool has(const std::string& label) const { return index_.count(label) != 0; }
  std::size_t index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw ValidationError("unknown axis label '" + label + "'");
    return it->second;
  }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (auto& a : axes_) out.push_back(a.label);
    return out;
  }

  std::size_t linear(const std::vector<std::size_t>& coords) const {
    if (coords.size() != axes_.size()) throw ValidationError("coordinate count mismatch");
    std::size_t k = 0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
      axes_[i].alphabet.check(coords[i]);
      k += coords[i] * strides_[i];
    }
    return k;
  }

  std::vector<std::size_t> coords(std::size_t k) const {
    if (k >= size_) throw ValidationError("linear index out of range");
    std::vector<std::size_t> c(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      c[i] = k / strides_[i];
      k %= strides_[i];
    }
    return c;
  }

 private:
  std::vector<Axis> axes_;
  std::vector<std::size_t> strides_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t size_ = 1;
};

inline ProductDomain make_product_domain(std::vector<Axis> axes) { return ProductDomain(std::move(axes)); }

}  // namespace nfg
