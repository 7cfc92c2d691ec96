#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "algebra.hpp"

namespace nfg {

inline constexpr double default_tol = 1e-9;

// Dense complex table over a product domain.
class Factor {
 public:
  Factor() : values_(1, Complex{1.0, 0.0}) {}
  explicit Factor(ProductDomain d) : domain_(std::move(d)), values_(domain_.size()) {}
  Factor(ProductDomain d, std::vector<Complex> v) : domain_(std::move(d)), values_(std::move(v)) {
    if (values_.size() != domain_.size())
      throw ValidationError("factor has " + std::to_string(values_.size()) + " values for a domain of size " +
                            std::to_string(domain_.size()));
  }

  static Factor scalar(Complex c) { return Factor(ProductDomain{}, {c}); }
  static Factor constant(ProductDomain d, Complex c) {
    Factor f(std::move(d));
    std::fill(f.values_.begin(), f.values_.end(), c);
    return f;
  }
  static Factor real(ProductDomain d, const std::vector<double>& v) {
    std::vector<Complex> c(v.begin(), v.end());
    return Factor(std::move(d), std::move(c));
  }

  const ProductDomain& domain() const { return domain_; }
  const std::vector<Complex>& values() const { return values_; }
  std::vector<Complex>& values() { return values_; }
  std::size_t size() const { return values_.size(); }
  std::size_t rank() const { return domain_.rank(); }
  std::vector<std::string> labels() const { return domain_.labels(); }
  bool has(const std::string& label) const { return domain_.has(label); }

  Complex& operator[](std::size_t k) { return values_[k]; }
  const Complex& operator[](std::size_t k) const { return values_[k]; }
  Complex at(const std::vector<std::size_t>& c) const { return values_[domain_.linear(c)]; }
  Complex& at(const std::vector<std::size_t>& c) { return values_[domain_.linear(c)]; }

  // Scalar value of a rank-0 factor.
  Complex scalar_value() const {
    if (rank() != 0) throw ValidationError("factor is not a scalar");
    return values_[0];
  }

  double max_abs() const {
    double m = 0.0;
    for (auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  Complex total() const {
    Complex s{};
    for (auto& v : values_) s += v;
    return s;
  }

  bool is_real(double tol = default_tol) const {
    double m = max_abs();
    for (auto& v : values_)
      if (std::abs(v.imag()) > tol * std::max(m, 1e-300)) return false;
    return true;
  }

 private:
  ProductDomain domain_;
  std::vector<Complex> values_;
};

namespace detail {

inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

}  // namespace detail

// Sum over the labels in `summed` of the pointwise product of the inputs.
// Surviving axes appear in first-appearance order. ops counts visited joint assignments.
inline Factor combine(const std::vector<const Factor*>& fs, const std::set<std::string>& summed,
                      std::uint64_t* ops = nullptr) {
  std::vector<Axis> outs, sums;
  std::map<std::string, Alphabet> seen;
  for (auto* f : fs) {
    for (auto& ax : f->domain().axes()) {
      auto it = seen.find(ax.label);
      if (it != seen.end()) {
        if (!it->second.compatible(ax.alphabet))
          throw ValidationError("alphabet mismatch on shared label '" + ax.label + "'");
        continue;
      }
      seen.emplace(ax.label, ax.alphabet);
      (summed.count(ax.label) ? sums : outs).push_back(ax);
    }
  }
  for (auto& s : summed)
    if (!seen.count(s)) throw ValidationError("summed label '" + s + "' not present");

  ProductDomain out_dom(outs);
  std::size_t sum_size = 1;
  for (auto& a : sums) sum_size *= a.alphabet.size();

  std::vector<Axis> all = outs;
  all.insert(all.end(), sums.begin(), sums.end());
  const std::size_t nd = all.size(), nf = fs.size();
  std::vector<std::size_t> dims(nd);
  for (std::size_t k = 0; k < nd; ++k) dims[k] = all[k].alphabet.size();
  std::vector<std::vector<std::size_t>> st(nf, std::vector<std::size_t>(nd, 0));
  for (std::size_t f = 0; f < nf; ++f)
    for (std::size_t k = 0; k < nd; ++k)
      if (fs[f]->domain().has(all[k].label)) st[f][k] = fs[f]->domain().stride(fs[f]->domain().index_of(all[k].label));

  const std::size_t total = out_dom.size() * sum_size;
  Factor out(out_dom);
  std::vector<std::size_t> digit(nd, 0), off(nf, 0);
  std::vector<const Complex*> data(nf);
  for (std::size_t f = 0; f < nf; ++f) data[f] = fs[f]->values().data();
  for (std::size_t lin = 0; lin < total; ++lin) {
    Complex p{1.0, 0.0};
    for (std::size_t f = 0; f < nf; ++f) p = detail::mul(p, data[f][off[f]]);
    out[lin / sum_size] += p;
    for (std::size_t k = nd; k-- > 0;) {
      ++digit[k];
      for (std::size_t f = 0; f < nf; ++f) off[f] += st[f][k];
      if (digit[k] < dims[k]) break;
      for (std::size_t f = 0; f < nf; ++f) off[f] -= st[f][k] * dims[k];
      digit[k] = 0;
    }
  }
  if (ops) *ops += total;
  return out;
}

// Sum-of-products: labels shared by two inputs are summed, labels used once survive.
inline Factor contract(const std::vector<const Factor*>& fs, std::uint64_t* ops = nullptr) {
  std::map<std::string, int> count;
  for (auto* f : fs)
    for (auto& ax : f->domain().axes()) ++count[ax.label];
  std::set<std::string> summed;
  for (auto& [label, c] : count) {
    if (c >= 3) throw ValidationError("label '" + label + "' appears in " + std::to_string(c) + " factors");
    if (c == 2) summed.insert(label);
  }
  return combine(fs, summed, ops);
}

inline Factor contract(const std::vector<Factor>& fs, std::uint64_t* ops = nullptr) {
  std::vector<const Factor*> p;
  for (auto& f : fs) p.push_back(&f);
  return contract(p, ops);
}

inline Factor contract(const Factor& a, const Factor& b, std::uint64_t* ops = nullptr) {
  return contract(std::vector<const Factor*>{&a, &b}, ops);
}

// Pointwise product; shared labels are identified, nothing is summed.
inline Factor multiply(const Factor& a, const Factor& b, std::uint64_t* ops = nullptr) {
  return combine({&a, &b}, {}, ops);
}

inline Factor scaled(Factor f, Complex c) {
  for (auto& v : f.values()) v *= c;
  return f;
}

inline Factor relabel(const Factor& f, const std::map<std::string, std::string>& names) {
  std::vector<Axis> axes = f.domain().axes();
  for (auto& a : axes) {
    auto it = names.find(a.label);
    if (it != names.end()) a.label = it->second;
  }
  return Factor(ProductDomain(axes), f.values());
}

inline Factor relabel(const Factor& f, const std::string& from, const std::string& to) {
  return relabel(f, std::map<std::string, std::string>{{from, to}});
}

// Positional relabel: axis i gets names[i].
inline Factor with_labels(const Factor& f, const std::vector<std::string>& names) {
  if (names.size() != f.rank()) throw ValidationError("label count mismatch");
  std::vector<Axis> axes = f.domain().axes();
  for (std::size_t i = 0; i < axes.size(); ++i) axes[i].label = names[i];
  return Factor(ProductDomain(axes), f.values());
}

// Same function with axes permuted into `order`.
inline Factor aligned_to(const Factor& f, const std::vector<std::string>& order) {
  if (order.size() != f.rank()) throw ValidationError("alignment needs every axis exactly once");
  std::vector<Axis> axes;
  std::vector<std::size_t> src_stride;
  for (auto& l : order) {
    auto i = f.domain().index_of(l);
    axes.push_back(f.domain().axis(i));
    src_stride.push_back(f.domain().stride(i));
  }
  ProductDomain d(axes);
  Factor out(d);
  std::vector<std::size_t> digit(axes.size(), 0);
  std::size_t src = 0;
  for (std::size_t lin = 0; lin < d.size(); ++lin) {
    out[lin] = f[src];
    for (std::size_t k = axes.size(); k-- > 0;) {
      ++digit[k];
      src += src_stride[k];
      if (digit[k] < d.dim(k)) break;
      src -= src_stride[k] * d.dim(k);
      digit[k] = 0;
    }
  }
  return out;
}

inline Factor marginalize_sum(const Factor& f, const std::string& label) {
  if (!f.has(label)) throw ValidationError("unknown axis label '" + label + "'");
  return combine({&f}, {label});
}

// Slice at label = v and drop the axis.
inline Factor evaluate(const Factor& f, const std::string& label, std::size_t v) {
  const auto& d = f.domain();
  auto i = d.index_of(label);
  d.axis(i).alphabet.check(v);
  std::vector<Axis> axes;
  for (std::size_t k = 0; k < d.rank(); ++k)
    if (k != i) axes.push_back(d.axis(k));
  ProductDomain od(axes);
  Factor out(od);
  const std::size_t inner = d.stride(i), dim = d.dim(i);
  const std::size_t outer = d.size() / (inner * dim);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t in = 0; in < inner; ++in) out[o * inner + in] = f[o * inner * dim + v * inner + in];
  return out;
}

enum class MarginalMode { sum, evaluate };

inline Factor marginalize(const Factor& f, const std::string& label, MarginalMode mode, std::size_t v = 0) {
  return mode == MarginalMode::sum ? marginalize_sum(f, label) : evaluate(f, label, v);
}

// Sum of the diagonal a = b, removing both axes.
inline Factor trace(const Factor& f, const std::string& a, const std::string& b) {
  const auto& d = f.domain();
  auto ia = d.index_of(a), ib = d.index_of(b);
  if (!d.axis(ia).alphabet.compatible(d.axis(ib).alphabet)) throw ValidationError("trace over mismatched alphabets");
  std::vector<Axis> axes;
  for (std::size_t k = 0; k < d.rank(); ++k)
    if (k != ia && k != ib) axes.push_back(d.axis(k));
  ProductDomain od(axes);
  Factor out(od);
  for (std::size_t lin = 0; lin < d.size(); ++lin) {
    auto c = d.coords(lin);
    if (c[ia] != c[ib]) continue;
    std::vector<std::size_t> oc;
    for (std::size_t k = 0; k < c.size(); ++k)
      if (k != ia && k != ib) oc.push_back(c[k]);
    out[od.linear(oc)] += f[lin];
  }
  return out;
}

// Largest entrywise difference after aligning b to a's axis order.
inline double max_abs_diff(const Factor& a, const Factor& b) {
  auto la = a.labels(), lb = b.labels();
  if (std::set<std::string>(la.begin(), la.end()) != std::set<std::string>(lb.begin(), lb.end()) ||
      la.size() != lb.size())
    throw ValidationError("factors have different axis labels");
  for (auto& l : la)
    if (!a.domain().axis(a.domain().index_of(l)).alphabet.compatible(b.domain().axis(b.domain().index_of(l)).alphabet))
      throw ValidationError("factors disagree on the alphabet of '" + l + "'");
  Factor bb = aligned_to(b, la);
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - bb[k]));
  return m;
}

// Relative comparison against the larger max magnitude.
inline bool approx_equal(const Factor& a, const Factor& b, double tol = default_tol) {
  double scale = std::max(a.max_abs(), b.max_abs());
  return max_abs_diff(a, b) <= tol * scale;
}

inline double relative_error(const Factor& a, const Factor& b) {
  double scale = std::max(a.max_abs(), b.max_abs());
  double d = max_abs_diff(a, b);
  return scale == 0.0 ? d : d / scale;
}

// Outer-product test with the anchor rule: returns univariate profiles u_k with
// f = prod_k u_k, where u_0 carries f(anchor) and the others are f(anchor with
// one coordinate varied) / f(anchor). All-zero input yields u_0 = 0, others 1.
inline std::optional<std::vector<Factor>> rank_one_profiles(const Factor& f, double tol = default_tol,
                                                            bool verify = true) {
  const auto& d = f.domain();
  std::vector<Factor> prof;
  if (d.rank() == 0) {
    prof.push_back(f);
    return prof;
  }
  std::size_t anchor = 0;
  for (std::size_t k = 1; k < f.size(); ++k)
    if (std::abs(f[k]) > std::abs(f[anchor])) anchor = k;
  const Complex a = f[anchor];
  auto ac = d.coords(anchor);
  for (std::size_t i = 0; i < d.rank(); ++i) {
    Factor u(ProductDomain({d.axis(i)}));
    for (std::size_t x = 0; x < d.dim(i); ++x) {
      if (a == Complex{}) {
        u[x] = i == 0 ? Complex{} : Complex{1.0, 0.0};
        continue;
      }
      auto c = ac;
      c[i] = x;
      u[x] = i == 0 ? f.at(c) : f.at(c) / a;
    }
    prof.push_back(std::move(u));
  }
  if (!verify) return prof;
  const double scale = std::abs(a);
  for (std::size_t lin = 0; lin < f.size(); ++lin) {
    auto c = d.coords(lin);
    Complex p{1.0, 0.0};
    for (std::size_t i = 0; i < c.size(); ++i) p *= prof[i][c[i]];
    if (std::abs(p - f[lin]) > tol * std::max(scale, 1e-300) && !(scale == 0.0 && f[lin] == Complex{})) return std::nullopt;
  }
  return prof;
}

// Decompose f as a product of bivariates f_k(pivot, x_k), one per non-pivot axis.
// Each slice f(pivot = s) must be an outer product; the first bivariate absorbs the
// slice scale and the others peak at magnitude 1.
inline std::optional<std::vector<Factor>> split_decompose(const Factor& f, const std::string& pivot,
                                                          double tol = default_tol) {
  const auto& d = f.domain();
  if (d.rank() < 2) return std::nullopt;
  auto pi = d.index_of(pivot);
  std::vector<std::string> rest;
  for (std::size_t k = 0; k < d.rank(); ++k)
    if (k != pi) rest.push_back(d.axis(k).label);
  if (rest.size() == 1) return std::vector<Factor>{aligned_to(f, {pivot, rest[0]})};

  const Axis pax = d.axis(pi);
  std::vector<Factor> parts;
  for (auto& r : rest) parts.emplace_back(ProductDomain({pax, d.axis(d.index_of(r))}));
  const double fscale = f.max_abs();
  for (std::size_t s = 0; s < pax.alphabet.size(); ++s) {
    Factor slice = aligned_to(evaluate(f, pivot, s), rest);
    // Judged once against the whole table below, so tiny slices are not held to their own scale.
    auto prof = rank_one_profiles(slice, tol, false);
    for (std::size_t k = 0; k < rest.size(); ++k)
      for (std::size_t x = 0; x < parts[k].domain().dim(1); ++x) parts[k].at({s, x}) = (*prof)[k][x];
  }
  // Reconstruction check against the whole table.
  std::vector<const Factor*> ps;
  for (auto& p : parts) ps.push_back(&p);
  Factor rec = combine(ps, {});
  if (max_abs_diff(f, rec) > tol * std::max(fscale, 1e-300)) return std::nullopt;
  return parts;
}

// Constant c with sum over pivot of f equal to c for every assignment of the rest.
inline std::optional<Complex> conditional_constant(const Factor& f, const std::string& pivot,
                                                   double tol = default_tol) {
  Factor m = marginalize_sum(f, pivot);
  const Complex c = m[0];
  const double scale = std::max(m.max_abs(), f.max_abs());
  for (auto& v : m.values())
    if (std::abs(v - c) > tol * std::max(scale, 1e-300)) return std::nullopt;
  return c;
}

}  // namespace nfg
