#pragma once

#include <optional>
#include <string>
#include <vector>

#include "factor.hpp"

namespace nfg {

enum class IndicatorKind { eq, sum, parity, max, eval, one };

inline const char* indicator_name(IndicatorKind k) {
  switch (k) {
    case IndicatorKind::eq: return "eq";
    case IndicatorKind::sum: return "sum";
    case IndicatorKind::parity: return "parity";
    case IndicatorKind::max: return "max";
    case IndicatorKind::eval: return "eval";
    case IndicatorKind::one: return "one";
  }
  return "?";
}

inline std::optional<IndicatorKind> parse_indicator(const std::string& s) {
  for (auto k : {IndicatorKind::eq, IndicatorKind::sum, IndicatorKind::parity, IndicatorKind::max, IndicatorKind::eval,
                 IndicatorKind::one})
    if (s == indicator_name(k)) return k;
  return std::nullopt;
}

inline std::vector<std::string> arg_labels(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i <= n; ++i) out.push_back("arg" + std::to_string(i));
  return out;
}

inline ProductDomain uniform_domain(const Alphabet& a, const std::vector<std::string>& labels) {
  std::vector<Axis> axes;
  for (auto& l : labels) axes.push_back({l, a});
  return ProductDomain(axes);
}

// 0/1 indicator table on axes arg1..argn. For sum and max, arg1 is the generated argument.
inline Factor make_indicator(IndicatorKind kind, const Alphabet& a, std::size_t degree, std::size_t value = 0) {
  switch (kind) {
    case IndicatorKind::eval:
    case IndicatorKind::one:
      if (degree != 1) throw ValidationError(std::string(indicator_name(kind)) + " indicator has degree 1");
      break;
    default:
      if (degree < 2) throw ValidationError(std::string(indicator_name(kind)) + " indicator needs degree >= 2");
  }
  if ((kind == IndicatorKind::sum || kind == IndicatorKind::parity) && !a.is_group())
    throw ValidationError(std::string(indicator_name(kind)) + " indicator needs a group alphabet");
  if (kind == IndicatorKind::max && !a.is_ordered()) throw ValidationError("max indicator needs an ordered alphabet");

  ProductDomain d = uniform_domain(a, arg_labels(degree));
  Factor f(d);
  if (kind == IndicatorKind::eval) {
    a.check(value);
    f[value] = 1.0;
    return f;
  }
  if (kind == IndicatorKind::one) return Factor::constant(d, 1.0);
  if (kind == IndicatorKind::eq) {
    std::size_t diag = 0;
    for (std::size_t i = 0; i < degree; ++i) diag += d.stride(i);
    for (std::size_t x = 0; x < a.size(); ++x) f[x * diag] = 1.0;
    return f;
  }
  for (std::size_t lin = 0; lin < d.size(); ++lin) {
    auto c = d.coords(lin);
    bool hit = false;
    if (kind == IndicatorKind::parity) {
      std::size_t s = 0;
      for (auto x : c) s = a.add(s, x);
      hit = s == 0;
    } else if (kind == IndicatorKind::sum) {
      std::size_t s = 0;
      for (std::size_t i = 1; i < c.size(); ++i) s = a.add(s, c[i]);
      hit = s == c[0];
    } else {
      std::size_t m = c[1];
      for (std::size_t i = 2; i < c.size(); ++i) m = a.join(m, c[i]);
      hit = m == c[0];
    }
    if (hit) f[lin] = 1.0;
  }
  return f;
}

// [arg1 = a * arg2] on a group.
inline Factor make_scaling(const Alphabet& g, std::size_t a) {
  if (!g.is_group()) throw ValidationError("scaling indicator needs a group alphabet");
  ProductDomain d = uniform_domain(g, arg_labels(2));
  Factor f(d);
  for (std::size_t x = 0; x < g.size(); ++x) f.at({g.scale(a, x), x}) = 1.0;
  return f;
}

// Cumulus A(x, x') = [x' <= x], componentwise on products.
inline Factor make_cumulus(const Alphabet& a) {
  if (!a.is_ordered()) throw ValidationError("cumulus needs an ordered alphabet");
  Factor f(uniform_domain(a, arg_labels(2)));
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = 0; y < a.size(); ++y)
      if (a.leq(y, x)) f.at({x, y}) = 1.0;
  return f;
}

// Difference D(x, x') = prod over components of (1 if equal, -1 if x = x'+1, else 0).
inline Factor make_difference(const Alphabet& a) {
  if (!a.is_ordered()) throw ValidationError("difference needs an ordered alphabet");
  Factor f(uniform_domain(a, arg_labels(2)));
  for (std::size_t x = 0; x < a.size(); ++x)
    for (std::size_t y = 0; y < a.size(); ++y) {
      auto cx = a.decode(x), cy = a.decode(y);
      double v = 1.0;
      for (std::size_t i = 0; i < cx.size() && v != 0.0; ++i) {
        if (cx[i] == cy[i]) continue;
        v = cx[i] == cy[i] + 1 ? -v : 0.0;
      }
      f.at({x, y}) = v;
    }
  return f;
}

// kappa(x, xhat) with x on arg1.
inline Factor make_fourier_kernel(const Alphabet& g) {
  if (!g.is_group()) throw ValidationError("fourier kernel needs a group alphabet");
  Factor f(uniform_domain(g, arg_labels(2)));
  for (std::size_t x = 0; x < g.size(); ++x)
    for (std::size_t y = 0; y < g.size(); ++y) f.at({x, y}) = g.character(x, y);
  return f;
}

// Inverse kernel stored as N(xhat, x) = kappa(x, -xhat) / |X|.
inline Factor make_inverse_fourier_kernel(const Alphabet& g) {
  if (!g.is_group()) throw ValidationError("fourier kernel needs a group alphabet");
  Factor f(uniform_domain(g, arg_labels(2)));
  for (std::size_t y = 0; y < g.size(); ++y)
    for (std::size_t x = 0; x < g.size(); ++x) f.at({y, x}) = g.dual_character(x, y);
  return f;
}

// Bivariate transformers g(x, y) and g_inv(y, x') whose contraction over y is [x = x'].
// Axis 0 of forward faces the near endpoint; axis 1 of inverse faces the far endpoint.
struct TransformerPair {
  Factor forward;
  Factor inverse;

  double residual() const {
    if (forward.rank() != 2 || inverse.rank() != 2) throw ValidationError("transformers must be bivariate");
    Factor g = with_labels(forward, {"x", "s"});
    Factor h = with_labels(inverse, {"s", "x'"});
    Factor id = with_labels(make_indicator(IndicatorKind::eq, g.domain().axis(0).alphabet, 2), {"x", "x'"});
    return relative_error(contract(g, h), id);
  }

  bool verify(double tol = default_tol) const { return residual() <= tol; }

  TransformerPair swapped() const { return {inverse, forward}; }
};

// (A, D); swap for D facing the near endpoint.
inline TransformerPair make_cumulus_pair(const Alphabet& a) { return {make_cumulus(a), make_difference(a)}; }

inline TransformerPair make_fourier_pair(const Alphabet& g) {
  return {make_fourier_kernel(g), make_inverse_fourier_kernel(g)};
}

struct DetectedIndicator {
  IndicatorKind kind;
  std::size_t distinguished = 0;  // axis index of arg1 for sum and max
};

// Recognize eq, sum, parity and max tables (exact 0/1 comparison within tol).
inline std::optional<DetectedIndicator> detect_indicator(const Factor& f, double tol = default_tol) {
  const auto& d = f.domain();
  if (d.rank() < 2) return std::nullopt;
  const Alphabet& a = d.axis(0).alphabet;
  for (auto& ax : d.axes())
    if (!(ax.alphabet == a)) return std::nullopt;
  auto matches = [&](const Factor& ref) {
    for (std::size_t k = 0; k < f.size(); ++k)
      if (std::abs(f[k] - ref[k]) > tol) return false;
    return true;
  };
  auto permuted = [&](const Factor& ref, std::size_t pos) {
    // ref has its distinguished argument at axis 0; move it to axis pos.
    auto labels = arg_labels(d.rank());
    std::vector<std::string> order;
    for (std::size_t i = 1; i < labels.size(); ++i) order.push_back(labels[i]);
    order.insert(order.begin() + static_cast<std::ptrdiff_t>(pos), labels[0]);
    return aligned_to(ref, order);
  };
  if (matches(make_indicator(IndicatorKind::eq, a, d.rank()))) return DetectedIndicator{IndicatorKind::eq, 0};
  if (a.is_group()) {
    if (matches(make_indicator(IndicatorKind::parity, a, d.rank()))) return DetectedIndicator{IndicatorKind::parity, 0};
    Factor s = make_indicator(IndicatorKind::sum, a, d.rank());
    for (std::size_t p = 0; p < d.rank(); ++p)
      if (matches(permuted(s, p))) return DetectedIndicator{IndicatorKind::sum, p};
  }
  if (a.is_ordered()) {
    Factor m = make_indicator(IndicatorKind::max, a, d.rank());
    for (std::size_t p = 0; p < d.rank(); ++p)
      if (matches(permuted(m, p))) return DetectedIndicator{IndicatorKind::max, p};
  }
  return std::nullopt;
}

// True iff f is the sum or max indicator generated on axis `pivot` (or eq/parity, any axis).
// Unlike detect_indicator this resolves coincidences such as sum = parity over Z_2.
inline bool is_indicator_on(const Factor& f, IndicatorKind kind, const std::string& pivot, double tol = default_tol) {
  const auto& d = f.domain();
  if (d.rank() == 0 || !d.has(pivot)) return false;
  const Alphabet& a = d.axis(0).alphabet;
  for (auto& ax : d.axes())
    if (!(ax.alphabet == a)) return false;
  if ((kind == IndicatorKind::sum || kind == IndicatorKind::parity) && !a.is_group()) return false;
  if (kind == IndicatorKind::max && !a.is_ordered()) return false;
  if ((kind == IndicatorKind::eval || kind == IndicatorKind::one) != (d.rank() == 1)) return false;
  std::vector<std::string> order{pivot};
  for (auto& l : d.labels())
    if (l != pivot) order.push_back(l);
  Factor ref = with_labels(make_indicator(kind, a, d.rank()), order);
  return max_abs_diff(f, ref) <= tol;
}

}  // namespace nfg
