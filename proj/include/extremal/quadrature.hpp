#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

namespace extremal {

struct QuadratureResult {
  double value = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
};

namespace detail {

template <class F>
struct SimpsonRecursion {
  F& f;
  int max_depth;
  QuadratureResult result{};

  double step(double a, double b, double fa, double fm, double fb, double whole, double tol,
              int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    result.evaluations += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth >= max_depth) {
      result.converged = false;
      return left + right + delta / 15.0;
    }
    return step(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
           step(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] with Richardson correction.
///
/// The interval is first cut into `panels` equal pieces; the absolute target is
/// rel_tol times the magnitude of the coarse estimate. `converged` is false if
/// any piece hit max_depth before meeting its share of the tolerance.
template <class F>
QuadratureResult adaptive_simpson(F&& f, double a, double b, double rel_tol, int panels = 16,
                                  int max_depth = 50) {
  QuadratureResult out;
  if (!(b > a)) return out;
  panels = std::max(panels, 1);

  const double h = (b - a) / panels;
  std::vector<double> nodes(2 * static_cast<std::size_t>(panels) + 1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    nodes[i] = f(a + 0.5 * h * static_cast<double>(i));
  }
  out.evaluations = nodes.size();

  double coarse = 0.0;
  double coarse_abs = 0.0;
  std::vector<double> pieces(static_cast<std::size_t>(panels));
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    pieces[p] = h / 6.0 * (nodes[2 * p] + 4.0 * nodes[2 * p + 1] + nodes[2 * p + 2]);
    coarse += pieces[p];
    coarse_abs += std::abs(pieces[p]);
  }

  detail::SimpsonRecursion<std::remove_reference_t<F>> rec{f, max_depth};
  const double tol = rel_tol * std::max(std::abs(coarse), 1e-3 * coarse_abs) / panels;
  double total = 0.0;
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    const double left = a + h * static_cast<double>(p);
    const double right = p + 1 == pieces.size() ? b : left + h;
    total += rec.step(left, right, nodes[2 * p], nodes[2 * p + 1], nodes[2 * p + 2], pieces[p],
                      tol, 0);
  }
  out.value = total;
  out.converged = rec.result.converged;
  out.evaluations += rec.result.evaluations;
  return out;
}

}  // namespace extremal
