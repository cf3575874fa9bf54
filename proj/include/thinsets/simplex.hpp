#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "thinsets/rng.hpp"

namespace thinsets {

enum class LpStatus { optimal, iteration_limit, infeasible };

/// Revised simplex for semi-infinite programs of the form
///
///     max c.x   subject to   a(col).x <= 1   for every col in a family
///
/// solved through the dual  min 1'lambda, sum lambda_col a(col) = c,
/// lambda >= 0, with columns generated on demand: price(y) returns the key
/// and value of the column maximizing y.a over the whole family, column(key)
/// materializes one normal vector. At optimality the simplex multipliers y
/// are the primal maximizer. Two phases with artificial columns; the right
/// side is deterministically jittered so degenerate vertices cannot cycle
/// (the caller certifies the returned point independently).
class ExchangeLp {
 public:
  struct Result {
    LpStatus status = LpStatus::optimal;
    double objective = 0.0;       // c.y for the returned y
    std::vector<double> y;        // primal point (simplex multipliers)
    std::vector<std::uint64_t> basis_keys;  // active columns
    int iterations = 0;
  };

  // price(y) returns candidate columns sorted by y.a descending; the first
  // entry must be the family-wide maximizer.
  using PriceFn =
      std::function<std::vector<std::pair<double, std::uint64_t>>(const std::vector<double>&)>;
  using ColumnFn = std::function<void(std::uint64_t, std::vector<double>&)>;
  // phase-2 progress hook: (y, price max, dual objective, iteration); the
  // dual objective is a monotone upper bound for the optimum, so callers can
  // stop on a certified gap. Return false to stop.
  using MonitorFn = std::function<bool(const std::vector<double>&, double, double, int)>;

  static Result solve(const std::vector<double>& c, const PriceFn& price,
                      const ColumnFn& column, int max_iters = 200'000,
                      double price_tol = 1e-7, const MonitorFn& monitor = {}) {
    const std::size_t n = c.size();
    Result res;

    // jittered rhs keeps vertices simple; the certificate absorbs the error
    std::vector<double> b(n);
    double cmax = 0.0;
    for (double v : c) cmax = std::max(cmax, std::abs(v));
    const double jit = (cmax > 0.0 ? cmax : 1.0) * 1e-6;
    for (std::size_t i = 0; i < n; ++i)
      b[i] = c[i] + jit * (to_uniform01(mix64(0x1ce9e66dULL + i)) - 0.5);

    // basis entries: artificial i has column sign_i * e_i
    struct Entry {
      bool artificial = true;
      std::size_t row = 0;       // artificial index
      double sign = 1.0;         // artificial sign
      std::uint64_t key = 0;     // real column key
    };
    std::vector<Entry> basis(n);
    std::vector<double> binv(n * n, 0.0);  // B^{-1}, row-major
    std::vector<double> xb(n);
    for (std::size_t i = 0; i < n; ++i) {
      basis[i] = Entry{true, i, b[i] < 0.0 ? -1.0 : 1.0, 0};
      binv[i * n + i] = basis[i].sign;
      xb[i] = std::abs(b[i]);
    }

    std::vector<double> y(n), acol(n), w(n);
    const auto compute_y = [&](bool phase1) {
      // y = costs_B^T B^{-1}; phase-1 costs: artificial 1, real 0;
      // phase-2 costs: every real column 1, artificial irrelevant (basic at 0)
      std::fill(y.begin(), y.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double cost = phase1 ? (basis[i].artificial ? 1.0 : 0.0)
                                   : (basis[i].artificial ? 0.0 : 1.0);
        if (cost == 0.0) continue;
        const double* row = &binv[i * n];
        for (std::size_t j = 0; j < n; ++j) y[j] += cost * row[j];
      }
    };

    const auto materialize = [&](const Entry& e, std::vector<double>& out) {
      std::fill(out.begin(), out.end(), 0.0);
      if (e.artificial)
        out[e.row] = e.sign;
      else
        column(e.key, out);
    };

    const auto refactor = [&]() -> bool {
      // rebuild B and invert by Gauss-Jordan with partial pivoting; a
      // numerically singular basis stops the run (the caller certifies the
      // best iterate independently)
      std::vector<double> m(n * 2 * n, 0.0);
      std::vector<double> col(n);
      for (std::size_t j = 0; j < n; ++j) {
        materialize(basis[j], col);
        for (std::size_t i = 0; i < n; ++i) m[i * 2 * n + j] = col[i];
      }
      for (std::size_t i = 0; i < n; ++i) m[i * 2 * n + n + i] = 1.0;
      for (std::size_t p = 0; p < n; ++p) {
        std::size_t piv = p;
        for (std::size_t i = p + 1; i < n; ++i)
          if (std::abs(m[i * 2 * n + p]) > std::abs(m[piv * 2 * n + p])) piv = i;
        if (std::abs(m[piv * 2 * n + p]) < 1e-13) return false;
        if (piv != p)
          for (std::size_t j = 0; j < 2 * n; ++j) std::swap(m[p * 2 * n + j], m[piv * 2 * n + j]);
        const double inv = 1.0 / m[p * 2 * n + p];
        for (std::size_t j = 0; j < 2 * n; ++j) m[p * 2 * n + j] *= inv;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p) continue;
          const double f = m[i * 2 * n + p];
          if (f == 0.0) continue;
          for (std::size_t j = 0; j < 2 * n; ++j) m[i * 2 * n + j] -= f * m[p * 2 * n + j];
        }
      }
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) binv[i * n + j] = m[i * 2 * n + n + j];
      // x_B = B^{-1} b
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += binv[i * n + j] * b[j];
        xb[i] = s;
      }
      return true;
    };

    // multiple pricing: candidates from the last scan are re-priced against
    // the current y by plain dot products; a fresh scan runs only when the
    // cache offers nothing attractive, and optimality is only ever declared
    // on a fresh scan.
    struct Cached {
      std::uint64_t key;
      std::vector<double> col;
    };
    std::vector<Cached> cache;

    bool phase1 = true;
    int since_refactor = 0;
    for (res.iterations = 0; res.iterations < max_iters; ++res.iterations) {
      compute_y(phase1);
      const double threshold = phase1 ? price_tol * (1.0 + cmax) : 1.0 + price_tol;
      if (phase1) {
        double artificial_mass = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          if (basis[i].artificial) artificial_mass += std::abs(xb[i]);
        if (artificial_mass <= 1e-9 * (1.0 + cmax)) {
          phase1 = false;
          cache.clear();
          continue;
        }
      }

      std::uint64_t key = 0;
      bool have_entry = false;
      {
        double best_cached = threshold;
        std::size_t best_idx = cache.size();
        for (std::size_t ci = 0; ci < cache.size(); ++ci) {
          double v = 0.0;
          for (std::size_t i = 0; i < n; ++i) v += y[i] * cache[ci].col[i];
          if (v > best_cached) {
            best_cached = v;
            best_idx = ci;
          }
        }
        if (best_idx < cache.size()) {
          key = cache[best_idx].key;
          acol = cache[best_idx].col;
          have_entry = true;
        }
      }
      if (!have_entry) {
        const auto batch = price(y);
        const double val = batch.empty() ? 0.0 : batch.front().first;
        if (!phase1 && monitor) {
          double dual_obj = 0.0;
          for (std::size_t i = 0; i < n; ++i)
            if (!basis[i].artificial) dual_obj += xb[i];
          if (!monitor(y, val, dual_obj, res.iterations)) {
            res.status = LpStatus::iteration_limit;
            break;
          }
        }
        if (val <= threshold) {
          if (phase1) {
            res.status = LpStatus::infeasible;  // c not in the column cone
            return res;
          }
          res.status = LpStatus::optimal;
          break;
        }
        cache.clear();
        for (const auto& [v, k] : batch) {
          cache.push_back({k, std::vector<double>(n)});
          column(k, cache.back().col);
        }
        key = batch.front().second;
        acol = cache.front().col;
      }
      // w = B^{-1} a
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        const double* row = &binv[i * n];
        for (std::size_t j = 0; j < n; ++j) s += row[j] * acol[j];
        w[i] = s;
      }
      // ratio test; prefer kicking artificials out on ties
      std::size_t leave = n;
      double best_t = 0.0;
      double wmax = 0.0;
      for (std::size_t i = 0; i < n; ++i) wmax = std::max(wmax, std::abs(w[i]));
      for (std::size_t i = 0; i < n; ++i) {
        if (w[i] <= 1e-11) continue;
        const double t = xb[i] / w[i];
        if (leave == n || t < best_t - 1e-12 ||
            (t < best_t + 1e-12 && basis[i].artificial && !basis[leave].artificial)) {
          best_t = t;
          leave = i;
        }
      }
      if (leave == n || std::abs(w[leave]) < 1e-9 * std::max(1.0, wmax)) {
        // unusable or numerically degenerate entering column: drop it from
        // the cache and rescan rather than pivot on noise
        bool dropped = false;
        for (std::size_t ci = 0; ci < cache.size(); ++ci)
          if (cache[ci].key == key) {
            cache.erase(cache.begin() + static_cast<std::ptrdiff_t>(ci));
            dropped = true;
            break;
          }
        if (!dropped && leave == n) {
          res.status = LpStatus::infeasible;  // dual unbounded: numerical guard
          return res;
        }
        continue;
      }
      // pivot: basis[leave] <- real column key
      basis[leave] = Entry{false, 0, 0.0, key};
      const double piv = w[leave];
      double* prow = &binv[leave * n];
      for (std::size_t j = 0; j < n; ++j) prow[j] /= piv;
      const double tvalue = xb[leave] / piv;
      for (std::size_t i = 0; i < n; ++i) {
        if (i == leave) continue;
        const double f = w[i];
        if (f == 0.0) continue;
        double* row = &binv[i * n];
        for (std::size_t j = 0; j < n; ++j) row[j] -= f * prow[j];
        xb[i] -= f * tvalue;
        if (xb[i] < 0.0 && xb[i] > -1e-9) xb[i] = 0.0;
      }
      xb[leave] = tvalue;
      if (++since_refactor >= 256) {
        if (!refactor()) {
          res.status = LpStatus::iteration_limit;
          break;
        }
        since_refactor = 0;
      }
      res.status = LpStatus::iteration_limit;
    }

    compute_y(false);
    res.y = y;
    res.objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) res.objective += c[i] * y[i];
    for (const auto& e : basis)
      if (!e.artificial) res.basis_keys.push_back(e.key);
    return res;
  }
};

}  // namespace thinsets
