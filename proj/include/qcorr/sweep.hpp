#pragma once

// Field-sweep driver behind the CLI: computes the requested correlation
// measures over a (B, L) grid, handles side limits at exact ground-state
// parity crossings, locates measurement transitions, and renders rows as
// deterministic CSV (12 significant digits) or JSON.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "qcorr/chain.hpp"
#include "qcorr/measures.hpp"
#include "qcorr/version.hpp"

namespace qcorr::sweep {

enum class OutputFormat { Csv, Json };
enum class SideLimitPolicy { Both, Left, Right };

// One requested measure column. Iq/IRq carry the entropic index q.
struct MeasureRequest {
  enum class Kind { C, E, D, I1, I2, Iq, IRq, GammaD, GammaI1, GammaI2 };
  Kind kind = Kind::C;
  double q = 0.0;

  std::string label() const {
    switch (kind) {
      case Kind::C: return "C";
      case Kind::E: return "E";
      case Kind::D: return "D";
      case Kind::I1: return "I1";
      case Kind::I2: return "I2";
      case Kind::Iq: return "Iq(" + trimmed_q() + ")";
      case Kind::IRq: return "IRq(" + trimmed_q() + ")";
      case Kind::GammaD: return "gamma_D";
      case Kind::GammaI1: return "gamma_I1";
      case Kind::GammaI2: return "gamma_I2";
    }
    return "?";
  }

  std::string trimmed_q() const {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", q);
    return buf;
  }

  static MeasureRequest parse(const std::string& token) {
    auto fixed = [](Kind k) { return MeasureRequest{k, 0.0}; };
    if (token == "C") return fixed(Kind::C);
    if (token == "E") return fixed(Kind::E);
    if (token == "D") return fixed(Kind::D);
    if (token == "I1") return fixed(Kind::I1);
    if (token == "I2") return fixed(Kind::I2);
    if (token == "gamma_D") return fixed(Kind::GammaD);
    if (token == "gamma_I1") return fixed(Kind::GammaI1);
    if (token == "gamma_I2") return fixed(Kind::GammaI2);
    for (auto [prefix, kind] : {std::pair{std::string("Iq("), Kind::Iq},
                                std::pair{std::string("IRq("), Kind::IRq}}) {
      if (token.rfind(prefix, 0) == 0 && token.back() == ')') {
        const std::string num =
            token.substr(prefix.size(), token.size() - prefix.size() - 1);
        char* end = nullptr;
        const double q = std::strtod(num.c_str(), &end);
        if (end == num.c_str() || *end != '\0' || !(q > 0.0))
          throw std::invalid_argument("measures: bad q in '" + token + "'");
        return MeasureRequest{kind, q};
      }
    }
    throw std::invalid_argument("measures: unknown measure '" + token + "'");
  }
};

struct SweepConfig {
  int n = 40;
  double chi = 0.5;
  double jx = 1.0;
  double b_min = 0.0;
  double b_max = 1.5;
  int b_steps = 300;
  std::vector<int> separations;  // empty means all 1..n/2
  std::vector<MeasureRequest> measures;
  OutputFormat format = OutputFormat::Csv;
  SideLimitPolicy side_limits = SideLimitPolicy::Both;
  bool transition_scan = false;

  double jy() const { return chi * jx; }

  void validate() const {
    if (n < 4 || n % 2 != 0)
      throw std::invalid_argument("config field n: must be even and >= 4");
    if (!(jx > 0.0))
      throw std::invalid_argument("config field jx: must be positive");
    if (std::abs(chi) > 1.0)
      throw std::invalid_argument("config field chi: must be in [-1, 1]");
    if (b_min > b_max)
      throw std::invalid_argument("config field b_min: exceeds b_max");
    if (b_steps < 1)
      throw std::invalid_argument("config field b_steps: must be >= 1");
    for (int L : separations)
      if (L < 1 || L > n / 2)
        throw std::invalid_argument(
            "config field separations: L outside [1, n/2]");
    for (const auto& m : measures)
      if ((m.kind == MeasureRequest::Kind::Iq ||
           m.kind == MeasureRequest::Kind::IRq) &&
          !(m.q > 0.0))
        throw std::invalid_argument("config field measures: q must be > 0");
  }

  std::vector<int> resolved_separations() const {
    if (!separations.empty()) return separations;
    std::vector<int> all;
    for (int L = 1; L <= n / 2; ++L) all.push_back(L);
    return all;
  }

  std::vector<double> b_grid() const {
    std::vector<double> g(b_steps);
    for (int i = 0; i < b_steps; ++i)
      g[i] = b_steps == 1
                 ? b_min
                 : b_min + (b_max - b_min) * i / double(b_steps - 1);
    return g;
  }
};

// Canonical column order: C, E, D, I1, I2, Iq(q) ascending, IRq(q)
// ascending, gamma_D, gamma_I1, gamma_I2.
inline std::vector<MeasureRequest> canonical_measures(
    std::vector<MeasureRequest> ms) {
  auto rank = [](const MeasureRequest& m) {
    using K = MeasureRequest::Kind;
    switch (m.kind) {
      case K::C: return 0;
      case K::E: return 1;
      case K::D: return 2;
      case K::I1: return 3;
      case K::I2: return 4;
      case K::Iq: return 5;
      case K::IRq: return 6;
      case K::GammaD: return 7;
      case K::GammaI1: return 8;
      case K::GammaI2: return 9;
    }
    return 10;
  };
  std::stable_sort(ms.begin(), ms.end(),
                   [&](const auto& a, const auto& b) {
                     if (rank(a) != rank(b)) return rank(a) < rank(b);
                     return a.q < b.q;
                   });
  ms.erase(std::unique(ms.begin(), ms.end(),
                       [&](const auto& a, const auto& b) {
                         return rank(a) == rank(b) && a.q == b.q;
                       }),
           ms.end());
  return ms;
}

struct SweepRow {
  double b = 0.0;
  int L = 0;
  int parity = +1;
  std::vector<std::optional<double>> values;  // aligned with columns
  std::vector<std::string> flags;
  std::string error;
};

struct SweepResult {
  std::vector<MeasureRequest> columns;
  std::vector<SweepRow> rows;
  SweepConfig config;
  bool b_negated = false;
  bool any_error = false;
};

namespace detail {

inline int worker_count() {
  if (const char* env = std::getenv("QCORR_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return std::min(v, 256);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? int(hc) : 4;
}

template <typename Fn>
void parallel_for(int count, Fn&& fn) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Measures of one pair state, computed once per row and shared between
// value and angle columns.
struct RowMeasures {
  const XState& x;
  std::optional<ConcurrenceResult> conc;
  std::optional<MeasureOutcome> discord, i1, i2;
  std::map<double, MeasureOutcome> iq, irq;

  explicit RowMeasures(const XState& state) : x(state) {}

  const ConcurrenceResult& get_conc() {
    if (!conc) conc = concurrence(x);
    return *conc;
  }
  const MeasureOutcome& get_discord() {
    if (!discord) discord = quantum_discord(x);
    return *discord;
  }
  const MeasureOutcome& get_i1() {
    if (!i1) i1 = info_deficit(x, EntropyFunctional::von_neumann());
    return *i1;
  }
  const MeasureOutcome& get_i2() {
    if (!i2) i2 = geometric_deficit_I2(x);
    return *i2;
  }
  const MeasureOutcome& get_iq(double q) {
    auto it = iq.find(q);
    if (it == iq.end())
      it = iq.emplace(q, info_deficit(x, EntropyFunctional::tsallis(q))).first;
    return it->second;
  }
  const MeasureOutcome& get_irq(double q) {
    auto it = irq.find(q);
    if (it == irq.end())
      it = irq.emplace(q, info_deficit(x, EntropyFunctional::renyi(q))).first;
    return it->second;
  }

  double value_for(const MeasureRequest& m) {
    using K = MeasureRequest::Kind;
    switch (m.kind) {
      case K::C: return get_conc().value;
      case K::E: return entanglement_of_formation(get_conc().value);
      case K::D: return get_discord().value;
      case K::I1: return get_i1().value;
      case K::I2: return get_i2().value;
      case K::Iq: return get_iq(m.q).value;
      case K::IRq: return get_irq(m.q).value;
      case K::GammaD: return get_discord().dir.gamma;
      case K::GammaI1: return get_i1().dir.gamma;
      case K::GammaI2: return get_i2().dir.gamma;
    }
    throw std::logic_error("unreachable measure kind");
  }

  bool i2_degenerate() const { return i2 && i2->degenerate; }
};

}  // namespace detail

// Runs the sweep: one row per (B, L); at exactly degenerate grid fields
// (ground-state parity crossings) rows are emitted per side according to
// the side-limit policy, each sector evaluated exactly at the crossing
// field. Row-level numerical failures are recorded and the sweep
// continues.
inline SweepResult run_sweep(const SweepConfig& cfg_in) {
  SweepConfig cfg = cfg_in;
  cfg.validate();
  SweepResult result;
  result.config = cfg;
  result.columns = canonical_measures(cfg.measures);

  const std::vector<double> grid = cfg.b_grid();
  const std::vector<int> seps = cfg.resolved_separations();
  const int lmax = *std::max_element(seps.begin(), seps.end());
  result.b_negated = std::any_of(grid.begin(), grid.end(),
                                 [](double b) { return b < 0.0; });

  struct PointRows {
    std::vector<SweepRow> rows;
    int rep_parity = +1;
  };
  std::vector<PointRows> points(grid.size());

  detail::parallel_for(int(grid.size()), [&](int gi) {
    const ChainParams params =
        ChainParams::make(cfg.n, cfg.jx, cfg.jy(), grid[gi]);
    PointRows& pt = points[gi];
    const GroundSector gs = ground_sector(params);
    pt.rep_parity = gs.parity;

    struct Side {
      int parity;
      std::vector<std::string> flags;
    };
    std::vector<Side> sides;
    if (!gs.degenerate) {
      sides.push_back({gs.parity, {}});
    } else {
      const double db = 1e-7 * params.jx;
      const int left = ground_sector(ChainParams::make(
                           cfg.n, cfg.jx, cfg.jy(),
                           std::max(params.b - db, 0.0))).parity;
      const int right = ground_sector(ChainParams::make(
                            cfg.n, cfg.jx, cfg.jy(), params.b + db)).parity;
      if (left == right) {
        sides.push_back({left, {"degenerate"}});
      } else {
        if (cfg.side_limits != SideLimitPolicy::Right)
          sides.push_back({left, {"degenerate", "left-limit"}});
        if (cfg.side_limits != SideLimitPolicy::Left)
          sides.push_back({right, {"degenerate", "right-limit"}});
      }
    }

    for (const Side& side : sides) {
      std::optional<PairCorrelations> corr;
      std::string sector_error;
      try {
        corr = pair_correlators(mode_energies(params, side.parity), lmax);
      } catch (const std::exception& e) {
        sector_error = e.what();
      }
      for (int L : seps) {
        SweepRow row;
        row.b = grid[gi];
        row.L = L;
        row.parity = side.parity;
        row.flags = side.flags;
        row.values.assign(result.columns.size(), std::nullopt);
        try {
          if (!corr) throw std::runtime_error(sector_error);
          const XState x = pair_rdm_from(*corr, L);
          detail::RowMeasures rm(x);
          for (std::size_t c = 0; c < result.columns.size(); ++c)
            row.values[c] = rm.value_for(result.columns[c]);
          if (rm.i2_degenerate()) row.flags.push_back("degenerate");
        } catch (const std::exception& e) {
          row.error = e.what();
          row.flags.push_back("error");
        }
        pt.rows.push_back(std::move(row));
      }
    }
  });

  // crossing markers: ground parity flipped between adjacent grid points
  for (std::size_t gi = 0; gi < points.size(); ++gi) {
    const bool crossed =
        gi > 0 && points[gi].rep_parity != points[gi - 1].rep_parity;
    for (SweepRow& row : points[gi].rows) {
      if (crossed) row.flags.insert(row.flags.begin(), "crossing");
      if (!row.error.empty()) result.any_error = true;
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

// ---- measurement-transition scan ----

struct TransitionRecord {
  double chi = 0.0;
  int L = 0;
  std::optional<double> b_s;                 // factorizing field if defined
  std::optional<double> b_i2;                // sharp I2 transition
  std::optional<double> b_i1_lo, b_i1_hi;    // smooth I1 interval
  std::vector<std::string> flags;
};

namespace detail {

// I2 prefers z iff j_x^2 < r_B^2 + j_z^2; the transition is the root of
// the difference.
inline double i2_transition_gap(const ChainParams& p, int L) {
  const BlochForm b = to_bloch(pair_rdm(p, ground_sector(p).parity, L));
  const double jx2 = b.j(0, 0) * b.j(0, 0);
  const double jy2 = b.j(1, 1) * b.j(1, 1);
  const double zz = b.r_b.z() * b.r_b.z() + b.j(2, 2) * b.j(2, 2);
  return std::max(jx2, jy2) - zz;
}

inline double i1_gamma(const ChainParams& p, int L) {
  return info_deficit(pair_rdm(p, ground_sector(p).parity, L),
                      EntropyFunctional::von_neumann())
      .dir.gamma;
}

template <typename Fn>
std::optional<double> bisect_decreasing(Fn&& fn, double lo, double hi,
                                        double flo, double fhi, double tol) {
  if (!(flo > 0.0) || !(fhi <= 0.0)) return std::nullopt;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (fn(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

// Per-separation transition fields in the window [b_min, b_max]: the sharp
// x -> z switch of the I2 measurement (bisection to 1e-9 Jx) and the field
// interval over which the I1 measurement angle falls from pi/2 - 0.01 to
// 0.01.
inline std::vector<TransitionRecord> scan_measurement_transition(
    const SweepConfig& cfg) {
  cfg.validate();
  if (!cfg.transition_scan)
    throw std::invalid_argument("config field transition_scan: not enabled");
  if (!(cfg.chi > 0.0) || cfg.chi > 1.0)
    throw std::invalid_argument("config field chi: scan needs chi in (0, 1]");
  const std::vector<int> seps = cfg.resolved_separations();
  std::vector<TransitionRecord> records(seps.size());
  const double lo = std::max(cfg.b_min, 1e-9 * cfg.jx);
  const double hi = cfg.b_max;
  const int coarse = 96;

  detail::parallel_for(int(seps.size()), [&](int si) {
    const int L = seps[si];
    TransitionRecord rec;
    rec.chi = cfg.chi;
    rec.L = L;
    if (cfg.chi > 0.0 && cfg.chi < 1.0)
      rec.b_s = std::sqrt(cfg.chi) * cfg.jx;

    auto params_at = [&](double b) {
      return ChainParams::make(cfg.n, cfg.jx, cfg.jy(), b);
    };
    auto gap = [&](double b) {
      return detail::i2_transition_gap(params_at(b), L);
    };

    // bracket the first sign change of the I2 gap on a coarse grid
    double prev_b = lo, prev_g = gap(lo);
    for (int i = 1; i <= coarse; ++i) {
      const double b = lo + (hi - lo) * i / coarse;
      const double g = gap(b);
      if (prev_g > 0.0 && g <= 0.0) {
        rec.b_i2 = detail::bisect_decreasing(gap, prev_b, b, prev_g, g,
                                             1e-9 * cfg.jx);
        break;
      }
      prev_b = b;
      prev_g = g;
    }
    if (!rec.b_i2) rec.flags.push_back("no-i2-transition");

    // I1: fields where the optimal angle leaves pi/2 and reaches 0
    auto gamma_minus = [&](double thr) {
      return [&, thr](double b) { return detail::i1_gamma(params_at(b), L) - thr; };
    };
    auto hi_fn = gamma_minus(M_PI_2 - 0.01);
    auto lo_fn = gamma_minus(0.01);
    double pb = lo, ph = hi_fn(lo), pl = lo_fn(lo);
    for (int i = 1; i <= coarse; ++i) {
      const double b = lo + (hi - lo) * i / coarse;
      if (!rec.b_i1_lo) {
        const double v = hi_fn(b);
        if (ph > 0.0 && v <= 0.0)
          rec.b_i1_lo =
              detail::bisect_decreasing(hi_fn, pb, b, ph, v, 1e-7 * cfg.jx);
        ph = v;
      }
      if (!rec.b_i1_hi) {
        const double v = lo_fn(b);
        if (pl > 0.0 && v <= 0.0)
          rec.b_i1_hi =
              detail::bisect_decreasing(lo_fn, pb, b, pl, v, 1e-7 * cfg.jx);
        pl = v;
      }
      pb = b;
      if (rec.b_i1_lo && rec.b_i1_hi) break;
    }
    if (!rec.b_i1_lo || !rec.b_i1_hi) rec.flags.push_back("no-i1-transition");
    records[si] = std::move(rec);
  });
  return records;
}

// ---- output rendering ----

namespace detail {

inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ';';
    out += flags[i];
  }
  return out;
}

}  // namespace detail

inline std::string to_csv(const SweepResult& r) {
  std::string out = "B,L,parity";
  for (const auto& c : r.columns) out += "," + c.label();
  out += ",flags\n";
  for (const SweepRow& row : r.rows) {
    out += detail::fmt12(row.b);
    out += "," + std::to_string(row.L);
    out += "," + std::to_string(row.parity);
    for (const auto& v : row.values)
      out += "," + (v ? detail::fmt12(*v) : std::string());
    out += "," + detail::join_flags(row.flags) + "\n";
  }
  return out;
}

inline nlohmann::ordered_json config_json(const SweepConfig& cfg) {
  nlohmann::ordered_json meta;
  meta["n"] = cfg.n;
  meta["chi"] = cfg.chi;
  meta["jx"] = cfg.jx;
  meta["b_min"] = cfg.b_min;
  meta["b_max"] = cfg.b_max;
  meta["b_steps"] = cfg.b_steps;
  meta["separations"] = cfg.resolved_separations();
  std::vector<std::string> ms;
  for (const auto& m : canonical_measures(cfg.measures)) ms.push_back(m.label());
  meta["measures"] = ms;
  meta["side_limits"] = cfg.side_limits == SideLimitPolicy::Both
                            ? "both"
                            : (cfg.side_limits == SideLimitPolicy::Left
                                   ? "left"
                                   : "right");
  meta["version"] = kVersion;
  return meta;
}

inline nlohmann::ordered_json to_json(const SweepResult& r) {
  nlohmann::ordered_json doc;
  doc["meta"] = config_json(r.config);
  doc["meta"]["b_negated"] = r.b_negated;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const SweepRow& row : r.rows) {
    nlohmann::ordered_json jr;
    jr["B"] = row.b;
    jr["L"] = row.L;
    jr["parity"] = row.parity;
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
      if (row.values[c])
        jr[r.columns[c].label()] = *row.values[c];
      else
        jr[r.columns[c].label()] = nullptr;
    }
    jr["flags"] = row.flags;
    if (!row.error.empty()) jr["error"] = row.error;
    rows.push_back(std::move(jr));
  }
  doc["rows"] = std::move(rows);
  return doc;
}

inline std::string transition_csv(const std::vector<TransitionRecord>& recs) {
  std::string out = "chi,L,Bs,B_I2,B_I1_start,B_I1_end,flags\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? detail::fmt12(*v) : std::string();
  };
  for (const auto& r : recs) {
    out += detail::fmt12(r.chi);
    out += "," + std::to_string(r.L);
    out += "," + opt(r.b_s);
    out += "," + opt(r.b_i2);
    out += "," + opt(r.b_i1_lo);
    out += "," + opt(r.b_i1_hi);
    out += "," + detail::join_flags(r.flags) + "\n";
  }
  return out;
}

inline nlohmann::ordered_json transition_json(
    const std::vector<TransitionRecord>& recs, const SweepConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["meta"] = config_json(cfg);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : recs) {
    nlohmann::ordered_json jr;
    jr["chi"] = r.chi;
    jr["L"] = r.L;
    jr["Bs"] = r.b_s ? nlohmann::ordered_json(*r.b_s) : nullptr;
    jr["B_I2"] = r.b_i2 ? nlohmann::ordered_json(*r.b_i2) : nullptr;
    jr["B_I1_start"] =
        r.b_i1_lo ? nlohmann::ordered_json(*r.b_i1_lo) : nullptr;
    jr["B_I1_end"] = r.b_i1_hi ? nlohmann::ordered_json(*r.b_i1_hi) : nullptr;
    jr["flags"] = r.flags;
    rows.push_back(std::move(jr));
  }
  doc["rows"] = std::move(rows);
  return doc;
}

}  // namespace qcorr::sweep
