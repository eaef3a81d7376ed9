// Command-line driver: runs the verification suites over the p-hypergeometric
// solution families, the Satake maps, orthogonality, p-curvature, wedge-power
// kernels, and the Kodaira-Spencer identification, and emits a JSON report.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>

#include "engine/curvature.hpp"
#include "engine/rat.hpp"

using json = nlohmann::ordered_json;
using namespace kzc;

namespace {

struct Config {
  int g = 2;
  std::vector<u64> primes{7};
  int r = 2;
  int kappa = 0; // 0 = both connections
  std::string mode = "symbolic";
  u64 seed = 1;
  int points = 5;
  std::string json_path;
  std::string dump_poly;
  bool timings = false;
};

struct Check {
  std::string name;
  std::string anchor;
  std::string status; // pass | fail | exceptional | measured
  std::string detail;
  json dims = json::object();
  double ms = 0;
};

struct Report {
  Config cfg;
  std::string command;
  std::vector<Check> checks;

  void add(Check c) {
    std::printf("  [%-11s] %-40s %s\n", c.status.c_str(), c.name.c_str(), c.detail.c_str());
    checks.push_back(std::move(c));
  }

  bool failed() const {
    for (auto& c : checks)
      if (c.status == "fail") return true;
    return false;
  }

  json to_json() const {
    json cfgj;
    cfgj["g"] = cfg.g;
    cfgj["p"] = cfg.primes;
    cfgj["r"] = cfg.r;
    cfgj["kappa"] = cfg.kappa;
    cfgj["mode"] = cfg.mode;
    cfgj["seed"] = cfg.seed;
    cfgj["points"] = cfg.points;
    json arr = json::array();
    for (auto& c : checks) {
      json e;
      e["name"] = c.name;
      e["anchor"] = c.anchor;
      e["status"] = c.status;
      e["details"] = c.detail;
      if (!c.dims.empty()) e["dims"] = c.dims;
      if (cfg.timings) e["ms"] = c.ms;
      arr.push_back(std::move(e));
    }
    json out;
    out["command"] = command;
    out["config"] = cfgj;
    out["checks"] = arr;
    return out;
  }
};

// Timed check runner with the shared exception policy: an exceptional prime
// or a degenerate point is reported, never silently dropped, and never aborts
// the rest of the sweep; a blown symbolic budget downgrades to "measured".
template <class Fn>
void run_check(Report& rep, const std::string& name, const std::string& anchor, Fn&& fn) {
  Check c;
  c.name = name;
  c.anchor = anchor;
  auto t0 = std::chrono::steady_clock::now();
  try {
    fn(c);
  } catch (const ExceptionalPrime& e) {
    c.status = "exceptional";
    c.detail = e.what();
  } catch (const BudgetExceeded& e) {
    c.status = "measured";
    c.detail = std::string("symbolic budget exceeded: ") + e.what();
  } catch (const std::exception& e) {
    c.status = "fail";
    c.detail = std::string("error: ") + e.what();
  }
  c.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  rep.add(std::move(c));
}

bool is_prime(u64 p) {
  if (p < 2) return false;
  for (u64 d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

Rng suite_rng(const Config& cfg, u64 p, u64 salt) {
  return Rng(cfg.seed ^ (p * 0x9e3779b97f4a7c15ULL) ^ (salt * 0xbf58476d1ce4e5b9ULL));
}

std::vector<Family> families_for(int kappa) {
  std::vector<Family> out;
  for (auto f : {Family::N, Family::M, Family::BarN, Family::BarM, Family::TildeM})
    if (kappa == 0 || family_traits(f).kappa == kappa) out.push_back(f);
  return out;
}

// l-tuples with entries in 1..maxv: strictly increasing for the skew families,
// nondecreasing for the symmetric ones.
std::vector<std::vector<int>> ell_tuples(Family fam, int r, int maxv) {
  bool skew = family_traits(fam).ell_skew;
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(r));
  auto rec = [&](auto&& self, int pos, int lo) -> void {
    if (pos == r) {
      out.push_back(cur);
      return;
    }
    for (int v = lo; v <= maxv; ++v) {
      cur[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, skew ? v + 1 : v);
    }
  };
  rec(rec, 0, 1);
  return out;
}

std::string tuple_str(const std::vector<int>& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? "," : "") + std::to_string(t[i]);
  return s + ")";
}

std::vector<u64> apply_mat(const Fp& F, const Matrix<Fp>& m, const std::vector<u64>& v) {
  std::vector<u64> out(m.rows, 0);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) out[i] = F.add(out[i], F.mul(m.at(i, j), v[j]));
  return out;
}

bool vec_zero(const Fp& F, const std::vector<u64>& v) {
  for (auto x : v)
    if (!F.is_zero(x)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// solutions: build the families, check vanishing and span dimensions.
void suite_solutions(const Config& cfg, Report& rep) {
  for (u64 p : cfg.primes) {
    Fp F(p);
    auto rng = suite_rng(cfg, p, 1);
    json dump = json::array();
    for (Family fam : families_for(cfg.kappa)) {
      std::string fname = family_name(fam);
      run_check(rep, fname + " span p=" + std::to_string(p), "solutions/span", [&](Check& c) {
        SliceCache cache = SliceCache::build(F, cfg.g, psi_exponent(fam, p));
        auto pref = prefactor_poly(F, fam, cfg.r);
        std::vector<PolyVector<Fp>> built;
        int zero_count = 0;
        for (auto& ell : ell_tuples(fam, cfg.r, cfg.g)) {
          auto v = build_solution(F, fam, cfg.g, cfg.r, ell, &cache, &pref);
          if (v.is_zero())
            ++zero_count;
          else
            built.push_back(v);
          if (!cfg.dump_poly.empty()) {
            json entry;
            entry["family"] = fname;
            entry["ell"] = ell;
            json coords = json::array();
            for (auto& poly : v.coords) {
              json terms = json::array();
              for (std::size_t t = 0; t < poly.size(); ++t) {
                json term = json::array();
                for (int k = 0; k < poly.vars(); ++k) term.push_back(poly.exp(t)[k]);
                term.push_back(poly.coeffs[t]);
                terms.push_back(std::move(term));
              }
              coords.push_back(std::move(terms));
            }
            entry["coords"] = std::move(coords);
            dump.push_back(std::move(entry));
          }
        }
        auto dim = generic_rank(F, built, rng);
        auto expected = binom(cfg.g, cfg.r);
        c.dims["span"] = dim;
        c.dims["expected"] = expected;
        c.dims["zero_tuples"] = zero_count;
        bool ok = dim == expected;
        c.status = ok ? "pass" : "fail";
        c.detail = "span dimension " + std::to_string(dim) + " of expected " +
                   std::to_string(expected);
      });
    }
    if (cfg.r == 1) {
      run_check(rep, "N vanishing above g p=" + std::to_string(p), "solutions/vanishing",
                [&](Check& c) {
                  auto v = build_solution(F, Family::N, cfg.g, 1, {cfg.g + 1});
                  c.status = v.is_zero() ? "pass" : "fail";
                  c.detail = "index g+1 solution is " + std::string(v.is_zero() ? "" : "not ") +
                             "identically zero";
                });
    }
    if (!cfg.dump_poly.empty()) {
      std::ofstream out(cfg.dump_poly);
      out << dump.dump(2) << "\n";
    }
  }
}

// ---------------------------------------------------------------------------
// verify-kz: each family satisfies its connection, symbolically or at points.
void suite_verify(const Config& cfg, Report& rep) {
  for (u64 p : cfg.primes) {
    Fp F(p);
    auto rng = suite_rng(cfg, p, 2);
    for (Family fam : families_for(cfg.kappa)) {
      auto traits = family_traits(fam);
      std::string fname = family_name(fam);
      auto sys = traits.wedge_carrier ? kz_wedge_system(F, cfg.g, cfg.r, traits.kappa)
                                      : kz_weight_system(F, cfg.g, cfg.r, traits.kappa);
      SliceCache cache = SliceCache::build(F, cfg.g, psi_exponent(fam, p));
      auto pref = prefactor_poly(F, fam, cfg.r);
      for (auto& ell : ell_tuples(fam, cfg.r, cfg.g)) {
        run_check(rep, fname + "^" + tuple_str(ell) + " p=" + std::to_string(p),
                  "verify-kz/connection", [&](Check& c) {
                    if (cfg.mode == "symbolic") {
                      try {
                        auto v = build_solution(F, fam, cfg.g, cfg.r, ell, &cache, &pref);
                        auto verdict = verify_solution(sys, v, VerifyMode::symbolic);
                        c.status = verdict.pass ? "pass" : "fail";
                        c.detail = verdict.detail;
                        return;
                      } catch (const BudgetExceeded&) {
                        // fall through to the point-based check below
                      } catch (const std::bad_alloc&) {
                      }
                      auto verdict =
                          verify_family_at_points(F, fam, cfg.g, cfg.r, ell, rng, cfg.points);
                      c.status = verdict.pass ? "measured" : "fail";
                      c.detail = "symbolic budget exceeded; " + verdict.detail;
                    } else {
                      auto verdict =
                          verify_family_at_points(F, fam, cfg.g, cfg.r, ell, rng, cfg.points);
                      c.status = verdict.pass ? "pass" : "fail";
                      c.detail = verdict.detail;
                    }
                  });
      }
    }
  }
}

// ---------------------------------------------------------------------------
// satake: the ladder matrices, the forward map on the wedge family, the
// explicit r=2 map on the minus families, and the one-step reduction identity.
void suite_satake(const Config& cfg, Report& rep) {
  for (u64 p : cfg.primes) {
    Fp F(p);
    run_check(rep, "ladder p=" + std::to_string(p), "satake/ladder", [&](Check& c) {
      auto sm = satake_matrices(F, cfg.g, cfg.r);
      c.status = "pass";
      c.detail = "built " + std::to_string(sm.A.size()) + " ladder matrices";
    });
    run_check(rep, "forward map p=" + std::to_string(p), "satake/forward", [&](Check& c) {
      auto T = build_T(F, cfg.g, cfg.r);
      SliceCache cache = SliceCache::build(F, cfg.g, psi_exponent(Family::M, p));
      auto prefM = prefactor_poly(F, Family::M, cfg.r);
      auto prefN = prefactor_poly(F, Family::N, cfg.r);
      int checked = 0;
      for (auto& ell : ell_tuples(Family::M, cfg.r, cfg.g)) {
        auto vM = build_solution(F, Family::M, cfg.g, cfg.r, ell, &cache, &prefM);
        auto vN = build_solution(F, Family::N, cfg.g, cfg.r, ell, &cache, &prefN);
        auto img = apply_poly_map(F, T, vM);
        for (std::size_t b = 0; b < vN.dim(); ++b)
          if (!equal(img.coords[b], vN.coords[b])) {
            c.status = "fail";
            c.detail = "map image differs from the target family at " + tuple_str(ell);
            return;
          }
        ++checked;
      }
      c.status = "pass";
      c.detail = "map carries the wedge family to the weight family on " +
                 std::to_string(checked) + " tuples";
    });
    if (cfg.r == 2) {
      run_check(rep, "explicit r=2 map p=" + std::to_string(p), "satake/explicit", [&](Check& c) {
        auto Tt = build_tildeT_r2(F, cfg.g);
        SliceCache cache = SliceCache::build(F, cfg.g, psi_exponent(Family::BarN, p));
        int checked = 0;
        for (auto& ell : ell_tuples(Family::TildeM, 2, cfg.g)) {
          auto vBN = build_solution(F, Family::BarN, cfg.g, 2, ell, &cache);
          auto vTM = build_solution(F, Family::TildeM, cfg.g, 2, ell, &cache);
          auto img = apply_poly_map(F, Tt, vBN);
          for (std::size_t b = 0; b < vTM.dim(); ++b)
            if (!equal(img.coords[b], vTM.coords[b])) {
              c.status = "fail";
              c.detail = "explicit map misses the twisted family at " + tuple_str(ell);
              return;
            }
          ++checked;
        }
        c.status = "pass";
        c.detail = "explicit map matches on " + std::to_string(checked) + " tuples";
      });
    }
    run_check(rep, "reduction step p=" + std::to_string(p), "satake/reduction", [&](Check& c) {
      auto verdict = cohomology_relation_check(F, cfg.g, 1, cfg.g);
      c.status = verdict.pass ? "pass" : "fail";
      c.detail = verdict.detail;
    });
  }
}

// ---------------------------------------------------------------------------
// ortho: the pairing between the two connections vanishes on the families.
void suite_ortho(const Config& cfg, Report& rep) {
  for (u64 p : cfg.primes) {
    Fp F(p);
    auto rng = suite_rng(cfg, p, 3);
    run_check(rep, "pairing r=" + std::to_string(cfg.r) + " p=" + std::to_string(p),
              "ortho/pairing", [&](Check& c) {
                auto lhs = ell_tuples(Family::N, cfg.r, cfg.g + 1);
                auto rhs = ell_tuples(Family::BarN, cfg.r, cfg.g + 1);
                int pairs = 0, symbolic = 0, certified = 0;
                for (auto& a : lhs)
                  for (auto& b : rhs) {
                    auto orep = orthogonality_pair(F, cfg.g, cfg.r, a, b, rng);
                    if (!orep.zero) {
                      c.status = "fail";
                      c.detail = "pairing of " + tuple_str(a) + " with " + tuple_str(b) +
                                 " does not vanish (" + orep.method + ")";
                      return;
                    }
                    ++pairs;
                    (orep.method == "symbolic" ? symbolic : certified)++;
                  }
                c.dims["pairs"] = pairs;
                c.dims["symbolic"] = symbolic;
                c.dims["certified"] = certified;
                c.status = "pass";
                c.detail = std::to_string(pairs) + " pairings vanish (" +
                           std::to_string(symbolic) + " symbolic, " + std::to_string(certified) +
                           " by certificate)";
              });
  }
}

// ---------------------------------------------------------------------------
// curvature: rank-one structure, square zero, kernel dimension, and the
// direct covariant-power oracle where it is affordable.
void suite_curvature(const Config& cfg, Report& rep) {
  for (u64 p : cfg.primes) {
    Fp F(p);
    auto rng = suite_rng(cfg, p, 4);
    run_check(rep, "rank structure p=" + std::to_string(p), "curvature/structure", [&](Check& c) {
      if ((int)p <= 2 * cfg.g + 1)
        throw ExceptionalPrime(p, "prime not above the arity 2g+1");
      auto frame = VFrame::build(F, cfg.g);
      int good_points = 0, exceptional = 0;
      for (int t = 0; t < cfg.points; ++t) {
        try {
          auto pt = EvaluationPoint::random(F, cfg.g, rng);
          auto ops = pcurv_explicit(F, cfg.g, pt, frame);
          std::vector<Matrix<Fp>> mats;
          for (auto& op : ops) {
            if (op.degenerate) throw ExceptionalPrime(p, "degenerate operator");
            if (rank(F, op.tilde) != 1) {
              c.status = "fail";
              c.detail = "operator rank differs from 1";
              return;
            }
            auto sq = mat_mul(F, op.tilde, op.tilde);
            for (std::size_t i = 0; i < sq.rows; ++i)
              for (std::size_t j = 0; j < sq.cols; ++j)
                if (!F.is_zero(sq.at(i, j))) {
                  c.status = "fail";
                  c.detail = "operator square is nonzero";
                  return;
                }
            mats.push_back(op.tilde);
          }
          auto ker = common_kernel(F, mats);
          if ((int)ker.size() != cfg.g) {
            c.status = "fail";
            c.detail = "common kernel dimension " + std::to_string(ker.size()) +
                       " instead of " + std::to_string(cfg.g);
            return;
          }
          ++good_points;
        } catch (const ExceptionalPrime&) {
          ++exceptional;
        }
      }
      c.dims["points"] = good_points;
      c.dims["exceptional_points"] = exceptional;
      c.status = good_points > 0 ? "pass" : "exceptional";
      c.detail = "rank 1, square zero, kernel dimension " + std::to_string(cfg.g) + " at " +
                 std::to_string(good_points) + " points";
    });
    run_check(rep, "direct oracle p=" + std::to_string(p), "curvature/oracle", [&](Check& c) {
      if ((int)p <= 2 * cfg.g + 1)
        throw ExceptionalPrime(p, "prime not above the arity 2g+1");
      if (cfg.g > 2 || p > 11) {
        c.status = "measured";
        c.detail = "direct covariant-power oracle capped at g=2, p<=11; closed form used";
        return;
      }
      auto frame = VFrame::build(F, cfg.g);
      auto pt = EvaluationPoint::random(F, cfg.g, rng);
      auto ops = pcurv_explicit(F, cfg.g, pt, frame);
      for (int a = 0; a < 2 * cfg.g + 1; ++a) {
        auto oracle = pcurv_direct_oracle(F, cfg.g, pt, a);
        for (std::size_t i = 0; i < oracle.rows; ++i)
          for (std::size_t j = 0; j < oracle.cols; ++j) {
            auto expect =
                F.mul(ops[(std::size_t)a].full_scale, ops[(std::size_t)a].tilde.at(i, j));
            if (!F.eq(oracle.at(i, j), expect)) {
              c.status = "fail";
              c.detail = "oracle disagrees with the closed formula in direction " +
                         std::to_string(a + 1);
              return;
            }
          }
      }
      c.status = "pass";
      c.detail = "oracle equals the closed formula in all directions at a random point";
    });
  }
}

// Wedge-power kernel dimensions at one evaluation point; throws on a
// degenerate (exceptional) point.
struct KernelDims {
  json blocks = json::object();
  bool failed = false;
  std::string why;
};

KernelDims kernel_dims_at(const Fp& F, int g, int r, const EvaluationPoint& pt,
                          const VFrame& frame) {
  KernelDims out;
  auto gb = build_good_basis(F, g, pt, frame);
  auto ops = pcurv_explicit(F, g, pt, frame);
  std::vector<Matrix<Fp>> good;
  for (auto& op : ops) {
    if (op.degenerate) throw ExceptionalPrime(F.p, "degenerate operator at the point");
    good.push_back(in_good_basis(F, gb, op.tilde));
  }
  std::vector<Matrix<Fp>> w2;
  for (auto& m : good) w2.push_back(wedge_extend(F, m, 2));
  auto dg = delta_good(F, gb);
  auto k2 = common_kernel(F, w2);
  out.blocks["wedge2_kernel"] = k2.size();
  auto prim2 = primitive_subspace(F, g, 2, dg);
  out.blocks["primitive2"] = prim2.size();
  out.blocks["wedge2_kernel_in_primitive"] =
      k2.size() + prim2.size() - joint_dim(F, k2, prim2);
  std::vector<std::vector<u64>> images;
  WedgeSpace Wv(2 * g, 2);
  for (auto& m : w2)
    for (auto& v : prim2) images.push_back(apply_mat(F, m, v));
  out.blocks["primitive2_image_codim"] = prim2.size() - span_dim(F, images);
  // Pure blocks: no kernel on the all-v part for any wedge degree up to g.
  for (int rr = 2; rr <= std::min(r, g); ++rr) {
    std::vector<Matrix<Fp>> wr;
    for (auto& m : good) wr.push_back(wedge_extend(F, m, rr));
    out.blocks["pure_v_kernel_r" + std::to_string(rr)] =
        common_kernel_on(F, wr, block_indices(g, rr, rr)).size();
  }
  if (r >= 3 && g >= 3) {
    std::vector<Matrix<Fp>> w3;
    for (auto& m : good) w3.push_back(wedge_extend(F, m, 3));
    out.blocks["v2w1_kernel"] = common_kernel_on(F, w3, block_indices(g, 3, 2)).size();
    auto k12 = common_kernel_on(F, w3, block_indices(g, 3, 1));
    out.blocks["v1w2_kernel"] = k12.size();
    auto prim3 = primitive_subspace(F, g, 3, dg);
    out.blocks["primitive3"] = prim3.size();
    out.blocks["v1w2_kernel_in_primitive"] =
        span_dim(F, k12) + prim3.size() - joint_dim(F, k12, prim3);
    // Kernel of the stacked extensions restricted to the primitive part.
    Matrix<Fp> stacked(F, w3.size() * w3[0].rows, prim3.size());
    for (std::size_t o = 0; o < w3.size(); ++o)
      for (std::size_t cdx = 0; cdx < prim3.size(); ++cdx) {
        auto img = apply_mat(F, w3[o], prim3[cdx]);
        for (std::size_t rw = 0; rw < img.size(); ++rw)
          stacked.at(o * w3[o].rows + rw, cdx) = img[rw];
      }
    out.blocks["primitive3_kernel"] = kernel(F, stacked).size();
    if (2 * g >= 4) {
      std::vector<Matrix<Fp>> w4;
      for (auto& m : good) w4.push_back(wedge_extend(F, m, 4));
      out.blocks["v1w3_kernel_measured"] =
          common_kernel_on(F, w4, block_indices(g, 4, 1)).size();
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// kernels: dimension audits of the wedge-power kernels across random points;
// dims must be stable across the sweep, instability is an exceptional event.
void suite_kernels(const Config& cfg, Report& rep) {
  for (u64 p : cfg.primes) {
    Fp F(p);
    auto rng = suite_rng(cfg, p, 5);
    run_check(rep, "kernel audit p=" + std::to_string(p), "kernels/audit", [&](Check& c) {
      if ((int)p <= 2 * cfg.g + 1)
        throw ExceptionalPrime(p, "prime not above the arity 2g+1");
      const int g = cfg.g;
      json predicted;
      predicted["wedge2_kernel"] = binom(g, 2) + 1;
      predicted["primitive2"] = binom(2 * g, 2) - 1;
      predicted["wedge2_kernel_in_primitive"] = binom(g, 2);
      predicted["primitive2_image_codim"] = binom(g, 2);
      for (int rr = 2; rr <= std::min(cfg.r, g); ++rr)
        predicted["pure_v_kernel_r" + std::to_string(rr)] = 0;
      if (cfg.r >= 3 && g >= 3) {
        predicted["v2w1_kernel"] = 0;
        predicted["v1w2_kernel"] = 2 * g - 2;
        predicted["primitive3"] = binom(2 * g, 3) - 2 * g;
        predicted["v1w2_kernel_in_primitive"] = g - 2;
        predicted["primitive3_kernel"] = binom(g, 3) + g - 2;
        if (2 * g >= 4) predicted["v1w3_kernel_measured"] = 3 * binom(g - 1, 2);
      }
      auto frame = VFrame::build(F, g);
      json per_point = json::array();
      int stable = 0, exceptional = 0;
      json first;
      for (int t = 0; t < cfg.points; ++t) {
        try {
          auto pt = EvaluationPoint::random(F, g, rng);
          auto kd = kernel_dims_at(F, g, cfg.r, pt, frame);
          if (stable == 0) first = kd.blocks;
          if (kd.blocks != first) {
            c.status = "exceptional";
            c.detail = "dimension audit unstable across points (exceptional-point event)";
            c.dims["per_block_dims"] = per_point;
            return;
          }
          per_point.push_back(kd.blocks);
          ++stable;
        } catch (const ExceptionalPrime&) {
          ++exceptional;
        } catch (const std::domain_error&) {
          ++exceptional;
        }
      }
      c.dims["g"] = g;
      c.dims["p"] = p;
      c.dims["r"] = cfg.r;
      c.dims["points"] = stable;
      c.dims["exceptional_points"] = exceptional;
      c.dims["per_block_dims"] = stable > 0 ? first : json::object();
      c.dims["predicted"] = predicted;
      if (stable == 0) {
        c.status = "exceptional";
        c.detail = "no non-exceptional points found";
        return;
      }
      // The one block that is only measured is compared but never asserted.
      bool ok = true;
      std::string bad;
      for (auto& [key, val] : predicted.items()) {
        if (key == "v1w3_kernel_measured") continue;
        if (first[key] != val) {
          ok = false;
          bad = key;
        }
      }
      c.dims["status"] = ok ? "pass" : "fail";
      c.status = ok ? "pass" : "fail";
      c.detail = ok ? "all predicted dimensions hold at " + std::to_string(stable) + " points"
                    : "block " + bad + " differs from its predicted dimension";
    });
  }
}

// ---------------------------------------------------------------------------
// ks: deformation-map identification with the curvature operators, and the
// wedge-cube kernel dimensions of the deformation maps over the rationals.
void suite_ks(const Config& cfg, Report& rep) {
  for (u64 p : cfg.primes) {
    Fp F(p);
    auto rng = suite_rng(cfg, p, 6);
    run_check(rep, "identification p=" + std::to_string(p), "ks/identification", [&](Check& c) {
      if ((int)p <= 2 * cfg.g + 1)
        throw ExceptionalPrime(p, "prime not above the arity 2g+1");
      auto frame = VFrame::build(F, cfg.g);
      auto pt = EvaluationPoint::random(F, cfg.g, rng);
      auto gb = build_good_basis(F, cfg.g, pt, frame);
      auto ops = pcurv_explicit(F, cfg.g, pt, frame);
      std::vector<u64> zp;
      for (auto zi : pt.z) zp.push_back(F.pow(zi, p));
      for (int a = 0; a < 2 * cfg.g + 1; ++a) {
        auto lhs = in_good_basis(F, gb, ops[(std::size_t)a].tilde);
        auto rhs = ks_tilde_matrix(F, cfg.g, zp, a);
        for (std::size_t i = 0; i < lhs.rows; ++i)
          for (std::size_t j = 0; j < lhs.cols; ++j)
            if (!F.eq(lhs.at(i, j), rhs.at(i, j))) {
              c.status = "fail";
              c.detail = "good-basis operator differs from the deformation matrix";
              return;
            }
      }
      c.status = "pass";
      c.detail = "curvature operators equal the deformation maps under the p-power substitution";
    });
  }
  run_check(rep, "wedge-cube dims over Q", "ks/wedge-cube", [&](Check& c) {
    const int g = cfg.g;
    if (g < 3) {
      c.status = "measured";
      c.detail = "wedge cube needs g >= 3; skipped";
      return;
    }
    Rat Q;
    const int n = 2 * g + 1;
    std::vector<Rat::Elem> z;
    for (int i = 0; i < n; ++i) z.push_back(Q.from_int(2 * i + 1));
    std::vector<Matrix<Rat>> w3;
    for (int a = 0; a < n; ++a) w3.push_back(wedge_extend(Q, ks_tilde_matrix(Q, g, z, a), 3));
    auto ker = common_kernel(Q, w3);
    WedgeSpace Wv(2 * g, 2);
    std::vector<Rat::Elem> delta2(Wv.dim(), Q.zero());
    for (int k = 0; k < g; ++k) delta2[(std::size_t)Wv.index.at({k, g + k})] = Q.one();
    Matrix<Rat> acc;
    bool firstmul = true;
    int cur = 3;
    for (int step = 0; step < g - 2; ++step) {
      auto M = wedge_mult_by(Q, 2 * g, cur, delta2);
      acc = firstmul ? M : mat_mul(Q, M, acc);
      firstmul = false;
      cur += 2;
    }
    auto prim = kernel(Q, acc);
    std::vector<std::vector<Rat::Elem>> all = ker;
    all.insert(all.end(), prim.begin(), prim.end());
    auto inter = span_dim(Q, ker) + prim.size() - span_dim(Q, all);
    c.dims["kernel"] = ker.size();
    c.dims["kernel_expected"] = binom(g, 3) + (std::size_t)(2 * g - 2);
    c.dims["kernel_in_primitive"] = inter;
    c.dims["kernel_in_primitive_expected"] = binom(g, 3) + (std::size_t)(g - 2);
    bool ok = ker.size() == binom(g, 3) + (std::size_t)(2 * g - 2) &&
              inter == binom(g, 3) + (std::size_t)(g - 2);
    c.status = ok ? "pass" : "fail";
    c.detail = ok ? "wedge-cube kernel dimensions match over the rationals"
                  : "wedge-cube kernel dimensions differ";
  });
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification suites for the KZ solution families, Satake maps, "
               "p-curvature kernels, and deformation-map identifications"};
  app.require_subcommand(1);

  Config cfg;
  std::vector<CLI::App*> subs;
  for (const char* name : {"solutions", "verify-kz", "satake", "ortho", "curvature", "kernels",
                           "ks", "all"}) {
    auto* sc = app.add_subcommand(name);
    sc->add_option("--g", cfg.g, "genus parameter (arity is 2g+1)");
    sc->add_option("--p", cfg.primes, "prime or list of primes");
    sc->add_option("--r", cfg.r, "tensor/wedge degree");
    sc->add_option("--kappa", cfg.kappa, "restrict to one connection (+2 or -2; 0 = both)");
    sc->add_option("--mode", cfg.mode, "symbolic | point | probabilistic");
    sc->add_option("--seed", cfg.seed, "random seed (identical seed => identical report)");
    sc->add_option("--points", cfg.points, "number of random evaluation points");
    sc->add_option("--json", cfg.json_path, "write the JSON report to this path");
    sc->add_option("--dump-poly", cfg.dump_poly, "dump built solution polynomials to this path");
    sc->add_flag("--timings", cfg.timings, "include wall-clock timings in the JSON report");
    subs.push_back(sc);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // Config invariants; violations are usage errors.
  for (u64 p : cfg.primes)
    if (p < 3 || !is_prime(p)) {
      std::fprintf(stderr, "error: %llu is not an odd prime\n", (unsigned long long)p);
      return 2;
    }
  if (cfg.g < 1 || cfg.r < 1 || cfg.r > cfg.g) {
    std::fprintf(stderr, "error: need 1 <= r <= g\n");
    return 2;
  }
  if (cfg.kappa != 0 && cfg.kappa != 2 && cfg.kappa != -2) {
    std::fprintf(stderr, "error: kappa must be +2 or -2\n");
    return 2;
  }
  if (cfg.mode != "symbolic" && cfg.mode != "point" && cfg.mode != "probabilistic") {
    std::fprintf(stderr, "error: unknown mode '%s'\n", cfg.mode.c_str());
    return 2;
  }
  if (cfg.points < 1) {
    std::fprintf(stderr, "error: points must be positive\n");
    return 2;
  }

  std::string command;
  for (auto* sc : subs)
    if (sc->parsed()) command = sc->get_name();

  Report rep;
  rep.cfg = cfg;
  rep.command = command;
  std::printf("%s: g=%d r=%d seed=%llu\n", command.c_str(), cfg.g, cfg.r,
              (unsigned long long)cfg.seed);

  auto dispatch = [&](const std::string& cmd) {
    if (cmd == "solutions") suite_solutions(cfg, rep);
    if (cmd == "verify-kz") suite_verify(cfg, rep);
    if (cmd == "satake") suite_satake(cfg, rep);
    if (cmd == "ortho") suite_ortho(cfg, rep);
    if (cmd == "curvature") suite_curvature(cfg, rep);
    if (cmd == "kernels") suite_kernels(cfg, rep);
    if (cmd == "ks") suite_ks(cfg, rep);
  };
  if (command == "all") {
    for (const char* c : {"solutions", "verify-kz", "satake", "ortho", "curvature", "kernels",
                          "ks"})
      dispatch(c);
  } else {
    dispatch(command);
  }

  int pass = 0, fail = 0, exceptional = 0, measured = 0;
  for (auto& c : rep.checks) {
    if (c.status == "pass") ++pass;
    if (c.status == "fail") ++fail;
    if (c.status == "exceptional") ++exceptional;
    if (c.status == "measured") ++measured;
  }
  std::printf("summary: %d pass, %d fail, %d exceptional, %d measured\n", pass, fail, exceptional,
              measured);

  if (!cfg.json_path.empty()) {
    std::ofstream out(cfg.json_path);
    if (!out) {
      std::fprintf(stderr, "error: cannot write %s\n", cfg.json_path.c_str());
      return 2;
    }
    out << rep.to_json().dump(2) << "\n";
  }
  return rep.failed() ? 1 : 0;
}
