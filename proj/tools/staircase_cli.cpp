// Experiment driver for staircase cutting-and-stacking constructions.
//
// Exit codes: 0 success, 1 usage or domain error, 2 check violation.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "staircase/analysis.hpp"
#include "staircase/dynamics.hpp"
#include "staircase/io.hpp"
#include "staircase/svg.hpp"

namespace sc = staircase;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;
constexpr int kDefaultTableDepth = 8;

struct CommonFlags {
  std::string config;
  std::string mode;
  std::string mu_ref;
  std::string tol;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> stages;
};

struct Context {
  sc::io::KeyValues kv;
  std::optional<sc::StageTable> table;
  CommonFlags flags;

  std::string setting(const std::string& flag, const char* key, const char* fallback) const {
    if (!flag.empty()) return flag;
    if (auto it = kv.find(key); it != kv.end()) return it->second;
    return fallback;
  }

  sc::Rational tol() const { return sc::parse_rational(setting(flags.tol, "tol", "1/1048576")); }

  int jobs() const {
    if (flags.jobs) return *flags.jobs;
    if (auto it = kv.find("jobs"); it != kv.end()) return std::stoi(it->second);
    return 0;
  }

  std::uint64_t seed() const {
    if (flags.seed) return *flags.seed;
    if (auto it = kv.find("seed"); it != kv.end()) return std::stoull(it->second);
    return 0;
  }

  std::optional<int> requested_stages() const {
    if (flags.stages) return *flags.stages;
    if (auto it = kv.find("stages"); it != kv.end()) return std::stoi(it->second);
    return std::nullopt;
  }

  int min_stages() const { return requested_stages().value_or(1); }

  /// Reference measure, fixed after the table has been pre-extended.
  sc::NormalizationMode mode() const {
    const std::string m = setting(flags.mode, "mode", "probability");
    if (m == "infinite") return sc::NormalizationMode::infinite();
    if (m != "probability") throw sc::Error(sc::ErrorCode::ParseError, "mode must be probability|infinite");
    const std::string mu = setting(flags.mu_ref, "mu_ref", "");
    return sc::NormalizationMode::probability(mu.empty() ? sc::default_mu_ref(*table) : sc::parse_rational(mu));
  }

  void load() {
    std::filesystem::path base;
    if (!flags.config.empty()) {
      kv = sc::io::read_key_values(flags.config);
      base = std::filesystem::path(flags.config).parent_path();
    }
    table.emplace(sc::io::params_from(kv, base));
    if (const char* cap = std::getenv("STAIRCASE_MAX_STAGE_CELLS")) {
      table->set_cell_limit(static_cast<std::size_t>(std::stoull(cap)));
    }
    table->extend_to(min_stages());
  }

  void emit(const std::string& text) const {
    const std::string path = setting(flags.out, "out", "");
    if (path.empty()) {
      std::cout << text;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw sc::Error(sc::ErrorCode::InvalidArgument, "cannot write " + path);
    f << text;
  }

  std::string out_path() const { return setting(flags.out, "out", ""); }
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "key-value construction file");
  cmd->add_option("--mode", f.mode, "probability|infinite");
  cmd->add_option("--mu-ref", f.mu_ref, "reference measure p/q (probability mode)");
  cmd->add_option("--tol", f.tol, "residual tolerance p/q");
  cmd->add_option("--out", f.out, "output file (default stdout)");
  cmd->add_option("--seed", f.seed, "sampling seed");
  cmd->add_option("--jobs", f.jobs, "worker threads (0 = all cores)");
  cmd->add_option("--stages", f.stages, "build at least this many stages");
}

void report_mu_ref(const sc::NormalizationMode& mode) {
  if (mode.is_probability()) std::cerr << "mu_ref=" << sc::to_string(mode.mu_ref) << '\n';
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulator for staircase rank-one constructions"};
  app.require_subcommand(1);
  Context ctx;
  int exit_code = kExitOk;

  std::string set_a, set_b, shift, windows, rake_text, delta = "1/4", eps = "1/20";
  std::string d_text, d_lo, d_hi, shifts_text, zero_below = "1/10", inf_above = "10", svg_path;
  std::size_t samples = 64;
  int L = 2, stage_j = 0;

  auto* stages = app.add_subcommand("stages", "print the stage table as CSV");
  auto* measure = app.add_subcommand("measure", "certified mu(A ∩ T^m B)");
  auto* sweep = app.add_subcommand("sweep", "mixing sweep over stage windows, CSV");
  auto* delays = app.add_subcommand("delays", "delay decomposition and case labels, CSV");
  auto* profile = app.add_subcommand("profile", "delay profile as CSV plus SVG");
  auto* rake_check = app.add_subcommand("rake-check", "conditional mixing bound on a rake");
  auto* bh_check = app.add_subcommand("bh-check", "Blum-Hanson inequality check");
  auto* good = app.add_subcommand("good-density", "fraction of eps-good delays");
  auto* find_q = app.add_subcommand("find-q", "multiplier search q*d in [h_p, 2h_p]");
  for (auto* cmd : {stages, measure, sweep, delays, profile, rake_check, bh_check, good, find_q}) {
    add_common(cmd, ctx.flags);
  }

  measure->add_option("--A", set_a, "stage=<j>:levels=<list>")->required();
  measure->add_option("--B", set_b, "stage=<j>:levels=<list>")->required();
  measure->add_option("--m", shift, "shift")->required();

  sweep->add_option("--A", set_a)->required();
  sweep->add_option("--B", set_b)->required();
  sweep->add_option("--windows", windows, "stage indices j (window [h_j, 2h_j]) or ranges a..b")->required();
  sweep->add_option("--samples", samples, "samples per window");

  delays->add_option("--m", shifts_text, "shifts: list with ranges a..b")->required();
  delays->add_option("--zero-below", zero_below);
  delays->add_option("--inf-above", inf_above);

  profile->add_option("--j", stage_j, "stage")->required();
  profile->add_option("--m", shift)->required();
  profile->add_option("--svg", svg_path, "SVG output (default <out>.svg when --out is given)");

  rake_check->add_option("--A", set_a)->required();
  rake_check->add_option("--B", set_b)->required();
  rake_check->add_option("--m", shift)->required();
  rake_check->add_option("--rake", rake_text, "j=<j>;s=<s>;L=<L>;step=<q>;levels=<lo>..<hi>")->required();
  rake_check->add_option("--delta", delta);

  bh_check->add_option("--B", set_b)->required();
  bh_check->add_option("--d", d_text)->required();
  bh_check->add_option("--L", L);
  bh_check->add_option("--eps", eps);

  good->add_option("--B", set_b)->required();
  good->add_option("--d-lo", d_lo)->required();
  good->add_option("--d-hi", d_hi)->required();
  good->add_option("--L", L);
  good->add_option("--eps", eps);

  find_q->add_option("--d", d_text)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    ctx.load();
    sc::StageTable& table = *ctx.table;
    std::ostringstream os;

    if (stages->parsed()) {
      // without an explicit depth, show what the policy defines (at most 8)
      if (!ctx.requested_stages()) {
        for (int j = 2; j <= kDefaultTableDepth && table.try_extend_to(j); ++j) {
        }
      }
      os << "j,h,r,w,total\n";
      for (int j = 1; j <= table.depth(); ++j) {
        const sc::Stage& s = table.stage(j);
        os << j << ',' << s.h.get_str() << ',' << (s.r ? s.r->get_str() : "") << ',' << sc::to_string(s.w) << ','
           << sc::to_string(s.total) << '\n';
      }
    } else if (measure->parsed()) {
      const auto A = sc::io::parse_level_set(set_a);
      const auto B = sc::io::parse_level_set(set_b);
      os << sc::io::format_interval(sc::measure_intersection(table, A, B, sc::parse_int(shift), ctx.tol())) << '\n';
    } else if (sweep->parsed()) {
      const auto A = sc::io::parse_level_set(set_a);
      const auto B = sc::io::parse_level_set(set_b);
      sc::SweepSampling sampling;
      sampling.samples = samples;
      sampling.seed = ctx.seed();
      std::istringstream items(windows);
      for (std::string item; std::getline(items, item, ',');) {
        if (item.find("..") != std::string::npos) {
          const auto range = sc::io::parse_index_list(item);
          sampling.windows.push_back(sc::RangeWindow{range.front(), range.back()});
        } else {
          sampling.windows.push_back(sc::StageWindow{std::stoi(item)});
        }
      }
      const auto ms = sc::sample_shifts(table, sampling);
      if (!ms.empty()) sc::pre_extend_for_shift(table, ms.back());
      const auto mode = ctx.mode();
      report_mu_ref(mode);
      const auto records = sc::mixing_sweep(table, A, B, sampling, mode, ctx.tol(), ctx.jobs());
      os << "m,lo,hi,target,residual_hi\n";
      for (const auto& r : records) {
        os << r.m.get_str() << ',' << sc::io::format_interval(r.interval) << ',' << sc::to_string(r.target) << ','
           << sc::to_string(r.residual_to_target) << '\n';
      }
    } else if (delays->parsed()) {
      const auto ms = sc::io::parse_index_list(shifts_text);
      if (!ms.empty()) table.extend_until_height(*std::max_element(ms.begin(), ms.end()) + 1);
      const sc::CaseThresholds th{sc::parse_rational(zero_below), sc::parse_rational(inf_above)};
      os << "m,j,h,d,t,ratio,tag\n";
      for (const auto& rec : sc::classify_case(table, ms, th)) {
        os << rec.m.get_str() << ',' << rec.j << ',' << table.stage(rec.j).h.get_str() << ',' << rec.d.get_str()
           << ',' << rec.t.get_str() << ',' << sc::to_string(rec.ratio) << ',' << sc::case_tag_name(rec.tag) << '\n';
      }
    } else if (profile->parsed()) {
      const auto prof = sc::delay_profile(table, stage_j, sc::parse_int(shift));
      os << "col_from,col_to,landing,delay\n";
      for (const auto& seg : prof.segments) {
        os << seg.first_column.get_str() << ',' << seg.last_column.get_str() << ',' << sc::io::landing_text(seg)
           << ',' << sc::io::delay_text(seg) << '\n';
      }
      std::string target = svg_path;
      if (target.empty() && !ctx.out_path().empty()) target = ctx.out_path() + ".svg";
      if (!target.empty()) {
        std::ofstream f(target, std::ios::binary);
        if (!f) throw sc::Error(sc::ErrorCode::InvalidArgument, "cannot write " + target);
        f << sc::svg::render_profile(prof, table.stage(stage_j));
      }
    } else if (rake_check->parsed()) {
      const auto A = sc::io::parse_level_set(set_a);
      const auto B = sc::io::parse_level_set(set_b);
      const auto spec = sc::io::parse_rake_spec(rake_text);
      const auto rake = sc::build_rake(table, spec.j, spec.s, spec.L, spec.step, spec.lo, spec.hi);
      const auto mode = ctx.mode();
      const auto rep = sc::rake_bound_check(table, A, B, sc::parse_int(shift), rake, sc::parse_rational(delta), mode,
                                            ctx.tol());
      if (mode.is_probability()) os << "mu_ref=" << sc::to_string(mode.mu_ref) << '\n';
      os << "lhs=" << sc::io::format_interval(rep.lhs) << '\n'
         << "rhs=" << sc::io::format_interval(rep.rhs) << '\n'
         << "delay=" << rep.delay.get_str() << '\n'
         << "holds=" << bool_text(rep.holds) << '\n'
         << "level_regime=" << bool_text(rep.level_regime) << '\n'
         << "single_domain=" << bool_text(rep.single_domain) << '\n'
         << "valid_regime=" << bool_text(rep.valid_regime) << '\n';
      if (rep.valid_regime && !rep.holds) exit_code = kExitViolation;
    } else if (bh_check->parsed()) {
      const auto B = sc::io::parse_level_set(set_b);
      const auto d = sc::parse_int(d_text);
      sc::pre_extend_for_shift(table, d * (L - 1));
      const auto mode = ctx.mode();
      const auto rep = sc::blum_hanson_check(table, B, d, L, sc::parse_rational(eps), mode, ctx.tol());
      if (mode.is_probability()) os << "mu_ref=" << sc::to_string(mode.mu_ref) << '\n';
      os << "max_cross=" << sc::io::format_interval(rep.max_cross) << '\n'
         << "norm_sq=" << sc::io::format_interval(rep.norm_sq) << '\n'
         << "bound=" << sc::to_string(rep.bound) << '\n'
         << "premise_holds=" << bool_text(rep.premise_holds) << '\n'
         << "conclusion_holds=" << bool_text(rep.conclusion_holds) << '\n';
      if (rep.premise_holds && !rep.conclusion_holds) exit_code = kExitViolation;
    } else if (good->parsed()) {
      const auto B = sc::io::parse_level_set(set_b);
      const auto lo = sc::parse_int(d_lo);
      const auto hi = sc::parse_int(d_hi);
      sc::pre_extend_for_shift(table, hi * (L - 1));
      const auto mode = ctx.mode();
      report_mu_ref(mode);
      const auto rep = sc::good_delay_density(table, B, lo, hi, L, sc::parse_rational(eps), mode, ctx.tol(),
                                              ctx.jobs());
      os << "fraction,good,total\n" << sc::to_string(rep.fraction) << ',' << rep.good << ',' << rep.total << '\n';
    } else if (find_q->parsed()) {
      if (table.depth() < 2) table.extend_to(2);
      const auto d = sc::parse_int(d_text);
      const auto hit = sc::find_multiplier(table, d);
      if (!hit) {
        throw sc::Error(sc::ErrorCode::InvalidArgument,
                        "NotFound: no built stage admits q with q*d in [h_p, 2h_p] for d=" + d.get_str());
      }
      os << "p,q,h_p\n" << hit->p << ',' << hit->q.get_str() << ',' << table.stage(hit->p).h.get_str() << '\n';
    }
    ctx.emit(os.str());
  } catch (const sc::Error& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return exit_code;
}
