#include "staircase/oracle.hpp"

#include <sstream>
#include <stdexcept>
#include <variant>

#include "staircase/dynamics.hpp"

namespace staircase::oracle {

namespace {

std::int64_t small(const Int& x, const char* what) {
  if (!x.fits_slong_p()) throw Error(ErrorCode::ResourceLimit, std::string(what) + " too large for the oracle");
  return x.get_si();
}

/// Tower layout rebuilt from the definition: cut E_j into r_j pieces, put s_j(i)
/// spacers over piece i, and stack piece i+1 on top of those spacers.
class Layout {
 public:
  Layout(const ConstructionParams& params, int K) : params_(params) {
    heights_.push_back(small(params.h1, "h1"));
    for (int j = 1; j < K; ++j) {
      const std::int64_t h = heights_.back();
      const std::int64_t r = cut(j, h);
      std::vector<std::int64_t> bottoms;
      std::int64_t next = 0;
      for (std::int64_t i = 1; i <= r; ++i) {
        bottoms.push_back(next);
        next += h + 1 + spacer(j, i);
        if (next > kMaxCells + 1) throw Error(ErrorCode::ResourceLimit, "oracle tower exceeds the cell budget");
      }
      cuts_.push_back(r);
      bottoms_.push_back(std::move(bottoms));
      heights_.push_back(next - 1);
    }
  }

  std::int64_t height(int j) const { return heights_[static_cast<std::size_t>(j - 1)]; }
  std::int64_t cut_count(int j) const { return cuts_[static_cast<std::size_t>(j - 1)]; }
  const std::vector<std::int64_t>& bottoms(int j) const { return bottoms_[static_cast<std::size_t>(j - 1)]; }

  /// Cells of tower K covered by the given levels of tower `stage`.
  std::vector<std::int64_t> cells(const LevelSet& set, int K) const {
    std::vector<std::int64_t> current;
    for (const auto& v : set.levels) current.push_back(small(v, "level"));
    for (int j = set.stage; j < K; ++j) {
      std::vector<std::int64_t> next;
      for (std::int64_t bottom : bottoms(j)) {
        for (std::int64_t c : current) next.push_back(bottom + c);
      }
      current = std::move(next);
    }
    return current;
  }

 private:
  std::int64_t cut(int j, std::int64_t h) const {
    std::int64_t r = 0;
    if (const auto* e = std::get_if<ExplicitCuts>(&params_.cuts)) {
      if (static_cast<std::size_t>(j) > e->cuts.size()) {
        throw Error(ErrorCode::DepthInsufficient, "cut list ends before the oracle stage");
      }
      r = small(e->cuts[static_cast<std::size_t>(j - 1)], "cut");
    } else if (const auto* a = std::get_if<AffineCuts>(&params_.cuts)) {
      r = small(a->a, "cut") * j + small(a->b, "cut");
    } else {
      r = h;
    }
    if (r < 2) throw Error(ErrorCode::PolicyUndefined, "cut count below 2");
    return r;
  }

  std::int64_t spacer(int j, std::int64_t i) const {
    if (std::holds_alternative<StaircaseSpacers>(params_.spacers)) return i - 1;
    if (const auto* c = std::get_if<ConstantSpacers>(&params_.spacers)) return small(c->k, "spacer");
    const auto& rows = std::get<ExplicitSpacers>(params_.spacers).per_stage;
    return small(rows.at(static_cast<std::size_t>(j - 1)).at(static_cast<std::size_t>(i - 1)), "spacer");
  }

  const ConstructionParams& params_;
  std::vector<std::int64_t> heights_;
  std::vector<std::int64_t> cuts_;
  std::vector<std::vector<std::int64_t>> bottoms_;
};

Rational width(const ConstructionParams& params, const Layout& layout, int K) {
  Rational w = params.base_width;
  for (int j = 1; j < K; ++j) w /= Rational(static_cast<long>(layout.cut_count(j)));
  return w;
}

}  // namespace

int deepest_stage(const ConstructionParams& params, int at_least) {
  int K = 1;
  for (;;) {
    try {
      Layout probe(params, K + 1);
      if (probe.height(K + 1) > kMaxCells) break;
    } catch (const std::exception&) {
      break;  // policy exhausted or budget exceeded
    }
    ++K;
  }
  return std::max(K, at_least);
}

OracleResult oracle_measure_intersection(const ConstructionParams& params, const LevelSet& A, const LevelSet& B,
                                         std::int64_t m, int K) {
  if (K < A.stage || K < B.stage) throw Error(ErrorCode::DepthInsufficient, "oracle stage below the operands");
  if (m < 0) throw Error(ErrorCode::InvalidArgument, "m must be >= 0");
  const Layout layout(params, K);
  const std::int64_t top = layout.height(K);
  if (m > top) throw Error(ErrorCode::DepthInsufficient, "shift exceeds the oracle tower");

  std::vector<char> in_b(static_cast<std::size_t>(top + 1), 0);
  for (std::int64_t c : layout.cells(B, K)) in_b[static_cast<std::size_t>(c)] = 1;

  std::int64_t hits = 0;
  std::int64_t unknown = 0;
  for (std::int64_t c : layout.cells(A, K)) {
    if (c + m > top) {
      ++unknown;
    } else if (in_b[static_cast<std::size_t>(c + m)]) {
      ++hits;
    }
  }
  const Rational w = width(params, layout, K);
  return {w * Rational(static_cast<long>(hits)), w * Rational(static_cast<long>(unknown))};
}

CheckReport oracle_check(StageTable& table, const std::vector<Instance>& instances) {
  CheckReport report;
  const ConstructionParams& params = table.params();
  for (std::size_t k = 0; k < instances.size(); ++k) {
    const Instance& inst = instances[k];
    CheckEntry entry;
    entry.index = k;
    entry.K = inst.K > 0 ? inst.K : deepest_stage(params, std::max(inst.A.stage, inst.B.stage));
    entry.certified = measure_intersection(table, inst.A, inst.B, inst.m, inst.tol);
    entry.oracle = oracle_measure_intersection(params, inst.B, inst.A, small(inst.m, "shift"), entry.K);
    entry.compatible = entry.certified.overlaps({entry.oracle.lo(), entry.oracle.hi()});
    if (!entry.compatible) {
      std::ostringstream os;
      os << "instance " << k << ": A@" << inst.A.stage << " B@" << inst.B.stage << " m=" << inst.m.get_str()
         << " certified [" << entry.certified.lo.get_str() << ", " << entry.certified.hi.get_str() << "] oracle "
         << entry.oracle.value.get_str() << " +- " << entry.oracle.error_bound.get_str() << " at K=" << entry.K;
      entry.detail = os.str();
      ++report.failures;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace staircase::oracle
