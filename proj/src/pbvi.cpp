#include "ozsg/pbvi.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "ozsg/rng.hpp"

namespace ozsg {

namespace {

constexpr double kDedupEpsilon = 1e-9;  // marginal/informed identity threshold

// An informed state is itself a (normalized) occupancy state over one public
// branch; lifting it back lets the transition operator advance it.
OccupancyState to_occupancy(const InformedOccupancy& o) {
  OccupancyState x;
  x.stage = o.stage;
  // Entries sorted by (h2, h1, s) with a constant hp stay sorted under
  // (hp, h2, h1, s).
  x.entries.reserve(o.entries.size());
  for (const InformedEntry& e : o.entries) {
    x.entries.push_back({e.s, e.h1, e.h2, o.hp, e.p});
  }
  return x;
}

double informed_l1(const InformedOccupancy& a, const InformedOccupancy& b) {
  auto key = [](const InformedEntry& e) { return std::tuple(e.h2, e.h1, e.s); };
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.entries.size() && j < b.entries.size()) {
    const auto ka = key(a.entries[i]);
    const auto kb = key(b.entries[j]);
    if (ka == kb) {
      d += std::abs(a.entries[i].p - b.entries[j].p);
      ++i, ++j;
    } else if (ka < kb) {
      d += std::abs(a.entries[i++].p);
    } else {
      d += std::abs(b.entries[j++].p);
    }
  }
  for (; i < a.entries.size(); ++i) d += std::abs(a.entries[i].p);
  for (; j < b.entries.size(); ++j) d += std::abs(b.entries[j].p);
  return d;
}

void require_stage(const SampleBank& bank, int stage) {
  if (stage < 0 || stage >= static_cast<int>(bank.informed.size()))
    throw InternalError("sample bank: stage out of range");
}

}  // namespace

Variant parse_variant(const std::string& name) {
  if (name == "pbvi1") return Variant::Pbvi1;
  if (name == "pbvi2") return Variant::Pbvi2;
  if (name == "pbvi3") return Variant::Pbvi3;
  throw ParseError("unknown variant '" + name + "' (want pbvi1|pbvi2|pbvi3)");
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::Pbvi1: return "pbvi1";
    case Variant::Pbvi2: return "pbvi2";
    case Variant::Pbvi3: return "pbvi3";
  }
  throw InternalError("variant_name: bad enum value");
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Ok: return "ok";
    case SolveStatus::OutOfTime: return "oot";
    case SolveStatus::OutOfMemory: return "oom";
  }
  throw InternalError("status_name: bad enum value");
}

SampleBank init_bank(const GameModel& m, int horizon) {
  if (horizon < 0) throw InternalError("init_bank: negative horizon");
  SampleBank bank;
  bank.informed.resize(horizon + 1);
  bank.marginals.resize(horizon + 1);
  OccupancyState x0 = initial_occupancy(m);
  for (auto& [w, o] : informed_decomposition(x0)) {
    (void)w;
    InformedRecord rec;
    rec.o = std::move(o);
    bank.informed[0].push_back(std::move(rec));
  }
  int gen = 0;
  for (int i = 0; i < static_cast<int>(bank.informed[0].size()); ++i) {
    for (auto& [w, c2] : marginal_decomposition(bank.informed[0][i].o, 2)) {
      (void)w;
      MarginalRecord rec;
      rec.c2 = std::move(c2);
      rec.informed = i;
      rec.generation = gen++;
      bank.marginals[0].push_back(std::move(rec));
    }
  }
  return bank;
}

ValueFunction improve(const GameModel& m, HistoryContext& ctx,
                      const ValueFunction& vf, const SampleBank& bank, int stage,
                      std::vector<std::optional<GreedySolution>>* sols,
                      WorkMeter* meter) {
  require_stage(bank, stage);
  if (stage > vf.horizon()) throw InternalError("improve: stage beyond horizon");
  ValueFunction out = vf;
  const std::vector<InformedRecord>& recs = bank.informed[stage];
  if (sols) {
    sols->clear();
    sols->resize(recs.size());
  }
  std::vector<MarginalOccupancy> samples;
  samples.reserve(bank.marginals[stage].size());
  long long sample_entries = 0;
  for (const MarginalRecord& mr : bank.marginals[stage]) {
    samples.push_back(mr.c2);
    sample_entries += static_cast<long long>(mr.c2.entries.size());
  }
  if (recs.empty() || samples.empty()) return out;

  std::vector<GammaSet> zero;
  const std::vector<GammaSet>* next = nullptr;
  if (stage == vf.horizon()) {
    zero = zero_stage_sets(stage);
    next = &zero;
  } else {
    next = &out.at(stage + 1);
  }
  long long total_alpha = 0;
  for (const GammaSet& set : *next)
    total_alpha += static_cast<long long>(set.alphas.size());
  const long long update_units =
      sample_entries * m.nA1() * m.nA2() * std::max<long long>(1, total_alpha);

  for (std::size_t i = 0; i < recs.size(); ++i) {
    if (!recs[i].active) continue;
    GreedySolution sol = greedy_gamma_lp(m, ctx, recs[i].o, *next);
    if (meter)
      meter->add(static_cast<std::uint64_t>(sol.work) +
                 static_cast<std::uint64_t>(update_units));
    GammaSet ns = gamma_update_set(m, ctx, out, stage, sol, samples);
    // Re-deriving a set that already exists (bitwise) cannot change the
    // pointwise maximum; skipping it keeps converged sweeps from inflating
    // the collection and every later backup's LP with it.
    bool duplicate = false;
    for (const GammaSet& ex : out.at(stage)) {
      if (ex.alphas.size() != ns.alphas.size()) continue;
      bool same = true;
      for (std::size_t a = 0; a < ns.alphas.size() && same; ++a)
        same = ex.alphas[a].default_value == ns.alphas[a].default_value &&
               ex.alphas[a].values == ns.alphas[a].values;
      if (same) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) out.at(stage).push_back(std::move(ns));
    if (sols) (*sols)[i] = std::move(sol);
  }
  return out;
}

namespace {

struct Candidate {
  MarginalOccupancy c2;
  int parent_marginal = -1;  // stage-t marginal index
  int informed_idx = -1;     // stage-t informed owner
  int rule_idx = -1;
  int a2 = -1, z2 = -1, w = -1;
  double mind = 0.0;  // min L1 distance to the (growing) stage-(t+1) bank
  bool taken = false;
};

}  // namespace

ExpandStats expand_stage(const GameModel& m, HistoryContext& ctx,
                         SampleBank& bank, const ValueFunction& vf, int stage,
                         const SolveConfig& cfg, int iter,
                         const std::vector<std::optional<GreedySolution>>* sols,
                         WorkMeter* meter) {
  require_stage(bank, stage);
  require_stage(bank, stage + 1);
  if (cfg.expansion_cap < 1) throw InternalError("expand: cap must be positive");
  ExpandStats stats;
  const std::vector<MarginalRecord>& margs = bank.marginals[stage];
  if (margs.empty()) return stats;
  const int A1 = m.nA1(), A2 = m.nA2(), Z2 = m.nZ2(), W = m.nW();

  // Candidate rules per informed record: the greedy mixture first, then
  // deterministic assignments (all of them when few, otherwise a seeded
  // subsample), 64 in total at most.
  std::map<int, std::vector<DecisionRule>> rule_cache;
  auto rules_for = [&](int idx) -> const std::vector<DecisionRule>& {
    auto it = rule_cache.find(idx);
    if (it != rule_cache.end()) return it->second;
    const InformedRecord& irec = bank.informed[stage][idx];
    const std::vector<int> h1s = own_histories(irec.o, 1);
    const int nh = static_cast<int>(h1s.size());
    std::vector<DecisionRule> rules;
    if (sols && idx < static_cast<int>(sols->size()) && (*sols)[idx]) {
      rules.push_back(rule_from_solution(m, *(*sols)[idx], h1s, irec.o.hp, stage));
    } else {
      GreedySolution sol = greedy_gamma_lp(m, ctx, irec.o, vf.at(stage + 1));
      if (meter) meter->add(static_cast<std::uint64_t>(sol.work));
      rules.push_back(rule_from_solution(m, sol, h1s, irec.o.hp, stage));
    }
    std::set<std::vector<int>> seen;
    auto push_assignment = [&](const std::vector<int>& assign) {
      if (!seen.insert(assign).second) return;
      DecisionRule d;
      d.stage = stage;
      d.player = 1;
      for (int i = 0; i < nh; ++i) {
        std::vector<double> row(A1, 0.0);
        row[assign[i]] = 1.0;
        d.rows[{h1s[i], irec.o.hp}] = std::move(row);
      }
      rules.push_back(std::move(d));
    };
    const int kRuleCap = 63;  // plus the greedy rule
    const double log_total = nh * std::log2(static_cast<double>(A1));
    if (log_total <= 20.0 &&
        std::llround(std::pow(static_cast<double>(A1), nh)) <= kRuleCap) {
      std::vector<int> assign(nh, 0);
      while (true) {
        push_assignment(assign);
        int pos = nh - 1;
        while (pos >= 0 && ++assign[pos] == A1) assign[pos--] = 0;
        if (pos < 0) break;
      }
    } else {
      RngStream rs(cfg.seed, "expand-rules:" + std::to_string(iter) + ":" +
                                 std::to_string(stage) + ":" + std::to_string(idx));
      for (int k = 0; k < kRuleCap; ++k) {
        std::vector<int> assign(nh);
        for (int i = 0; i < nh; ++i)
          assign[i] = static_cast<int>(rs.next_below(A1));
        push_assignment(assign);
      }
    }
    return rule_cache.emplace(idx, std::move(rules)).first->second;
  };

  // Every positive-probability opponent branch of every banked marginal under
  // every candidate rule, in deterministic generation order.
  std::vector<Candidate> cands;
  for (int mi = 0; mi < static_cast<int>(margs.size()); ++mi) {
    const MarginalRecord& mr = margs[mi];
    const std::vector<DecisionRule>& rules = rules_for(mr.informed);
    for (int ri = 0; ri < static_cast<int>(rules.size()); ++ri)
      for (int a2 = 0; a2 < A2; ++a2)
        for (int z2 = 0; z2 < Z2; ++z2)
          for (int w = 0; w < W; ++w) {
            auto [pr, nc2] = next_marginal(m, ctx, mr.c2, rules[ri], a2, z2, w);
            if (meter)
              meter->add(static_cast<std::uint64_t>(mr.c2.entries.size()) * A1 * 4);
            if (pr <= kDedupEpsilon) continue;
            Candidate c;
            c.c2 = std::move(nc2);
            c.parent_marginal = mi;
            c.informed_idx = mr.informed;
            c.rule_idx = ri;
            c.a2 = a2, c.z2 = z2, c.w = w;
            cands.push_back(std::move(c));
          }
  }
  if (cands.empty()) return stats;

  std::vector<MarginalRecord>& next_margs = bank.marginals[stage + 1];
  std::vector<InformedRecord>& next_inf = bank.informed[stage + 1];
  const int before = static_cast<int>(next_margs.size());
  // Doubling growth bound once the stage is seeded; the cap alone bounds the
  // bootstrap round that first populates an empty stage.
  const int allowed = before > 0 ? std::min(before, cfg.expansion_cap)
                                 : cfg.expansion_cap;

  for (Candidate& c : cands) {
    c.mind = std::numeric_limits<double>::infinity();
    for (const MarginalRecord& ex : next_margs)
      c.mind = std::min(c.mind, l1_distance(c.c2, ex.c2));
    if (meter)
      meter->add(static_cast<std::uint64_t>(next_margs.size()) *
                 (c.c2.entries.size() + 4));
  }

  // (informed_idx, rule_idx, w) -> reconstructed informed index at stage+1;
  // -1 when the public branch vanished below the support cutoff.
  std::map<std::tuple<int, int, int>, int> informed_memo;
  auto reconstruct = [&](const Candidate& c) -> int {
    const auto key = std::tuple(c.informed_idx, c.rule_idx, c.w);
    auto it = informed_memo.find(key);
    if (it != informed_memo.end()) return it->second;
    const InformedRecord& parent = bank.informed[stage][c.informed_idx];
    const DecisionRule& d1 = rules_for(c.informed_idx)[c.rule_idx];
    OccupancyState x = to_occupancy(parent.o);
    OccupancyState x1 = next_occupancy(m, ctx, x, d1, uniform_rule(m, x, 2));
    if (meter)
      meter->add(static_cast<std::uint64_t>(x.entries.size()) * A1 * A2 * 8);
    const int hp1 = ctx.pub.child(parent.o.hp, c.w);
    int found = -1;
    for (auto& [wt, comp] : informed_decomposition(x1)) {
      (void)wt;
      if (comp.hp != hp1) continue;
      for (int i = 0; i < static_cast<int>(next_inf.size()); ++i)
        if (next_inf[i].o.hp == hp1 &&
            informed_l1(next_inf[i].o, comp) <= kDedupEpsilon) {
          found = i;
          break;
        }
      if (found < 0) {
        InformedRecord rec;
        rec.o = std::move(comp);
        rec.parent = c.informed_idx;
        rec.d1 = d1;
        rec.w = c.w;
        next_inf.push_back(std::move(rec));
        found = static_cast<int>(next_inf.size()) - 1;
      }
      break;
    }
    informed_memo.emplace(key, found);
    return found;
  };

  while (stats.added < allowed) {
    int best = -1;
    for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
      if (cands[i].taken) continue;
      if (best < 0 || cands[i].mind > cands[best].mind) best = i;
    }
    if (best < 0 || cands[best].mind <= kDedupEpsilon) break;
    Candidate& c = cands[best];
    c.taken = true;
    const int inf_idx = reconstruct(c);
    if (inf_idx < 0) continue;  // branch lost to the support cutoff; skip
    MarginalRecord rec;
    rec.c2 = c.c2;
    rec.informed = inf_idx;
    rec.parent = c.parent_marginal;
    rec.d1 = rules_for(c.informed_idx)[c.rule_idx];
    rec.a2 = c.a2, rec.z2 = c.z2, rec.w = c.w;
    rec.generation = static_cast<int>(next_margs.size());
    next_margs.push_back(std::move(rec));
    stats.max_added_distance = std::max(stats.max_added_distance, c.mind);
    ++stats.added;
    for (Candidate& o : cands) {
      if (o.taken) continue;
      o.mind = std::min(o.mind, l1_distance(o.c2, c.c2));
    }
    if (meter)
      meter->add(static_cast<std::uint64_t>(cands.size()) *
                 (c.c2.entries.size() + 4));
  }
  for (const Candidate& c : cands)
    if (!c.taken)
      stats.max_left_distance = std::max(stats.max_left_distance, c.mind);
  return stats;
}

int bounded_pruning(ValueFunction& vf, const SampleBank& bank, int stage) {
  require_stage(bank, stage);
  if (stage > vf.horizon()) throw InternalError("bounded_pruning: bad stage");
  std::vector<GammaSet>& sets = vf.at(stage);
  const std::vector<InformedRecord>& recs = bank.informed[stage];
  if (sets.empty() || recs.empty()) return 0;
  for (GammaSet& s : sets) s.refcount = 0;
  for (const InformedRecord& rec : recs) {
    const InformedEval ev = evaluate_informed_detail(vf, rec.o);
    if (ev.best_set >= 0) ++sets[ev.best_set].refcount;
  }
  std::vector<GammaSet> kept;
  kept.reserve(sets.size());
  int removed = 0;
  for (GammaSet& s : sets) {
    if (s.refcount > 0)
      kept.push_back(std::move(s));
    else
      ++removed;
  }
  if (kept.empty()) throw InternalError("bounded_pruning: no winner survived");
  sets = std::move(kept);
  return removed;
}

int prune_states(const ValueFunction& vf, SampleBank& bank, int stage,
                 double epsilon) {
  require_stage(bank, stage);
  if (stage > vf.horizon()) throw InternalError("prune_states: bad stage");
  if (epsilon < 0.0) throw InternalError("prune_states: negative epsilon");
  std::vector<InformedRecord>& recs = bank.informed[stage];
  const std::vector<GammaSet>& sets = vf.at(stage);
  if (recs.empty()) return 0;
  if (sets.empty()) {
    for (InformedRecord& r : recs) r.active = true;
    return 0;
  }
  std::vector<int> kept_winner;
  std::vector<const InformedOccupancy*> kept_states;
  int masked = 0;
  for (InformedRecord& r : recs) {
    const auto dec = marginal_decomposition(r.o, 2);
    const InformedEval ev = evaluate_informed_detail(vf, r.o);
    bool redundant = false;
    for (std::size_t k = 0; k < kept_winner.size() && !redundant; ++k) {
      const GammaSet& other = sets[kept_winner[k]];
      double v = 0.0;
      for (const auto& [w, c2] : dec) v += w * min_alpha(other, c2).value;
      redundant = std::abs(v - ev.value) <= epsilon;
    }
    r.active = !redundant;
    if (redundant) {
      ++masked;
    } else {
      kept_states.push_back(&r.o);
      kept_winner.push_back(ev.best_set);
    }
  }
  return masked;
}

SolveResult solve(const GameModel& m, HistoryContext& ctx, const SolveConfig& cfg,
                  const EvalHook& hook, const SampleBank* initial_bank,
                  const ValueFunction* initial_vf) {
  const int horizon = cfg.horizon >= 0 ? cfg.horizon : m.default_horizon;
  if (horizon < 0)
    throw InternalError("solve: no horizon given and the model declares none");
  if (cfg.expansion_cap < 1)
    throw InternalError("solve: expansion cap must be positive");
  if (cfg.prune_epsilon < 0.0)
    throw InternalError("solve: negative prune epsilon");
  if (cfg.eval_every < 0) throw InternalError("solve: negative eval cadence");

  SolveResult res;
  if (initial_vf) {
    if (initial_vf->horizon() != horizon)
      throw InternalError("solve: initial value function horizon mismatch");
    res.vf = *initial_vf;
  } else {
    res.vf = init_value_function(m, horizon);
  }
  if (initial_bank) {
    if (static_cast<int>(initial_bank->informed.size()) != horizon + 1 ||
        initial_bank->informed.empty() || initial_bank->informed[0].empty())
      throw InternalError("solve: initial bank does not match the horizon");
    res.bank = *initial_bank;
  } else {
    res.bank = init_bank(m, horizon);
  }

  ResourceGuard guard;
  guard.set_budget_seconds(cfg.budget_seconds);
  guard.set_memory_cap_mib(cfg.memory_cap_mib);
  WorkMeter meter;
  const InformedOccupancy root = res.bank.informed[0][0].o;

  double prev_value = 0.0;
  bool have_prev = false;
  res.status = SolveStatus::Ok;
  try {
    for (int iter = 1;; ++iter) {
      res.iterations = iter;
      if (cfg.variant == Variant::Pbvi3)
        for (int t = 0; t <= horizon; ++t)
          prune_states(res.vf, res.bank, t, cfg.prune_epsilon);
      std::vector<std::vector<std::optional<GreedySolution>>> cache(horizon + 1);
      for (int t = horizon; t >= 0; --t) {
        res.vf = improve(m, ctx, res.vf, res.bank, t, &cache[t], &meter);
        guard.check();
      }
      if (cfg.variant != Variant::Pbvi1)
        for (int t = 0; t <= horizon; ++t) bounded_pruning(res.vf, res.bank, t);
      const double value = evaluate_informed(res.vf, root);
      double max_added = 0.0, max_left = 0.0;
      if (!cfg.frozen_bank) {
        for (int t = 0; t < horizon; ++t) {
          const ExpandStats st =
              expand_stage(m, ctx, res.bank, res.vf, t, cfg, iter, &cache[t], &meter);
          max_added = std::max(max_added, st.max_added_distance);
          max_left = std::max(max_left, st.max_left_distance);
          guard.check();
        }
      }
      ProgressRow row;
      row.iter = iter;
      row.cumul_time = meter.virtual_seconds();
      row.value = value;
      if (hook && cfg.eval_every > 0 && iter % cfg.eval_every == 0)
        row.exp_value = hook(res.vf, res.bank);
      res.progress.push_back(row);
      res.value = value;
      res.delta_estimate = max_left;
      const bool converged =
          have_prev && value - prev_value < 1e-4 && max_added <= 1e-6;
      prev_value = value;
      have_prev = true;
      if (converged) break;
      if (cfg.max_iterations > 0 && iter >= cfg.max_iterations) break;
    }
  } catch (const OutOfTime&) {
    res.status = SolveStatus::OutOfTime;
  } catch (const OutOfMemory&) {
    res.status = SolveStatus::OutOfMemory;
  }
  res.wall_seconds = guard.elapsed_seconds();
  res.work_units = meter.units();
  return res;
}

void progress_csv(const std::vector<ProgressRow>& rows, std::ostream& os) {
  os << "iter,cumul_time,value,exp_value\n";
  for (const ProgressRow& r : rows) {
    os << r.iter << ',' << csv_double(r.cumul_time) << ',' << csv_double(r.value)
       << ',';
    if (r.exp_value) os << csv_double(*r.exp_value);
    os << '\n';
  }
}

// ---------------------------------------------------------------------------
// Checkpoint io

namespace {

template <typename T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw ParseError("checkpoint: truncated stream");
  return v;
}

constexpr std::uint32_t kCkMagic = 0x4B435A4Fu;  // "OZCK"
constexpr std::uint32_t kCkVersion = 1;

void put_rule(std::ostream& os, const DecisionRule& d) {
  put<std::int32_t>(os, d.stage);
  put<std::int32_t>(os, d.player);
  put<std::uint64_t>(os, d.rows.size());
  for (const auto& [key, dist] : d.rows) {
    put<std::int32_t>(os, key.first);
    put<std::int32_t>(os, key.second);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(dist.size()));
    for (double v : dist) put<double>(os, v);
  }
}

DecisionRule get_rule(std::istream& is) {
  DecisionRule d;
  d.stage = get<std::int32_t>(is);
  d.player = get<std::int32_t>(is);
  const std::uint64_t rows = get<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < rows; ++i) {
    const int h = get<std::int32_t>(is);
    const int hp = get<std::int32_t>(is);
    const std::uint32_t len = get<std::uint32_t>(is);
    if (len > 1u << 20) throw ParseError("checkpoint: implausible rule row");
    std::vector<double> dist(len);
    for (auto& v : dist) v = get<double>(is);
    d.rows[{h, hp}] = std::move(dist);
  }
  return d;
}

void put_informed(std::ostream& os, const InformedOccupancy& o) {
  put<std::int32_t>(os, o.stage);
  put<std::int32_t>(os, o.hp);
  put<std::uint64_t>(os, o.entries.size());
  for (const InformedEntry& e : o.entries) {
    put<std::int32_t>(os, e.s);
    put<std::int32_t>(os, e.h1);
    put<std::int32_t>(os, e.h2);
    put<double>(os, e.p);
  }
}

InformedOccupancy get_informed(std::istream& is) {
  InformedOccupancy o;
  o.stage = get<std::int32_t>(is);
  o.hp = get<std::int32_t>(is);
  const std::uint64_t n = get<std::uint64_t>(is);
  o.entries.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    InformedEntry e;
    e.s = get<std::int32_t>(is);
    e.h1 = get<std::int32_t>(is);
    e.h2 = get<std::int32_t>(is);
    e.p = get<double>(is);
    o.entries.push_back(e);
  }
  return o;
}

void put_marginal(std::ostream& os, const MarginalOccupancy& c) {
  put<std::int32_t>(os, c.stage);
  put<std::int32_t>(os, c.hp);
  put<std::int32_t>(os, c.player);
  put<std::int32_t>(os, c.own_h);
  put<std::uint64_t>(os, c.entries.size());
  for (const MarginalEntry& e : c.entries) {
    put<std::int32_t>(os, e.s);
    put<std::int32_t>(os, e.h);
    put<double>(os, e.p);
  }
}

MarginalOccupancy get_marginal(std::istream& is) {
  MarginalOccupancy c;
  c.stage = get<std::int32_t>(is);
  c.hp = get<std::int32_t>(is);
  c.player = get<std::int32_t>(is);
  c.own_h = get<std::int32_t>(is);
  const std::uint64_t n = get<std::uint64_t>(is);
  c.entries.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    MarginalEntry e;
    e.s = get<std::int32_t>(is);
    e.h = get<std::int32_t>(is);
    e.p = get<double>(is);
    c.entries.push_back(e);
  }
  return c;
}

}  // namespace

void save_checkpoint(const HistoryContext& ctx, const ValueFunction& vf,
                     const SampleBank& bank, std::ostream& os) {
  put<std::uint32_t>(os, kCkMagic);
  put<std::uint32_t>(os, kCkVersion);
  put<std::int32_t>(os, ctx.h1.size());
  for (int h = 1; h < ctx.h1.size(); ++h) {
    put<std::int32_t>(os, ctx.h1.parent(h));
    put<std::int32_t>(os, ctx.h1.action(h));
    put<std::int32_t>(os, ctx.h1.obs(h));
  }
  put<std::int32_t>(os, ctx.h2.size());
  for (int h = 1; h < ctx.h2.size(); ++h) {
    put<std::int32_t>(os, ctx.h2.parent(h));
    put<std::int32_t>(os, ctx.h2.action(h));
    put<std::int32_t>(os, ctx.h2.obs(h));
  }
  put<std::int32_t>(os, ctx.pub.size());
  for (int h = 1; h < ctx.pub.size(); ++h) {
    put<std::int32_t>(os, ctx.pub.parent(h));
    put<std::int32_t>(os, ctx.pub.obs(h));
  }
  save_value_function(vf, os);
  put<std::int32_t>(os, static_cast<int>(bank.informed.size()));
  for (std::size_t t = 0; t < bank.informed.size(); ++t) {
    put<std::uint64_t>(os, bank.informed[t].size());
    for (const InformedRecord& r : bank.informed[t]) {
      put_informed(os, r.o);
      put<std::int32_t>(os, r.parent);
      put_rule(os, r.d1);
      put<std::int32_t>(os, r.w);
      put<std::uint8_t>(os, r.active ? 1 : 0);
    }
    put<std::uint64_t>(os, bank.marginals[t].size());
    for (const MarginalRecord& r : bank.marginals[t]) {
      put_marginal(os, r.c2);
      put<std::int32_t>(os, r.informed);
      put<std::int32_t>(os, r.parent);
      put_rule(os, r.d1);
      put<std::int32_t>(os, r.a2);
      put<std::int32_t>(os, r.z2);
      put<std::int32_t>(os, r.w);
      put<std::int32_t>(os, r.generation);
    }
  }
}

void load_checkpoint(std::istream& is, HistoryContext& ctx, ValueFunction& vf,
                     SampleBank& bank) {
  if (get<std::uint32_t>(is) != kCkMagic)
    throw ParseError("checkpoint: bad magic");
  if (get<std::uint32_t>(is) != kCkVersion)
    throw ParseError("checkpoint: unsupported version");
  if (ctx.h1.size() != 1 || ctx.h2.size() != 1 || ctx.pub.size() != 1)
    throw InternalError("load_checkpoint: history tables must be fresh");
  const int n1 = get<std::int32_t>(is);
  for (int h = 1; h < n1; ++h) {
    const int parent = get<std::int32_t>(is);
    const int action = get<std::int32_t>(is);
    const int obs = get<std::int32_t>(is);
    if (parent < 0 || parent >= h)
      throw ParseError("checkpoint: non-canonical history table");
    if (ctx.h1.child(parent, action, obs) != h)
      throw ParseError("checkpoint: non-canonical history table");
  }
  const int n2 = get<std::int32_t>(is);
  for (int h = 1; h < n2; ++h) {
    const int parent = get<std::int32_t>(is);
    const int action = get<std::int32_t>(is);
    const int obs = get<std::int32_t>(is);
    if (parent < 0 || parent >= h)
      throw ParseError("checkpoint: non-canonical history table");
    if (ctx.h2.child(parent, action, obs) != h)
      throw ParseError("checkpoint: non-canonical history table");
  }
  const int np = get<std::int32_t>(is);
  for (int h = 1; h < np; ++h) {
    const int parent = get<std::int32_t>(is);
    const int obs = get<std::int32_t>(is);
    if (parent < 0 || parent >= h)
      throw ParseError("checkpoint: non-canonical history table");
    if (ctx.pub.child(parent, obs) != h)
      throw ParseError("checkpoint: non-canonical history table");
  }
  vf = load_value_function(is);
  const int stages = get<std::int32_t>(is);
  if (stages < 1 || stages > 1000000)
    throw ParseError("checkpoint: implausible stage count");
  bank.informed.assign(stages, {});
  bank.marginals.assign(stages, {});
  for (int t = 0; t < stages; ++t) {
    const std::uint64_t ni = get<std::uint64_t>(is);
    for (std::uint64_t i = 0; i < ni; ++i) {
      InformedRecord r;
      r.o = get_informed(is);
      r.parent = get<std::int32_t>(is);
      r.d1 = get_rule(is);
      r.w = get<std::int32_t>(is);
      r.active = get<std::uint8_t>(is) != 0;
      bank.informed[t].push_back(std::move(r));
    }
    const std::uint64_t nm = get<std::uint64_t>(is);
    for (std::uint64_t i = 0; i < nm; ++i) {
      MarginalRecord r;
      r.c2 = get_marginal(is);
      r.informed = get<std::int32_t>(is);
      r.parent = get<std::int32_t>(is);
      r.d1 = get_rule(is);
      r.a2 = get<std::int32_t>(is);
      r.z2 = get<std::int32_t>(is);
      r.w = get<std::int32_t>(is);
      r.generation = get<std::int32_t>(is);
      bank.marginals[t].push_back(std::move(r));
    }
  }
}

}  // namespace ozsg
