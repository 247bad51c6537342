#include "ozsg/policy.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "ozsg/common.hpp"

namespace ozsg {

namespace {

// "a,z;a,z" from root to the node; "-" for the root itself.
std::string encode_private(const HistoryTable& t, int h) {
  if (h == HistoryTable::kRoot) return "-";
  std::vector<std::pair<int, int>> steps;
  for (int cur = h; cur != HistoryTable::kRoot; cur = t.parent(cur)) {
    steps.emplace_back(t.action(cur), t.obs(cur));
  }
  std::reverse(steps.begin(), steps.end());
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(steps[i].first);
    out += ',';
    out += std::to_string(steps[i].second);
  }
  return out;
}

// "w;w" from root to the node; "-" for the root itself.
std::string encode_public(const PubHistoryTable& t, int hp) {
  if (hp == PubHistoryTable::kRoot) return "-";
  std::vector<int> steps;
  for (int cur = hp; cur != PubHistoryTable::kRoot; cur = t.parent(cur)) {
    steps.push_back(t.obs(cur));
  }
  std::reverse(steps.begin(), steps.end());
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i) out += ';';
    out += std::to_string(steps[i]);
  }
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

int decode_private(HistoryTable& t, const std::string& path, int line) {
  if (path == "-") return HistoryTable::kRoot;
  int cur = HistoryTable::kRoot;
  for (const std::string& step : split_on(path, ';')) {
    auto av = split_on(step, ',');
    long long a = 0, z = 0;
    if (av.size() != 2 || !parse_int(av[0], a) || !parse_int(av[1], z) || a < 0 || z < 0) {
      throw ParseError("bad history step '" + step + "'", line);
    }
    cur = t.child(cur, static_cast<int>(a), static_cast<int>(z));
  }
  return cur;
}

int decode_public(PubHistoryTable& t, const std::string& path, int line) {
  if (path == "-") return PubHistoryTable::kRoot;
  int cur = PubHistoryTable::kRoot;
  for (const std::string& step : split_on(path, ';')) {
    long long w = 0;
    if (!parse_int(step, w) || w < 0) {
      throw ParseError("bad public step '" + step + "'", line);
    }
    cur = t.child(cur, static_cast<int>(w));
  }
  return cur;
}

}  // namespace

bool FocalPolicy::has_row(int stage, int h, int hp) const {
  if (stage < 0 || stage >= static_cast<int>(rows.size())) return false;
  return rows[stage].count({h, hp}) > 0;
}

std::vector<double> FocalPolicy::row(int stage, int h, int hp) const {
  if (stage >= 0 && stage < static_cast<int>(rows.size())) {
    auto it = rows[stage].find({h, hp});
    if (it != rows[stage].end()) return it->second;
  }
  if (num_actions <= 0) throw InternalError("FocalPolicy::row: empty policy");
  return std::vector<double>(num_actions, 1.0 / num_actions);
}

void save_policy(const FocalPolicy& p, const HistoryContext& ctx, std::ostream& os) {
  const HistoryTable& own = (p.player == 1) ? ctx.h1 : ctx.h2;
  os << "ozsg-policy v1\n";
  os << "player " << p.player << "\n";
  os << "horizon " << p.horizon << "\n";
  os << "actions " << p.num_actions << "\n";
  os << "fallback " << p.fallback << "\n";
  std::size_t n = 0;
  for (const auto& stage_rows : p.rows) n += stage_rows.size();
  os << "rows " << n << "\n";
  for (std::size_t t = 0; t < p.rows.size(); ++t) {
    for (const auto& [key, dist] : p.rows[t]) {
      os << t << " " << encode_private(own, key.first) << " "
         << encode_public(ctx.pub, key.second);
      for (double v : dist) os << " " << csv_double(v);
      os << "\n";
    }
  }
}

FocalPolicy load_policy(std::istream& is, HistoryContext& ctx) {
  FocalPolicy p;
  std::string line;
  int lineno = 1;
  if (!std::getline(is, line) || line != "ozsg-policy v1") {
    throw ParseError("expected 'ozsg-policy v1' header", lineno);
  }
  long long player = 0, horizon = 0, actions = 0, nrows = 0;
  auto read_kv = [&](const std::string& key, std::string& value) {
    ++lineno;
    if (!std::getline(is, line)) throw ParseError("unexpected end of policy file", lineno);
    auto toks = split_ws(line);
    if (toks.size() != 2 || toks[0] != key) {
      throw ParseError("expected '" + key + " <value>'", lineno);
    }
    value = toks[1];
  };
  std::string v;
  read_kv("player", v);
  if (!parse_int(v, player) || (player != 1 && player != 2)) {
    throw ParseError("player must be 1 or 2", lineno);
  }
  read_kv("horizon", v);
  if (!parse_int(v, horizon) || horizon < 0) throw ParseError("bad horizon", lineno);
  read_kv("actions", v);
  if (!parse_int(v, actions) || actions <= 0) throw ParseError("bad action count", lineno);
  read_kv("fallback", v);
  if (v != "uniform") throw ParseError("unknown fallback '" + v + "'", lineno);
  read_kv("rows", v);
  if (!parse_int(v, nrows) || nrows < 0) throw ParseError("bad row count", lineno);

  p.player = static_cast<int>(player);
  p.horizon = static_cast<int>(horizon);
  p.num_actions = static_cast<int>(actions);
  p.fallback = "uniform";
  p.rows.resize(p.horizon + 1);

  HistoryTable& own = (p.player == 1) ? ctx.h1 : ctx.h2;
  for (long long i = 0; i < nrows; ++i) {
    ++lineno;
    if (!std::getline(is, line)) throw ParseError("unexpected end of policy file", lineno);
    auto toks = split_ws(line);
    if (static_cast<long long>(toks.size()) != 3 + actions) {
      throw ParseError("policy row needs stage, two paths, and " +
                           std::to_string(actions) + " probabilities",
                       lineno);
    }
    long long stage = 0;
    if (!parse_int(toks[0], stage) || stage < 0 || stage > horizon) {
      throw ParseError("bad stage", lineno);
    }
    int h = decode_private(own, toks[1], lineno);
    int hp = decode_public(ctx.pub, toks[2], lineno);
    std::vector<double> dist(actions);
    double sum = 0.0;
    for (long long a = 0; a < actions; ++a) {
      if (!parse_double(toks[3 + a], dist[a]) || dist[a] < -1e-12 ||
          !std::isfinite(dist[a])) {
        throw ParseError("bad probability '" + toks[3 + a] + "'", lineno);
      }
      dist[a] = std::max(0.0, dist[a]);
      sum += dist[a];
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw ParseError("policy row does not sum to 1", lineno);
    }
    for (double& x : dist) x /= sum;
    if (!p.rows[stage].emplace(std::make_pair(h, hp), std::move(dist)).second) {
      throw ParseError("duplicate policy row", lineno);
    }
  }
  return p;
}

}  // namespace ozsg
