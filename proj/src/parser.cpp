#include "ozsg/common.hpp"
#include "ozsg/game.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

namespace ozsg {
namespace {

std::string strip_comment(const std::string& line) {
  auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

int lookup(const std::vector<std::string>& names, const std::string& tok,
           const char* what, int line) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == tok) return static_cast<int>(i);
  long long idx;
  if (parse_int(tok, idx) && idx >= 0 && idx < static_cast<long long>(names.size()))
    return static_cast<int>(idx);
  throw ParseError(std::string("unknown ") + what + " '" + tok + "'", line);
}

double number(const std::string& tok, const char* what, int line) {
  double v;
  if (!parse_double(tok, v)) throw ParseError(std::string("bad ") + what + " '" + tok + "'", line);
  return v;
}

void check_symbols(const std::vector<std::string>& syms, const char* what, int line) {
  if (syms.empty()) throw ParseError(std::string(what) + " declaration is empty", line);
  std::set<std::string> seen;
  for (const auto& s : syms) {
    if (!seen.insert(s).second)
      throw ParseError(std::string("duplicate ") + what + " symbol '" + s + "'", line);
    long long dummy;
    if (parse_int(s, dummy))
      throw ParseError(std::string(what) + " symbol '" + s + "' must not be a bare integer", line);
  }
}

}  // namespace

GameModel parse_game(const std::string& text) {
  GameModel m;
  m.pubobs.clear();
  bool have_states = false, have_a1 = false, have_a2 = false, have_o1 = false,
       have_o2 = false, have_pub = false, have_start = false;
  bool tables_allocated = false;
  std::set<std::uint64_t> seen_t;     // duplicate T-line detection
  std::set<std::uint64_t> seen_r;     // duplicate R-line detection
  struct PendingT {
    int line;
    std::vector<std::string> toks;  // s a1 a2 s' z1 z2 w prob
  };
  std::vector<PendingT> pend_t;
  struct PendingR {
    int line;
    std::vector<std::string> toks;  // s a1 a2 value
  };
  std::vector<PendingR> pend_r;

  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = strip_comment(raw);
    if (blank(line)) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos)
      throw ParseError("expected 'key: value' or a T:/R: line", lineno);
    std::string key = line.substr(0, colon);
    // Trim key.
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.front()))) key.erase(key.begin());
    std::string rest = line.substr(colon + 1);

    if (key == "name") {
      auto toks = split_ws(rest);
      if (toks.size() != 1) throw ParseError("name: takes exactly one token", lineno);
      m.name = toks[0];
    } else if (key == "states") {
      m.states = split_ws(rest);
      check_symbols(m.states, "state", lineno);
      have_states = true;
    } else if (key == "actions1") {
      m.actions1 = split_ws(rest);
      check_symbols(m.actions1, "actions1", lineno);
      have_a1 = true;
    } else if (key == "actions2") {
      m.actions2 = split_ws(rest);
      check_symbols(m.actions2, "actions2", lineno);
      have_a2 = true;
    } else if (key == "obs1") {
      m.obs1 = split_ws(rest);
      check_symbols(m.obs1, "obs1", lineno);
      have_o1 = true;
    } else if (key == "obs2") {
      m.obs2 = split_ws(rest);
      check_symbols(m.obs2, "obs2", lineno);
      have_o2 = true;
    } else if (key == "pubobs") {
      m.pubobs = split_ws(rest);
      check_symbols(m.pubobs, "pubobs", lineno);
      have_pub = true;
    } else if (key == "discount") {
      auto toks = split_ws(rest);
      if (toks.size() != 1) throw ParseError("discount: takes exactly one number", lineno);
      m.discount = number(toks[0], "discount", lineno);
    } else if (key == "horizon") {
      auto toks = split_ws(rest);
      long long h;
      if (toks.size() != 1 || !parse_int(toks[0], h) || h < 0)
        throw ParseError("horizon: takes one non-negative integer", lineno);
      m.default_horizon = static_cast<int>(h);
    } else if (key == "start") {
      auto toks = split_ws(rest);
      m.start.clear();
      for (const auto& t : toks) m.start.push_back(number(t, "start probability", lineno));
      have_start = true;
    } else if (key == "T") {
      // T: s a1 a2 -> s' z1 z2 w : prob
      auto arrow = rest.find("->");
      auto colon2 = rest.rfind(':');
      if (arrow == std::string::npos || colon2 == std::string::npos || colon2 < arrow)
        throw ParseError("T line must look like 'T: s a1 a2 -> s' z1 z2 w : prob'", lineno);
      auto lhs = split_ws(rest.substr(0, arrow));
      auto mid = split_ws(rest.substr(arrow + 2, colon2 - arrow - 2));
      auto rhs = split_ws(rest.substr(colon2 + 1));
      if (lhs.size() != 3 || mid.size() != 4 || rhs.size() != 1)
        throw ParseError("T line must have 3 source tokens, 4 outcome tokens and 1 probability",
                         lineno);
      PendingT p;
      p.line = lineno;
      p.toks = {lhs[0], lhs[1], lhs[2], mid[0], mid[1], mid[2], mid[3], rhs[0]};
      pend_t.push_back(std::move(p));
    } else if (key == "R") {
      // R: s a1 a2 : value
      auto colon2 = rest.rfind(':');
      if (colon2 == std::string::npos)
        throw ParseError("R line must look like 'R: s a1 a2 : value'", lineno);
      auto lhs = split_ws(rest.substr(0, colon2));
      auto rhs = split_ws(rest.substr(colon2 + 1));
      if (lhs.size() != 3 || rhs.size() != 1)
        throw ParseError("R line must have 3 source tokens and 1 value", lineno);
      PendingR p;
      p.line = lineno;
      p.toks = {lhs[0], lhs[1], lhs[2], rhs[0]};
      pend_r.push_back(std::move(p));
    } else {
      throw ParseError("unknown declaration '" + key + "'", lineno);
    }
  }

  if (!have_states) throw ParseError("missing states: declaration");
  if (!have_a1) throw ParseError("missing actions1: declaration");
  if (!have_a2) throw ParseError("missing actions2: declaration");
  if (!have_o1) throw ParseError("missing obs1: declaration");
  if (!have_o2) throw ParseError("missing obs2: declaration");
  if (!have_pub) throw ParseError("missing pubobs: declaration");
  if (!have_start) throw ParseError("missing start: declaration");

  m.allocate();
  tables_allocated = true;
  (void)tables_allocated;

  for (const auto& p : pend_t) {
    int s = lookup(m.states, p.toks[0], "state", p.line);
    int a1 = lookup(m.actions1, p.toks[1], "actions1 symbol", p.line);
    int a2 = lookup(m.actions2, p.toks[2], "actions2 symbol", p.line);
    int s2 = lookup(m.states, p.toks[3], "state", p.line);
    int z1 = lookup(m.obs1, p.toks[4], "obs1 symbol", p.line);
    int z2 = lookup(m.obs2, p.toks[5], "obs2 symbol", p.line);
    int w = lookup(m.pubobs, p.toks[6], "pubobs symbol", p.line);
    double prob = number(p.toks[7], "probability", p.line);
    if (prob < 0.0) throw ParseError("negative probability", p.line);
    std::uint64_t k = 0;
    for (int v : {s, a1, a2, s2, z1, z2, w}) k = k * 1315423911ull + static_cast<std::uint64_t>(v + 1);
    if (!seen_t.insert(k).second) throw ParseError("duplicate T line for the same outcome", p.line);
    if (prob > 0.0)
      m.kernel[m.joint_index(s, a1, a2)].push_back(Outcome{s2, z1, z2, w, prob});
  }
  for (const auto& p : pend_r) {
    int s = lookup(m.states, p.toks[0], "state", p.line);
    int a1 = lookup(m.actions1, p.toks[1], "actions1 symbol", p.line);
    int a2 = lookup(m.actions2, p.toks[2], "actions2 symbol", p.line);
    double val = number(p.toks[3], "reward", p.line);
    std::uint64_t k = 0;
    for (int v : {s, a1, a2}) k = k * 1315423911ull + static_cast<std::uint64_t>(v + 1);
    if (!seen_r.insert(k).second) throw ParseError("duplicate R line", p.line);
    m.reward[m.joint_index(s, a1, a2)] = val;
  }

  // Canonical outcome order (s', z1, z2, w) for deterministic iteration.
  for (auto& out : m.kernel)
    std::sort(out.begin(), out.end(), [](const Outcome& a, const Outcome& b) {
      return std::tie(a.s2, a.z1, a.z2, a.w) < std::tie(b.s2, b.z1, b.z2, b.w);
    });

  m.validate();
  return m;
}

std::string serialize_game(const GameModel& m) {
  std::ostringstream os;
  auto words = [&os](const char* key, const std::vector<std::string>& v) {
    os << key << ":";
    for (const auto& s : v) os << " " << s;
    os << "\n";
  };
  os << "name: " << m.name << "\n";
  words("states", m.states);
  words("actions1", m.actions1);
  words("actions2", m.actions2);
  words("obs1", m.obs1);
  words("obs2", m.obs2);
  words("pubobs", m.pubobs);
  os << "discount: " << csv_double(m.discount) << "\n";
  if (m.default_horizon >= 0) os << "horizon: " << m.default_horizon << "\n";
  os << "start:";
  for (double v : m.start) os << " " << csv_double(v);
  os << "\n";
  for (int s = 0; s < m.nS(); ++s)
    for (int a1 = 0; a1 < m.nA1(); ++a1)
      for (int a2 = 0; a2 < m.nA2(); ++a2) {
        auto span = m.outcomes(s, a1, a2);
        std::vector<Outcome> sorted(span.begin(), span.end());
        std::sort(sorted.begin(), sorted.end(), [](const Outcome& a, const Outcome& b) {
          return std::tie(a.s2, a.z1, a.z2, a.w) < std::tie(b.s2, b.z1, b.z2, b.w);
        });
        for (const Outcome& o : sorted)
          os << "T: " << m.states[s] << " " << m.actions1[a1] << " " << m.actions2[a2]
             << " -> " << m.states[o.s2] << " " << m.obs1[o.z1] << " " << m.obs2[o.z2] << " "
             << m.pubobs[o.w] << " : " << csv_double(o.p) << "\n";
      }
  for (int s = 0; s < m.nS(); ++s)
    for (int a1 = 0; a1 < m.nA1(); ++a1)
      for (int a2 = 0; a2 < m.nA2(); ++a2)
        if (m.r(s, a1, a2) != 0.0)
          os << "R: " << m.states[s] << " " << m.actions1[a1] << " " << m.actions2[a2]
             << " : " << csv_double(m.r(s, a1, a2)) << "\n";
  return os.str();
}

}  // namespace ozsg
