#include "ozsg/game.hpp"

#include "ozsg/common.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ozsg {

void GameModel::allocate() {
  const std::size_t n = static_cast<std::size_t>(nS()) * nA1() * nA2();
  kernel.assign(n, {});
  reward.assign(n, 0.0);
}

void GameModel::validate() const {
  auto fail = [](const std::string& msg) { throw ParseError(msg); };
  if (states.empty()) fail("game has no states");
  if (actions1.empty() || actions2.empty()) fail("game has an empty action set");
  if (obs1.empty() || obs2.empty()) fail("game has an empty observation set");
  if (pubobs.empty()) fail("game has no public observation symbol (need at least one)");
  if (discount <= 0.0 || discount > 1.0) fail("discount must be in (0, 1]");
  if (static_cast<int>(start.size()) != nS()) fail("start distribution size mismatch");
  double sb = 0.0;
  for (double v : start) {
    if (v < -1e-12) fail("start distribution has a negative entry");
    sb += v;
  }
  if (std::abs(sb - 1.0) > 1e-9) fail("start distribution does not sum to 1");
  const std::size_t n = static_cast<std::size_t>(nS()) * nA1() * nA2();
  if (kernel.size() != n || reward.size() != n) fail("kernel/reward tables not allocated");
  for (int s = 0; s < nS(); ++s)
    for (int a1 = 0; a1 < nA1(); ++a1)
      for (int a2 = 0; a2 < nA2(); ++a2) {
        double tot = 0.0;
        for (const Outcome& o : outcomes(s, a1, a2)) {
          if (o.s2 < 0 || o.s2 >= nS() || o.z1 < 0 || o.z1 >= nZ1() || o.z2 < 0 ||
              o.z2 >= nZ2() || o.w < 0 || o.w >= nW())
            fail("kernel outcome index out of range");
          if (o.p < -1e-12) fail("kernel entry is negative");
          tot += o.p;
        }
        if (std::abs(tot - 1.0) > 1e-9) {
          std::ostringstream os;
          os << "kernel rows must sum to 1: T(" << states[s] << "," << actions1[a1] << ","
             << actions2[a2] << ") sums to " << tot;
          fail(os.str());
        }
      }
}

double GameModel::reward_min() const {
  double m = reward.empty() ? 0.0 : reward[0];
  for (double v : reward) m = std::min(m, v);
  return m;
}

double GameModel::reward_max() const {
  double m = reward.empty() ? 0.0 : reward[0];
  for (double v : reward) m = std::max(m, v);
  return m;
}

double GameModel::reward_bound() const {
  return std::max(std::abs(reward_min()), std::abs(reward_max()));
}

std::uint64_t GameModel::fingerprint() const { return fnv1a(serialize_game(*this)); }

GameModel load_game_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open game file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  GameModel m = parse_game(os.str());
  if (m.name == "game") {
    // Use the basename (without extension) as a fallback display name.
    std::string base = path;
    auto slash = base.find_last_of('/');
    if (slash != std::string::npos) base = base.substr(slash + 1);
    auto dot = base.find_last_of('.');
    if (dot != std::string::npos) base = base.substr(0, dot);
    if (!base.empty()) m.name = base;
  }
  return m;
}

GameModel resolve_game(const std::string& name_or_path) {
  if (is_builtin(name_or_path)) return make_builtin(name_or_path);
  return load_game_file(name_or_path);
}

}  // namespace ozsg
