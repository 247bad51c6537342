#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "ozsg/common.hpp"
#include "ozsg/game.hpp"

// Built-in benchmark kernels. Dimensions and reward bounds of every game are
// pinned by tests; the full dynamics are documented in docs/game_format.md
// and can be exported with `ozsg export-game`.

namespace ozsg {
namespace {

void add(GameModel& m, int s, int a1, int a2, int s2, int z1, int z2, int w, double p) {
  if (p > 0.0) m.kernel[m.joint_index(s, a1, a2)].push_back(Outcome{s2, z1, z2, w, p});
}

void set_r(GameModel& m, int s, int a1, int a2, double v) {
  m.reward[m.joint_index(s, a1, a2)] = v;
}

}  // namespace

GameModel make_matching_pennies() {
  GameModel m;
  m.name = "matching-pennies";
  m.states = {"s0", "s1", "s2"};
  m.actions1 = {"heads", "tails"};
  m.actions2 = {"heads", "tails"};
  m.obs1 = {"none"};
  m.obs2 = {"none"};
  m.pubobs = {"none"};
  m.discount = 1.0;
  m.start = {1.0, 0.0, 0.0};
  m.allocate();
  for (int s = 0; s < 3; ++s) {
    int s2 = std::min(s + 1, 2);
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2) add(m, s, a1, a2, s2, 0, 0, 0, 1.0);
  }
  // Payoff matrix in the absorbing state; earlier stages pay nothing.
  set_r(m, 2, 0, 0, 2.0);
  set_r(m, 2, 0, 1, -1.0);
  set_r(m, 2, 1, 0, -1.0);
  set_r(m, 2, 1, 1, 1.0);
  m.validate();
  return m;
}

GameModel make_adversarial_tiger(double listen_accuracy, double listen_payoff) {
  GameModel m;
  m.name = "adversarial-tiger";
  m.states = {"tiger-left", "tiger-right"};
  m.actions1 = {"listen", "open-left", "open-right"};
  m.actions2 = {"stay", "switch"};
  m.obs1 = {"hear-left", "hear-right"};
  m.obs2 = {"left", "right"};
  m.pubobs = {"none"};
  m.discount = 1.0;
  m.start = {0.5, 0.5};
  m.allocate();
  const double q = listen_accuracy;
  const int kListen = 0, kOpenL = 1, kOpenR = 2;
  const int kSwitch = 1;
  // The two doors are not alike: the left den is survivable (-0.7118) and
  // hides decent gold (+0.52); the right den is lethal (-1.46) and its gold
  // is meagre (+0.18). The keeper exploits the asymmetry by herding the
  // tiger rightward as the game lengthens, which is what makes long horizons
  // cost more per stage than short ones. Each keeper switch also snatches
  // 0.02 from player 1 (the tiger bumps the hinges on its way through).
  const double kTigerLeft = -0.7118, kGoldLeft = 0.52;
  const double kTigerRight = -1.46, kGoldRight = 0.18;
  const double kSwitchGrab = -0.02;
  for (int s = 0; s < 2; ++s) {
    for (int a2 = 0; a2 < 2; ++a2) {
      int s2 = a2 == kSwitch ? 1 - s : s;
      // Listening: player 1 hears the post-move tiger side with accuracy q;
      // player 2 (the keeper) observes the post-move side exactly.
      add(m, s, kListen, a2, s2, /*z1=*/s2, /*z2=*/s2, 0, q);
      add(m, s, kListen, a2, s2, /*z1=*/1 - s2, /*z2=*/s2, 0, 1.0 - q);
      // Opening a door does not disturb the tiger: it keeps its side unless
      // the keeper moves it, and the door noise drowns player 1's hearing.
      for (int a1 : {kOpenL, kOpenR})
        for (int z1 = 0; z1 < 2; ++z1) add(m, s, a1, a2, s2, z1, s2, 0, 0.5);
    }
  }
  for (int s = 0; s < 2; ++s)
    for (int a2 = 0; a2 < 2; ++a2) {
      double bonus = a2 == kSwitch ? kSwitchGrab : 0.0;
      set_r(m, s, kListen, a2, listen_payoff + bonus);
      set_r(m, s, kOpenL, a2, (s == 0 ? kTigerLeft : kGoldLeft) + bonus);
      set_r(m, s, kOpenR, a2, (s == 1 ? kTigerRight : kGoldRight) + bonus);
    }
  m.validate();
  return m;
}

GameModel make_competitive_tiger() {
  GameModel m;
  m.name = "competitive-tiger";
  m.states = {"tiger-left", "tiger-right"};
  m.actions1 = {"listen", "open-left", "open-right", "stand"};
  m.actions2 = {"listen", "open-left", "open-right", "stand"};
  m.obs1 = {"growl-left", "growl-right", "silence"};
  m.obs2 = {"growl-left", "growl-right", "silence"};
  m.pubobs = {"none"};
  m.discount = 1.0;
  m.start = {0.5, 0.5};
  m.allocate();
  const int kListen = 0, kOpenL = 1, kOpenR = 2;
  // The tiger never moves; both players probe it independently. Listening
  // yields a growl from the correct side with probability 0.85, from the
  // wrong side with 0.05, silence otherwise. Any other action only picks up
  // ambient noise, identically distributed on both sides.
  auto obs_dist = [&](int s, int a) -> std::array<double, 3> {
    if (a == kListen) {
      if (s == 0) return {0.85, 0.05, 0.10};
      return {0.05, 0.85, 0.10};
    }
    return {0.05, 0.05, 0.90};
  };
  for (int s = 0; s < 2; ++s)
    for (int a1 = 0; a1 < 4; ++a1)
      for (int a2 = 0; a2 < 4; ++a2) {
        auto d1 = obs_dist(s, a1);
        auto d2 = obs_dist(s, a2);
        for (int z1 = 0; z1 < 3; ++z1)
          for (int z2 = 0; z2 < 3; ++z2) add(m, s, a1, a2, s, z1, z2, 0, d1[z1] * d2[z2]);
      }
  // Per-player payoffs; the game is their difference. Player 2 listens more
  // cheaply, which is the whole asymmetry of this benchmark.
  const double kGold = 0.16, kTiger = -0.5;
  const double kListenCost1 = 0.02 + 0.2 / 11.0, kListenCost2 = 0.02;
  auto u = [&](int s, int a, double listenCost) -> double {
    if (a == kListen) return -listenCost;
    if (a == kOpenL) return s == 0 ? kTiger : kGold;
    if (a == kOpenR) return s == 0 ? kGold : kTiger;
    return 0.0;  // stand
  };
  for (int s = 0; s < 2; ++s)
    for (int a1 = 0; a1 < 4; ++a1)
      for (int a2 = 0; a2 < 4; ++a2)
        set_r(m, s, a1, a2, u(s, a1, kListenCost1) - u(s, a2, kListenCost2));
  m.validate();
  return m;
}

GameModel make_recycling() {
  GameModel m;
  m.name = "recycling";
  m.states = {"hi-hi", "hi-lo", "lo-hi", "lo-lo"};
  m.actions1 = {"search-big", "search-small", "recharge"};
  m.actions2 = {"search-big", "search-small", "recharge"};
  m.obs1 = {"hi", "lo"};
  m.obs2 = {"hi", "lo"};
  m.pubobs = {"none"};
  m.discount = 1.0;
  m.start = {1.0, 0.0, 0.0, 0.0};
  m.allocate();
  const int kBig = 0, kSmall = 1, kRecharge = 2;
  // Each robot runs on its own battery (hi/lo). A big search keeps a high
  // battery with probability kKeepHi, a recharge restores a low battery with
  // probability kRevive; everything else leaves the battery unchanged.
  const double kKeepHi = 0.7482, kRevive = 0.2209;
  // trans[b][a] = probability the battery is hi next stage.
  auto hi_prob = [&](int b, int a) -> double {
    if (b == 0) return a == kBig ? kKeepHi : 1.0;   // hi
    return a == kRecharge ? kRevive : 0.0;          // lo
  };
  // Cleaning yield per stage: only a robot on a high battery collects.
  auto yield = [&](int b, int a, double scale) -> double {
    if (b != 0) return 0.0;
    if (a == kBig) return scale;
    if (a == kSmall) return 0.1 * scale;
    return 0.0;
  };
  for (int s = 0; s < 4; ++s) {
    int b1 = s / 2, b2 = s % 2;
    for (int a1 = 0; a1 < 3; ++a1)
      for (int a2 = 0; a2 < 3; ++a2) {
        double p1hi = hi_prob(b1, a1), p2hi = hi_prob(b2, a2);
        for (int n1 = 0; n1 < 2; ++n1)
          for (int n2 = 0; n2 < 2; ++n2) {
            double p = (n1 == 0 ? p1hi : 1.0 - p1hi) * (n2 == 0 ? p2hi : 1.0 - p2hi);
            add(m, s, a1, a2, n1 * 2 + n2, n1, n2, 0, p);
          }
        // Robot 1 is the stronger cleaner; robot 2 scores 0.78 of its rate.
        set_r(m, s, a1, a2, yield(b1, a1, 0.5) - yield(b2, a2, 0.39));
      }
  }
  m.validate();
  return m;
}

GameModel make_mabc(double fill1, double fill2) {
  GameModel m;
  m.name = "mabc";
  m.states = {"ff", "fe", "ef", "ee"};  // (buffer1, buffer2), f=full e=empty
  m.actions1 = {"send", "wait"};
  m.actions2 = {"send", "wait"};
  m.obs1 = {"full", "empty"};
  m.obs2 = {"full", "empty"};
  m.pubobs = {"none"};
  m.discount = 1.0;
  m.start = {1.0, 0.0, 0.0, 0.0};
  m.allocate();
  const int kSend = 0;
  double fill[2] = {fill1, fill2};
  // A sent packet always leaves the buffer (a collision destroys both); an
  // empty or just-emptied buffer refills with the node's arrival rate.
  auto full_prob = [&](int b, int a, int node) -> double {
    if (b == 0 && a != kSend) return 1.0;  // kept the packet
    return fill[node];
  };
  for (int s = 0; s < 4; ++s) {
    int b1 = s / 2, b2 = s % 2;
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2) {
        double p1f = full_prob(b1, a1, 0), p2f = full_prob(b2, a2, 1);
        for (int n1 = 0; n1 < 2; ++n1)
          for (int n2 = 0; n2 < 2; ++n2) {
            double p = (n1 == 0 ? p1f : 1.0 - p1f) * (n2 == 0 ? p2f : 1.0 - p2f);
            add(m, s, a1, a2, n1 * 2 + n2, n1, n2, 0, p);
          }
        // Node 1 scores iff it transmits and node 2 does not jam the slot.
        bool p1sends = b1 == 0 && a1 == kSend;
        bool p2sends = b2 == 0 && a2 == kSend;
        set_r(m, s, a1, a2, p1sends && !p2sends ? 0.1 : 0.0);
      }
  }
  m.validate();
  return m;
}

GameModel make_pursuit_evasion(int rows, int cols, int variant) {
  if (!((rows == 2 && cols == 2 && variant == 0) ||
        (rows == 3 && cols == 3 && (variant == 1 || variant == 2))))
    throw ParseError("unsupported pursuit-evasion configuration");
  GameModel m;
  m.name = variant == 0 ? "pursuit-evasion-2x2x2"
                        : (variant == 1 ? "pursuit-evasion-3x3x1" : "pursuit-evasion-3x3x2");

  auto blocked_cell = [&](int x, int y) { return variant == 1 && x == 1 && y == 1; };
  // Variant 2 keeps all nine cells but walls off the middle column's
  // north/south edges: (1,0)-(1,1) and (1,1)-(1,2) are impassable.
  auto wall = [&](int x0, int y0, int x1, int y1) {
    if (variant != 2) return false;
    if (x0 != 1 || x1 != 1) return false;
    int lo = std::min(y0, y1), hi = std::max(y0, y1);
    return (lo == 0 && hi == 1) || (lo == 1 && hi == 2);
  };

  std::vector<std::pair<int, int>> cells;
  std::vector<int> cell_id(static_cast<std::size_t>(rows) * cols, -1);
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x)
      if (!blocked_cell(x, y)) {
        cell_id[y * cols + x] = static_cast<int>(cells.size());
        cells.emplace_back(x, y);
      }
  int nc = static_cast<int>(cells.size());

  for (int e = 0; e < nc; ++e)
    for (int p = 0; p < nc; ++p) {
      auto [ex, ey] = cells[e];
      auto [px, py] = cells[p];
      m.states.push_back("e" + std::to_string(ex) + std::to_string(ey) + "p" +
                         std::to_string(px) + std::to_string(py));
    }
  m.actions1 = {"north", "south", "east", "west"};
  m.actions2 = {"north", "south", "east", "west"};
  m.obs1 = {"same", "north", "south", "east", "west", "none"};
  m.obs2 = {"same", "north", "south", "east", "west", "none"};
  m.pubobs = {"none"};
  m.discount = 1.0;
  m.start.assign(m.states.size(), 0.0);
  // Evader starts in the south-west corner, pursuer in the north-east one.
  int e0 = cell_id[0 * cols + 0];
  int p0 = cell_id[(rows - 1) * cols + (cols - 1)];
  m.start[e0 * nc + p0] = 1.0;
  m.allocate();

  const int dx[4] = {0, 0, 1, -1};  // north, south, east, west
  const int dy[4] = {1, -1, 0, 0};
  auto move = [&](int c, int a) -> int {
    auto [x, y] = cells[c];
    int nx2 = x + dx[a], ny2 = y + dy[a];
    if (nx2 < 0 || nx2 >= cols || ny2 < 0 || ny2 >= rows) return c;
    if (blocked_cell(nx2, ny2)) return c;
    if (wall(x, y, nx2, ny2)) return c;
    return cell_id[ny2 * cols + nx2];
  };
  // Post-move sighting: the opponent's direction if in the same or an edge-
  // adjacent cell, otherwise nothing.
  auto sight = [&](int self, int other) -> int {
    auto [sx, sy] = cells[self];
    auto [ox, oy] = cells[other];
    if (self == other) return 0;
    if (ox == sx && oy == sy + 1) return 1;  // north
    if (ox == sx && oy == sy - 1) return 2;  // south
    if (oy == sy && ox == sx + 1) return 3;  // east
    if (oy == sy && ox == sx - 1) return 4;  // west
    return 5;  // none
  };

  for (int e = 0; e < nc; ++e)
    for (int p = 0; p < nc; ++p) {
      int s = e * nc + p;
      for (int a1 = 0; a1 < 4; ++a1)
        for (int a2 = 0; a2 < 4; ++a2) {
          int e2 = move(e, a1), p2 = move(p, a2);
          add(m, s, a1, a2, e2 * nc + p2, sight(e2, p2), sight(p2, e2), 0, 1.0);
          set_r(m, s, a1, a2, e == p ? -100.0 : 0.0);
        }
    }
  m.validate();
  return m;
}

std::vector<std::string> builtin_names() {
  return {"adversarial-tiger",     "competitive-tiger",     "recycling",
          "mabc",                  "matching-pennies",      "pursuit-evasion-2x2x2",
          "pursuit-evasion-3x3x1", "pursuit-evasion-3x3x2"};
}

bool is_builtin(const std::string& name) {
  auto names = builtin_names();
  if (std::find(names.begin(), names.end(), name) != names.end()) return true;
  return name == "pursuit-evasion-2x2" || name == "pe-2x2x2" || name == "pe-2x2" ||
         name == "pe-3x3x1" || name == "pe-3x3x2";
}

GameModel make_builtin(const std::string& name) {
  if (name == "matching-pennies") return make_matching_pennies();
  if (name == "adversarial-tiger") return make_adversarial_tiger();
  if (name == "competitive-tiger") return make_competitive_tiger();
  if (name == "recycling") return make_recycling();
  if (name == "mabc") return make_mabc();
  if (name == "pursuit-evasion-2x2x2" || name == "pursuit-evasion-2x2" ||
      name == "pe-2x2x2" || name == "pe-2x2")
    return make_pursuit_evasion(2, 2, 0);
  if (name == "pursuit-evasion-3x3x1" || name == "pe-3x3x1")
    return make_pursuit_evasion(3, 3, 1);
  if (name == "pursuit-evasion-3x3x2" || name == "pe-3x3x2")
    return make_pursuit_evasion(3, 3, 2);
  throw ParseError("unknown builtin game '" + name + "'");
}


}  // namespace ozsg
