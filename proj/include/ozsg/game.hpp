#pragma once
// Two-player zero-sum partially observable stochastic game model.
//
// A game is the tuple (S, A1, A2, Z1, Z2, W, p, r, b, discount, horizon):
//   - S: hidden states; A_i: per-player actions; Z_i: per-player private
//     observations; W: public observations (|W| = 1 when nothing is public).
//   - p(s', z1, z2, w | s, a1, a2): joint transition/observation kernel.
//   - r(s, a1, a2): stage payoff to player 1 (player 2 pays -r).
//   - b: initial state distribution.
//   - horizon ell >= 0: the game runs stages 0..ell inclusive.
//
// Player 1 maximizes the expected discounted sum of rewards; player 2
// minimizes it.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ozsg {

struct Outcome {
  int s2 = 0, z1 = 0, z2 = 0, w = 0;
  double p = 0.0;
};

class GameModel {
 public:
  std::string name = "game";
  std::vector<std::string> states, actions1, actions2, obs1, obs2, pubobs;
  double discount = 1.0;
  int default_horizon = -1;  // optional `horizon:` declaration; -1 if absent
  std::vector<double> start;

  // kernel[s][a1][a2] flattened: list of outcomes with positive probability.
  std::vector<std::vector<Outcome>> kernel;
  // reward[s][a1][a2] flattened.
  std::vector<double> reward;

  int nS() const { return static_cast<int>(states.size()); }
  int nA1() const { return static_cast<int>(actions1.size()); }
  int nA2() const { return static_cast<int>(actions2.size()); }
  int nZ1() const { return static_cast<int>(obs1.size()); }
  int nZ2() const { return static_cast<int>(obs2.size()); }
  int nW() const { return static_cast<int>(pubobs.size()); }

  int joint_index(int s, int a1, int a2) const {
    return (s * nA1() + a1) * nA2() + a2;
  }
  const std::vector<Outcome>& outcomes(int s, int a1, int a2) const {
    return kernel[joint_index(s, a1, a2)];
  }
  double r(int s, int a1, int a2) const { return reward[joint_index(s, a1, a2)]; }

  void allocate();  // sizes kernel/reward from the alphabet sizes

  // Normalization, index ranges, start distribution; throws ParseError
  // with a descriptive message on violation. Tolerance 1e-9 on sums.
  void validate() const;

  double reward_min() const;
  double reward_max() const;
  // max |r|; the m constant in the exploitability bound.
  double reward_bound() const;

  std::uint64_t fingerprint() const;
};

// --- text format ------------------------------------------------------------
// See docs/game_format.md for the grammar. Throws ParseError on bad input.
GameModel parse_game(const std::string& text);
GameModel load_game_file(const std::string& path);
std::string serialize_game(const GameModel& m);

// --- builtins ---------------------------------------------------------------
// Names: adversarial-tiger, competitive-tiger, recycling, mabc,
// matching-pennies, pursuit-evasion-2x2x2, pursuit-evasion-3x3x1,
// pursuit-evasion-3x3x2. Kernels are documented in docs/game_format.md.
std::vector<std::string> builtin_names();
bool is_builtin(const std::string& name);
GameModel make_builtin(const std::string& name);

// Parameterized factories behind the named builtins. The default arguments
// are the calibrated canonical kernels; tests rely on those exact values.
GameModel make_matching_pennies();
GameModel make_adversarial_tiger(double listen_accuracy = 0.64,
                                 double listen_payoff = -0.154);
GameModel make_competitive_tiger();
GameModel make_recycling();
GameModel make_mabc(double fill1 = 0.21, double fill2 = 0.10);
// variant 0: full rows x cols grid; 1: center cell removed; 2: two interior
// walls in the middle column.
GameModel make_pursuit_evasion(int rows, int cols, int variant);

// Resolves --game arguments: builtin name or path to a game file.
GameModel resolve_game(const std::string& name_or_path);

}  // namespace ozsg
