#pragma once

// Interned action-observation histories. Each private history is a node in a
// prefix tree: id 0 is the empty history, and every other node is uniquely
// identified by (parent, action, observation). Public histories are the same
// structure with only a public observation per step. Ids are dense ints in
// creation order, so they can be used as keys in sparse occupancy maps and
// compared deterministically.

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace ozsg {

class HistoryTable {
 public:
  HistoryTable() { nodes_.push_back(Node{-1, -1, -1, 0}); }

  static constexpr int kRoot = 0;

  // Interns (parent, action, observation); returns the existing id if present.
  int child(int parent, int action, int obs);
  // Lookup without interning; returns -1 if the extension does not exist yet.
  int find(int parent, int action, int obs) const;

  int parent(int h) const { return nodes_[h].parent; }
  int action(int h) const { return nodes_[h].action; }
  int obs(int h) const { return nodes_[h].obs; }
  int stage(int h) const { return nodes_[h].stage; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    int parent, action, obs, stage;
  };
  static std::uint64_t key(int parent, int action, int obs) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(parent)) << 32) ^
           (static_cast<std::uint64_t>(static_cast<std::uint16_t>(action)) << 16) ^
           static_cast<std::uint64_t>(static_cast<std::uint16_t>(obs));
  }
  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, int> index_;
};

class PubHistoryTable {
 public:
  PubHistoryTable() { nodes_.push_back(Node{-1, -1, 0}); }

  static constexpr int kRoot = 0;

  int child(int parent, int obs);
  int find(int parent, int obs) const;

  int parent(int h) const { return nodes_[h].parent; }
  int obs(int h) const { return nodes_[h].obs; }
  int stage(int h) const { return nodes_[h].stage; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  struct Node {
    int parent, obs, stage;
  };
  std::vector<Node> nodes_;
  std::unordered_map<std::uint64_t, int> index_;
};

// The three history tables a solve shares: private histories per player plus
// the public stream. Wrapped so they can be passed around as one context.
struct HistoryContext {
  HistoryTable h1, h2;
  PubHistoryTable pub;
};

}  // namespace ozsg
