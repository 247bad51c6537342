#include "ozsg/history.hpp"

#include "ozsg/common.hpp"

namespace ozsg {

int HistoryTable::child(int parent, int action, int obs) {
  auto k = key(parent, action, obs);
  auto it = index_.find(k);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{parent, action, obs, nodes_[parent].stage + 1});
  index_.emplace(k, id);
  return id;
}

int HistoryTable::find(int parent, int action, int obs) const {
  auto it = index_.find(key(parent, action, obs));
  return it == index_.end() ? -1 : it->second;
}

int PubHistoryTable::child(int parent, int obs) {
  auto k = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(parent)) << 16) ^
           static_cast<std::uint64_t>(static_cast<std::uint16_t>(obs));
  auto it = index_.find(k);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{parent, obs, nodes_[parent].stage + 1});
  index_.emplace(k, id);
  return id;
}

int PubHistoryTable::find(int parent, int obs) const {
  auto k = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(parent)) << 16) ^
           static_cast<std::uint64_t>(static_cast<std::uint16_t>(obs));
  auto it = index_.find(k);
  return it == index_.end() ? -1 : it->second;
}

}  // namespace ozsg
