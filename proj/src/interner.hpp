#pragma once

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "stratmc/automata.hpp"

namespace stratmc::detail {

// Dense ids for keys discovered on demand. Not synchronized; owners lock.
template <class Key>
class Interner {
 public:
  int intern(const Key& k, std::size_t budget) {
    auto [it, fresh] = ids_.emplace(k, static_cast<int>(keys_.size()));
    if (fresh) {
      if (keys_.size() >= budget) {
        ids_.erase(it);
        throw BudgetExceeded("construction exceeded " + std::to_string(budget) + " states");
      }
      keys_.push_back(k);
    }
    return it->second;
  }
  const Key& key(int id) const { return keys_.at(id); }
  std::size_t size() const { return keys_.size(); }

 private:
  std::map<Key, int> ids_;
  std::vector<Key> keys_;
};

using Lock = std::lock_guard<std::recursive_mutex>;

}  // namespace stratmc::detail
