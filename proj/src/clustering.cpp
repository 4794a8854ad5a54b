#include "cetrace/clustering.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

namespace cetrace {

void validate(const Window& window) {
  if (window.t <= Duration::zero()) throw UsageError("window time bound must be positive");
  if (window.p <= 0) throw UsageError("window position bound must be positive");
}

std::string to_string(const Window& window) {
  const auto ms = window.t.count();
  std::string t = ms % 1000 == 0 ? std::to_string(ms / 1000) + "s" : std::to_string(ms) + "ms";
  return t + "," + std::to_string(window.p) + "c";
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<unsigned char> rank_;
};

}  // namespace

std::vector<Cluster> clusterize(const Session& session, const Window& window) {
  validate(window);
  const auto ops = session.ops;
  DisjointSets sets(ops.size());

  // ops are time-ordered: only predecessors within t of op i can link to it.
  std::size_t lead = 0;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    while (ops[i].ts - ops[lead].ts >= window.t) ++lead;
    for (std::size_t j = lead; j < i; ++j) {
      const auto dpos = ops[i].pos - ops[j].pos;
      if (dpos < window.p && -dpos < window.p) sets.unite(i, j);
    }
  }

  std::vector<Cluster> clusters;
  std::unordered_map<std::size_t, std::size_t> slot_of_root;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    auto [it, fresh] = slot_of_root.try_emplace(sets.find(i), clusters.size());
    if (fresh) {
      Cluster c;
      c.session_index = session.index;
      c.min_ts = c.max_ts = ops[i].ts;
      c.min_pos = c.max_pos = ops[i].pos;
      clusters.push_back(std::move(c));
    }
    Cluster& c = clusters[it->second];
    c.members.push_back(i);
    c.min_ts = std::min(c.min_ts, ops[i].ts);
    c.max_ts = std::max(c.max_ts, ops[i].ts);
    c.min_pos = std::min(c.min_pos, ops[i].pos);
    c.max_pos = std::max(c.max_pos, ops[i].pos);
  }
  return clusters;
}

}  // namespace cetrace
