#include "sgpnet/paths.hpp"

#include <functional>
#include <queue>

namespace sgpnet {

PathTree shortest_tree(const NetworkSpec& spec, const Vec& label, const Vec& weight) {
  PathTree t{label, std::vector<int>(spec.n, -1)};
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  std::vector<char> done(spec.n, 0);
  for (int i = 0; i < spec.n; ++i)
    if (label[i] < kInf) pq.push({label[i], i});
  while (!pq.empty()) {
    const auto [d, j] = pq.top();
    pq.pop();
    if (done[j] || d > t.dist[j]) continue;
    done[j] = 1;
    for (int e : spec.in_link[j]) {
      const int i = spec.links[e].from;
      if (done[i]) continue;
      const double cand = d + weight[e];
      if (cand < t.dist[i] || (cand == t.dist[i] && t.next[i] >= 0 && j < t.next[i])) {
        t.dist[i] = cand;
        t.next[i] = j;
        pq.push({cand, i});
      }
    }
  }
  return t;
}

PathTree tree_to(const NetworkSpec& spec, int dest, const Vec& weight) {
  Vec label(spec.n, kInf);
  label[dest] = 0.0;
  return shortest_tree(spec, label, weight);
}

Vec zero_flow_slopes(const NetworkSpec& spec) {
  Vec w(spec.num_links());
  for (int e = 0; e < spec.num_links(); ++e) w[e] = spec.link_cost[e].d1(0.0);
  return w;
}

Vec zero_flow_cpu(const NetworkSpec& spec, int type) {
  Vec c(spec.n, kInf);
  for (int i = 0; i < spec.n; ++i)
    if (spec.comp_cost[i]) c[i] = spec.comp_weight[i][type] * spec.comp_cost[i]->d1(0.0);
  return c;
}

}  // namespace sgpnet
