#include "cdr/mapf.hpp"

#include <cmath>
#include <cstdint>
#include <deque>
#include <tuple>
#include <map>
#include <memory>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <unordered_map>

namespace cdr::mapf {

using skel::WorkspaceSkeleton;

namespace {

constexpr double kLengthTolerance = 1e-9;

bool usable(const WorkspaceSkeleton& skel, int edge, double width) {
  return skel.edge(edge).capacity >= width;
}

std::vector<int> hopsTo(const WorkspaceSkeleton& skel, double width, int goal) {
  return skel::hopDistances(skel::SkeletonView{&skel, width}, goal);
}

int edgeFor(const WorkspaceSkeleton& skel, const Move& m) {
  const auto e = skel.edgeBetween(m.from, m.to);
  if (!e) throw std::logic_error("path step between non-adjacent skeleton vertices");
  return *e;
}

}  // namespace

int Solution::makespan() const {
  int m = 0;
  for (const auto& p : paths) m = std::max(m, p.arrival());
  return m;
}

int Solution::sumOfCosts() const {
  int s = 0;
  for (const auto& p : paths) s += p.arrival();
  return s;
}

void ReservationTable::reserve(const WorkspaceSkeleton& skel, const SkeletonPath& path, double width) {
  if (usage_.size() < skel.edgeCount()) usage_.resize(skel.edgeCount());
  for (int t = 0; t < path.arrival(); ++t) {
    const Move m{path.at(t), path.at(t + 1)};
    if (m.stationary()) continue;
    auto& row = usage_[static_cast<std::size_t>(edgeFor(skel, m))];
    if (row.size() <= static_cast<std::size_t>(t)) row.resize(static_cast<std::size_t>(t) + 1, 0.0);
    row[static_cast<std::size_t>(t)] += width;
  }
}

double ReservationTable::used(int edge, int time) const {
  if (static_cast<std::size_t>(edge) >= usage_.size()) return 0.0;
  const auto& row = usage_[static_cast<std::size_t>(edge)];
  return static_cast<std::size_t>(time) < row.size() ? row[static_cast<std::size_t>(time)] : 0.0;
}

int defaultHorizon(const Instance& instance) {
  int longest = 0;
  for (std::size_t r = 0; r < instance.robotCount(); ++r) {
    const auto hops = hopsTo(*instance.skeleton, instance.widths[r], instance.goals[r]);
    longest = std::max(longest, hops[static_cast<std::size_t>(instance.starts[r])]);
  }
  return 4 * (longest + static_cast<int>(instance.robotCount()));
}

std::optional<SkeletonPath> lowLevelSearch(const WorkspaceSkeleton& skel, double width, int robot, int start,
                                           int goal, std::span<const Constraint> constraints, int horizon,
                                           const ReservationTable* reservations) {
  std::set<std::pair<int, int>> edgeBans;                 // (edge, t)
  std::set<std::tuple<int, int, int>> moveBans;           // (from, to, t)
  std::set<std::pair<int, int>> vertexBans;               // (vertex, t)
  int goalBlocked = -1;  // arrival must come strictly after this time
  for (const auto& c : constraints) {
    if (c.robot != robot) continue;
    switch (c.kind) {
      case Constraint::Kind::Edge:
        edgeBans.insert({c.edge, c.time});
        break;
      case Constraint::Kind::Move:
        moveBans.insert({c.move.from, c.move.to, c.time});
        if (c.move.from == goal && c.move.to == goal) goalBlocked = std::max(goalBlocked, c.time);
        break;
      case Constraint::Kind::Vertex:
        vertexBans.insert({c.vertex, c.time});
        if (c.vertex == goal) goalBlocked = std::max(goalBlocked, c.time);
        break;
    }
  }

  const auto hops = hopsTo(skel, width, goal);
  if (hops[static_cast<std::size_t>(start)] < 0) return std::nullopt;

  struct State {
    bool reached = false;
    double length = 0.0;
    int predRank = 0;
    int pred = -1;
    int rank = 0;
  };
  const std::size_t n = skel.vertexCount();
  std::vector<State> layer(n);
  std::vector<std::vector<int>> preds;  // preds[t][v] for t >= 1
  layer[static_cast<std::size_t>(start)].reached = true;

  auto reconstruct = [&](int t) {
    SkeletonPath path;
    path.robot = robot;
    path.vertices.assign(static_cast<std::size_t>(t) + 1, goal);
    int v = goal;
    for (int k = t; k > 0; --k) {
      path.vertices[static_cast<std::size_t>(k)] = v;
      v = preds[static_cast<std::size_t>(k)][static_cast<std::size_t>(v)];
    }
    path.vertices[0] = v;
    return path;
  };

  preds.emplace_back();  // t = 0 has no predecessors
  for (int t = 0;; ++t) {
    if (layer[static_cast<std::size_t>(goal)].reached && t > goalBlocked) return reconstruct(t);
    if (t >= horizon) return std::nullopt;

    std::vector<State> next(n);
    std::vector<int> pred(n, -1);
    bool any = false;
    auto offer = [&](int u, int v, double stepLength) {
      const auto& from = layer[static_cast<std::size_t>(u)];
      auto& to = next[static_cast<std::size_t>(v)];
      const double len = from.length + stepLength;
      const bool better = !to.reached || len < to.length - kLengthTolerance ||
                          (len <= to.length + kLengthTolerance && from.rank < to.predRank);
      if (!better) return;
      to.reached = true;
      to.length = len;
      to.predRank = from.rank;
      pred[static_cast<std::size_t>(v)] = u;
      any = true;
    };
    for (int u = 0; u < static_cast<int>(n); ++u) {
      if (!layer[static_cast<std::size_t>(u)].reached) continue;
      const int nt = t + 1;
      // Wait.
      if (nt + hops[static_cast<std::size_t>(u)] <= horizon && !moveBans.count({u, u, t}) &&
          !vertexBans.count({u, nt}))
        offer(u, u, 0.0);
      for (int e : skel.incident(u)) {
        if (!usable(skel, e, width)) continue;
        const auto& edge = skel.edge(e);
        const int v = edge.other(u);
        if (hops[static_cast<std::size_t>(v)] < 0 || nt + hops[static_cast<std::size_t>(v)] > horizon) continue;
        if (edgeBans.count({e, t}) || moveBans.count({u, v, t}) || vertexBans.count({v, nt})) continue;
        if (reservations && reservations->used(e, t) + width > edge.capacity) continue;
        offer(u, v, edge.length);
      }
    }
    if (!any) return std::nullopt;

    // Lexicographic rank of each chosen sequence within the new layer.
    std::vector<int> order;
    for (int v = 0; v < static_cast<int>(n); ++v)
      if (next[static_cast<std::size_t>(v)].reached) order.push_back(v);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::pair(next[static_cast<std::size_t>(a)].predRank, a) <
             std::pair(next[static_cast<std::size_t>(b)].predRank, b);
    });
    for (std::size_t k = 0; k < order.size(); ++k) next[static_cast<std::size_t>(order[k])].rank = static_cast<int>(k);
    layer = std::move(next);
    preds.push_back(std::move(pred));
  }
}

std::optional<CapacityConflict> findCapacityConflict(std::span<const SkeletonPath> paths, const WorkspaceSkeleton& skel,
                                                     std::span<const double> widths) {
  int horizon = 0;
  for (const auto& p : paths) horizon = std::max(horizon, p.arrival());
  for (int t = 0; t < horizon; ++t) {
    std::map<int, std::pair<double, std::vector<int>>> load;
    for (std::size_t r = 0; r < paths.size(); ++r) {
      const Move m{paths[r].at(t), paths[r].at(t + 1)};
      if (m.stationary()) continue;
      auto& slot = load[edgeFor(skel, m)];
      slot.first += widths[r];
      slot.second.push_back(static_cast<int>(r));
    }
    for (const auto& [edge, entry] : load)
      if (entry.first > skel.edge(edge).capacity) return CapacityConflict{edge, t, entry.second};
  }
  return std::nullopt;
}

MoveTuple movesAt(std::span<const SkeletonPath> paths, int t) {
  MoveTuple moves;
  moves.reserve(paths.size());
  for (const auto& p : paths) moves.push_back({p.at(t), p.at(t + 1)});
  return moves;
}

VertexTuple verticesAt(std::span<const SkeletonPath> paths, int t) {
  VertexTuple v;
  v.reserve(paths.size());
  for (const auto& p : paths) v.push_back(p.at(t));
  return v;
}

std::optional<BanViolation> findBanViolation(std::span<const SkeletonPath> paths, const CompositeBans& bans) {
  if (bans.empty()) return std::nullopt;
  int horizon = 0;
  for (const auto& p : paths) horizon = std::max(horizon, p.arrival());
  for (int t = 0; t <= horizon; ++t) {
    if (t >= 1 && bans.vertices.count(verticesAt(paths, t))) return BanViolation{t, false};
    if (t < horizon && bans.edges.count(movesAt(paths, t))) return BanViolation{t, true};
  }
  return std::nullopt;
}

namespace {

bool goalTupleBanned(const Instance& inst) {
  return inst.bans && inst.bans->vertices.count(inst.goals) && inst.starts != inst.goals;
}

struct Violation {
  enum class Kind { Capacity, BannedEdge, BannedVertex } kind;
  int time = 0;
  CapacityConflict conflict;
};

std::optional<Violation> firstViolation(const Instance& inst, std::span<const SkeletonPath> paths) {
  const auto conflict = findCapacityConflict(paths, *inst.skeleton, inst.widths);
  std::optional<BanViolation> ban;
  if (inst.bans) ban = findBanViolation(paths, *inst.bans);
  if (conflict && (!ban || conflict->time <= ban->time))
    return Violation{Violation::Kind::Capacity, conflict->time, *conflict};
  if (ban) return Violation{ban->isEdge ? Violation::Kind::BannedEdge : Violation::Kind::BannedVertex, ban->time, {}};
  return std::nullopt;
}

// Per-robot constraints that rule out the joint solution's banned tuple at
// the violation time; one alternative per robot.
Constraint deviation(const Violation& v, std::span<const SkeletonPath> paths, int robot) {
  const auto& p = paths[static_cast<std::size_t>(robot)];
  if (v.kind == Violation::Kind::BannedEdge) return Constraint::moveBan(robot, {p.at(v.time), p.at(v.time + 1)}, v.time);
  return Constraint::vertexBan(robot, p.at(v.time), v.time);
}

}  // namespace

std::optional<Solution> cbsSolve(const Instance& inst, const SolverOptions& options) {
  if (goalTupleBanned(inst)) return std::nullopt;
  const int horizon = options.horizon > 0 ? options.horizon : defaultHorizon(inst);
  const auto& skel = *inst.skeleton;
  const std::size_t n = inst.robotCount();

  struct Node {
    std::vector<Constraint> constraints;
    std::vector<SkeletonPath> paths;
    int makespan = 0;
    int soc = 0;
    std::size_t id = 0;
  };
  auto score = [](Node& node) {
    node.makespan = 0;
    node.soc = 0;
    for (const auto& p : node.paths) {
      node.makespan = std::max(node.makespan, p.arrival());
      node.soc += p.arrival();
    }
  };
  auto cmp = [](const std::shared_ptr<Node>& a, const std::shared_ptr<Node>& b) {
    return std::tie(a->makespan, a->soc, a->id) > std::tie(b->makespan, b->soc, b->id);
  };
  std::priority_queue<std::shared_ptr<Node>, std::vector<std::shared_ptr<Node>>, decltype(cmp)> open(cmp);

  auto root = std::make_shared<Node>();
  for (std::size_t r = 0; r < n; ++r) {
    auto p = lowLevelSearch(skel, inst.widths[r], static_cast<int>(r), inst.starts[r], inst.goals[r], {}, horizon);
    if (!p) return std::nullopt;
    root->paths.push_back(std::move(*p));
  }
  score(*root);
  open.push(root);
  std::size_t nextId = 1;
  std::size_t expanded = 0;

  while (!open.empty()) {
    if (expanded >= options.nodeBudget) return std::nullopt;
    auto node = open.top();
    open.pop();
    ++expanded;
    const auto violation = firstViolation(inst, node->paths);
    if (!violation) return Solution{std::move(node->paths), expanded};

    std::vector<Constraint> branches;
    if (violation->kind == Violation::Kind::Capacity) {
      for (int r : violation->conflict.robots)
        branches.push_back(Constraint::edgeBan(r, violation->conflict.edge, violation->time));
    } else {
      for (std::size_t r = 0; r < n; ++r) branches.push_back(deviation(*violation, node->paths, static_cast<int>(r)));
    }
    for (const auto& c : branches) {
      auto child = std::make_shared<Node>();
      child->constraints = node->constraints;
      child->constraints.push_back(c);
      child->paths = node->paths;
      const auto r = static_cast<std::size_t>(c.robot);
      auto p = lowLevelSearch(skel, inst.widths[r], c.robot, inst.starts[r], inst.goals[r], child->constraints, horizon);
      if (!p) continue;
      child->paths[r] = std::move(*p);
      score(*child);
      child->id = nextId++;
      open.push(std::move(child));
    }
  }
  return std::nullopt;
}

std::optional<Solution> pbsSolve(const Instance& inst, const SolverOptions& options) {
  if (goalTupleBanned(inst)) return std::nullopt;
  const int horizon = options.horizon > 0 ? options.horizon : defaultHorizon(inst);
  const auto& skel = *inst.skeleton;
  const std::size_t n = inst.robotCount();

  struct Node {
    std::vector<std::vector<char>> before;  // before[a][b]: a has priority over b
    std::vector<Constraint> constraints;
    std::vector<SkeletonPath> paths;
    int soc = 0;
  };

  auto closure = [n](const Node& node, int robot, bool upward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{robot};
    while (!stack.empty()) {
      const int x = stack.back();
      stack.pop_back();
      for (std::size_t y = 0; y < n; ++y) {
        const bool linked = upward ? node.before[y][static_cast<std::size_t>(x)] : node.before[static_cast<std::size_t>(x)][y];
        if (linked && !seen[y]) {
          seen[y] = 1;
          stack.push_back(static_cast<int>(y));
        }
      }
    }
    return seen;
  };

  // Replans `robot` and every robot below it, higher priorities first.
  auto replan = [&](Node& node, int robot) {
    auto below = closure(node, robot, false);
    below[static_cast<std::size_t>(robot)] = 1;
    std::vector<int> todo;
    for (std::size_t r = 0; r < n; ++r)
      if (below[r]) todo.push_back(static_cast<int>(r));
    std::vector<int> ordered;
    std::vector<char> done(n, 0);
    while (ordered.size() < todo.size()) {
      bool progress = false;
      for (int r : todo) {
        if (done[static_cast<std::size_t>(r)]) continue;
        bool ready = true;
        for (int s : todo)
          if (!done[static_cast<std::size_t>(s)] && s != r && node.before[static_cast<std::size_t>(s)][static_cast<std::size_t>(r)])
            ready = false;
        if (!ready) continue;
        done[static_cast<std::size_t>(r)] = 1;
        ordered.push_back(r);
        progress = true;
      }
      if (!progress) return false;
    }
    for (int r : ordered) {
      const auto above = closure(node, r, true);
      ReservationTable table;
      for (std::size_t h = 0; h < n; ++h)
        if (above[h]) table.reserve(skel, node.paths[h], inst.widths[h]);
      const auto ur = static_cast<std::size_t>(r);
      auto p = lowLevelSearch(skel, inst.widths[ur], r, inst.starts[ur], inst.goals[ur], node.constraints, horizon, &table);
      if (!p) return false;
      node.paths[ur] = std::move(*p);
    }
    node.soc = 0;
    for (const auto& p : node.paths) node.soc += p.arrival();
    return true;
  };

  Node root;
  root.before.assign(n, std::vector<char>(n, 0));
  root.paths.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    auto p = lowLevelSearch(skel, inst.widths[r], static_cast<int>(r), inst.starts[r], inst.goals[r], {}, horizon);
    if (!p) return std::nullopt;
    root.paths[r] = std::move(*p);
  }
  std::vector<Node> stack{std::move(root)};
  std::size_t expanded = 0;

  while (!stack.empty()) {
    if (expanded >= options.nodeBudget) return std::nullopt;
    Node node = std::move(stack.back());
    stack.pop_back();
    ++expanded;
    const auto violation = firstViolation(inst, node.paths);
    if (!violation) return Solution{std::move(node.paths), expanded};

    std::vector<Node> children;
    if (violation->kind == Violation::Kind::Capacity) {
      const auto& robots = violation->conflict.robots;
      std::optional<std::pair<int, int>> pair;
      for (std::size_t i = 0; i < robots.size() && !pair; ++i)
        for (std::size_t j = i + 1; j < robots.size() && !pair; ++j) {
          const auto a = static_cast<std::size_t>(robots[i]);
          const auto b = static_cast<std::size_t>(robots[j]);
          if (!closure(node, robots[i], false)[b] && !closure(node, robots[j], false)[a]) pair = {robots[i], robots[j]};
        }
      if (!pair) continue;
      for (const auto& [hi, lo] : {*pair, std::pair{pair->second, pair->first}}) {
        Node child = node;
        child.before[static_cast<std::size_t>(hi)][static_cast<std::size_t>(lo)] = 1;
        if (replan(child, lo)) children.push_back(std::move(child));
      }
    } else {
      for (std::size_t r = 0; r < n; ++r) {
        Node child = node;
        child.constraints.push_back(deviation(*violation, node.paths, static_cast<int>(r)));
        if (replan(child, static_cast<int>(r))) children.push_back(std::move(child));
      }
    }
    // Depth first; the cheapest child is explored first.
    std::stable_sort(children.begin(), children.end(), [](const Node& a, const Node& b) { return a.soc > b.soc; });
    for (auto& c : children) stack.push_back(std::move(c));
  }
  return std::nullopt;
}

std::optional<Solution> solve(HighLevel solver, const Instance& instance, const SolverOptions& options) {
  return solver == HighLevel::CBS ? cbsSolve(instance, options) : pbsSolve(instance, options);
}

std::optional<Solution> jointStateOracle(const Instance& inst, const SolverOptions& options) {
  const auto& skel = *inst.skeleton;
  const std::size_t n = inst.robotCount();
  const auto base = static_cast<std::uint64_t>(skel.vertexCount());
  auto encode = [&](const VertexTuple& t) {
    std::uint64_t code = 0;
    for (std::size_t r = n; r-- > 0;) code = code * base + static_cast<std::uint64_t>(t[r]);
    return code;
  };
  auto decode = [&](std::uint64_t code) {
    VertexTuple t(n);
    for (std::size_t r = 0; r < n; ++r) {
      t[r] = static_cast<int>(code % base);
      code /= base;
    }
    return t;
  };

  const auto startCode = encode(inst.starts);
  const auto goalCode = encode(inst.goals);
  std::unordered_map<std::uint64_t, std::uint64_t> parent{{startCode, startCode}};
  std::deque<std::uint64_t> frontier{startCode};
  bool found = startCode == goalCode;

  std::vector<std::vector<int>> options_(n);
  while (!found && !frontier.empty()) {
    const auto code = frontier.front();
    frontier.pop_front();
    const auto cur = decode(code);
    for (std::size_t r = 0; r < n; ++r) {
      options_[r] = {cur[r]};
      for (int e : skel.incident(cur[r]))
        if (usable(skel, e, inst.widths[r])) options_[r].push_back(skel.edge(e).other(cur[r]));
    }
    std::vector<std::size_t> pick(n, 0);
    while (true) {
      VertexTuple nextT(n);
      MoveTuple moves(n);
      bool anyMove = false;
      for (std::size_t r = 0; r < n; ++r) {
        nextT[r] = options_[r][pick[r]];
        moves[r] = {cur[r], nextT[r]};
        anyMove = anyMove || nextT[r] != cur[r];
      }
      bool ok = anyMove;
      if (ok) {
        std::map<int, double> load;
        for (std::size_t r = 0; r < n && ok; ++r) {
          if (moves[r].stationary()) continue;
          const int e = edgeFor(skel, moves[r]);
          load[e] += inst.widths[r];
          if (load[e] > skel.edge(e).capacity) ok = false;
        }
      }
      if (ok && inst.bans && (inst.bans->edges.count(moves) || inst.bans->vertices.count(nextT))) ok = false;
      if (ok) {
        const auto nc = encode(nextT);
        if (!parent.count(nc)) {
          if (parent.size() >= options.stateBudget) return std::nullopt;
          parent.emplace(nc, code);
          if (nc == goalCode) {
            found = true;
            break;
          }
          frontier.push_back(nc);
        }
      }
      std::size_t r = 0;
      while (r < n && ++pick[r] == options_[r].size()) pick[r++] = 0;
      if (r == n) break;
    }
  }
  if (!found) return std::nullopt;

  std::vector<VertexTuple> sequence;
  for (auto c = goalCode;; c = parent[c]) {
    sequence.push_back(decode(c));
    if (c == startCode) break;
  }
  std::reverse(sequence.begin(), sequence.end());
  Solution sol;
  sol.expanded = parent.size();
  for (std::size_t r = 0; r < n; ++r) {
    SkeletonPath p;
    p.robot = static_cast<int>(r);
    for (const auto& t : sequence) p.vertices.push_back(t[r]);
    while (p.vertices.size() > 1 && p.vertices[p.vertices.size() - 2] == p.vertices.back()) p.vertices.pop_back();
    sol.paths.push_back(std::move(p));
  }
  return sol;
}

}  // namespace cdr::mapf
