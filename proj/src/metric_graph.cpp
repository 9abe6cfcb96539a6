#include "hjm/metric_graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <queue>

#include "json.hpp"

#include "hjm/errors.hpp"
#include "hjm/parallel.hpp"

namespace hjm {
namespace {

double level_slack(double a) { return 1e-12 * std::max(1.0, std::abs(a)); }

using HeapEntry = std::pair<Ticks, int>;
using MinHeap = std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;

bool parent_graph_has_cycle(const std::vector<int>& parent) {
  const int n = static_cast<int>(parent.size());
  std::vector<int> mark(parent.size(), -1);
  for (int start = 0; start < n; ++start) {
    int u = start;
    while (u >= 0 && mark[static_cast<std::size_t>(u)] == -1) {
      mark[static_cast<std::size_t>(u)] = start;
      u = parent[static_cast<std::size_t>(u)];
    }
    if (u >= 0 && mark[static_cast<std::size_t>(u)] == start) return true;
  }
  return false;
}

}  // namespace

std::string to_string(Quadrature q) {
  switch (q) {
    case Quadrature::midpoint: return "midpoint";
    case Quadrature::trapezoid: return "trapezoid";
    case Quadrature::simpson: return "simpson";
  }
  return "midpoint";
}

Quadrature quadrature_from_string(const std::string& name) {
  if (name == "midpoint") return Quadrature::midpoint;
  if (name == "trapezoid") return Quadrature::trapezoid;
  if (name == "simpson") return Quadrature::simpson;
  throw ConfigError("unknown quadrature: " + name);
}

HalfGridSamples::HalfGridSamples(const Hamiltonian& hamiltonian, const Grid& grid, const OmegaPoint& omega,
                                 int jobs) {
  for (int a = 0; a < kMaxDim; ++a) {
    m_[static_cast<std::size_t>(a)] = a < grid.dim() ? 2 * grid.extent(a) - 1 : 1;
  }
  const std::size_t total = static_cast<std::size_t>(m_[0]) * static_cast<std::size_t>(m_[1]);
  v2_.resize(total);
  const bool centered = hamiltonian.spec().form == HamiltonianForm::eikonal_drift;
  if (centered) {
    center_x_.resize(total);
    center_y_.resize(total);
  }
  const Hamiltonian unshifted = hamiltonian.with_shift({0.0, 0.0});
  const double half = 0.5 * grid.h();
  const Vec lo = grid.lo();
  parallel_for(static_cast<std::size_t>(m_[1]), jobs, [&](std::size_t j2) {
    for (int i2 = 0; i2 < m_[0]; ++i2) {
      const Vec x{lo[0] + half * i2, grid.dim() > 1 ? lo[1] + half * static_cast<double>(j2) : 0.0};
      const std::size_t s = j2 * static_cast<std::size_t>(m_[0]) + static_cast<std::size_t>(i2);
      if (centered) {
        LocalData d = unshifted.local(x, omega);
        v2_[s] = d.v2;
        center_x_[s] = d.center[0];
        center_y_[s] = d.center[1];
      } else {
        double v = unshifted.potential_value(x, omega);
        v2_[s] = v * v;
      }
    }
  });
  min_v2_ = *std::min_element(v2_.begin(), v2_.end());
}

MetricGraph::MetricGraph(const Hamiltonian& hamiltonian, const Box& box, double level, const OmegaPoint& omega,
                         GraphOptions options)
    : hamiltonian_(std::make_shared<Hamiltonian>(hamiltonian)),
      grid_(box, options.h),
      stencil_(Stencil::coprime(box.dim, options.stencil_radius)),
      options_(options),
      omega_(omega),
      level_(level) {
  if (box.dim != hamiltonian.dim()) throw ConfigError("box dimension differs from the Hamiltonian's");
  const Vec& shift = hamiltonian.spec().shift;
  shift_ticks_ = {to_ticks(shift[0] * grid_.h()), box.dim > 1 ? to_ticks(shift[1] * grid_.h()) : 0};
  samples_ = std::make_shared<HalfGridSamples>(hamiltonian, grid_, omega, options.jobs);
  for (const auto& o : stencil_.offsets) {
    Vec q{grid_.h() * o[0], grid_.h() * o[1]};
    offset_vectors_.push_back(q);
    offset_norms_.push_back(norm(q));
    offset_shift_.push_back(o[0] * shift_ticks_[0] + o[1] * shift_ticks_[1]);
  }
  if (level_ + samples_->min_v2() < -level_slack(level_)) throw EmptySublevel(level_, -samples_->min_v2());
}

MetricGraph MetricGraph::at_level(double level) const {
  if (level + samples_->min_v2() < -level_slack(level)) throw EmptySublevel(level, -samples_->min_v2());
  MetricGraph g = *this;
  g.level_ = level;
  return g;
}

int MetricGraph::neighbor(int node, int k) const {
  auto [i, j] = grid_.coords(node);
  const auto& o = stencil_.offsets[static_cast<std::size_t>(k)];
  const int ni = i + o[0];
  const int nj = j + o[1];
  return grid_.in_range(ni, nj) ? grid_.index(ni, nj) : -1;
}

int MetricGraph::predecessor(int node, int k) const {
  auto [i, j] = grid_.coords(node);
  const auto& o = stencil_.offsets[static_cast<std::size_t>(k)];
  const int ni = i - o[0];
  const int nj = j - o[1];
  return grid_.in_range(ni, nj) ? grid_.index(ni, nj) : -1;
}

double MetricGraph::sigma_at(int sample, const Vec& q, double qnorm) const {
  const double r2 = level_ + samples_->v2(sample);
  return dot(samples_->center(sample), q) + qnorm * std::sqrt(std::max(r2, 0.0));
}

int MetricGraph::edge_samples(int node, int k, std::array<int, 3>& samples, std::array<double, 3>& coeffs) const {
  auto [i, j] = grid_.coords(node);
  const auto& o = stencil_.offsets[static_cast<std::size_t>(k)];
  const int tail = samples_->index(2 * i, 2 * j);
  const int mid = samples_->index(2 * i + o[0], 2 * j + o[1]);
  const int head = samples_->index(2 * (i + o[0]), 2 * (j + o[1]));
  switch (options_.quadrature) {
    case Quadrature::midpoint:
      samples = {mid, 0, 0};
      coeffs = {1.0, 0.0, 0.0};
      return 1;
    case Quadrature::trapezoid:
      samples = {tail, head, 0};
      coeffs = {0.5, 0.5, 0.0};
      return 2;
    case Quadrature::simpson:
      break;
  }
  samples = {tail, mid, head};
  coeffs = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
  return 3;
}

Ticks MetricGraph::base_weight(int node, int k) const {
  const auto ku = static_cast<std::size_t>(k);
  std::array<int, 3> s{};
  std::array<double, 3> c{};
  const int m = edge_samples(node, k, s, c);
  double w = 0.0;
  for (int t = 0; t < m; ++t) w += c[t] * sigma_at(s[t], offset_vectors_[ku], offset_norms_[ku]);
  return to_ticks(w);
}

double MetricGraph::edge_level(int node, int k, double increment) const {
  const auto ku = static_cast<std::size_t>(k);
  const Vec& q = offset_vectors_[ku];
  const double qn = offset_norms_[ku];
  std::array<int, 3> s{};
  std::array<double, 3> c{};
  const int m = edge_samples(node, k, s, c);
  // Need sum c_t sqrt(a + V_t^2) >= target.
  double target = increment + from_ticks(offset_shift_[ku]);
  double floor = -std::numeric_limits<double>::infinity();
  double min_v2 = std::numeric_limits<double>::infinity();
  for (int t = 0; t < m; ++t) {
    target -= c[t] * dot(samples_->center(s[t]), q);
    floor = std::max(floor, -samples_->v2(s[t]));
    min_v2 = std::min(min_v2, samples_->v2(s[t]));
  }
  target /= qn;
  auto f = [&](double a) {
    double sum = 0.0;
    for (int t = 0; t < m; ++t) sum += c[t] * std::sqrt(std::max(a + samples_->v2(s[t]), 0.0));
    return sum;
  };
  if (target <= f(floor)) return floor;
  if (m == 1) return target * target - samples_->v2(s[0]);
  double lo = floor;
  double hi = target * target - min_v2;
  for (int it = 0; it < 100 && hi - lo > 1e-12 * (1.0 + std::abs(hi)); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

Ticks MetricGraph::weight(int node, int k) const {
  return base_weight(node, k) - offset_shift_[static_cast<std::size_t>(k)];
}

Ticks MetricGraph::lattice_potential(int node) const {
  auto [i, j] = grid_.coords(node);
  return i * shift_ticks_[0] + j * shift_ticks_[1];
}

bool MetricGraph::base_nonnegative() const {
  if (hamiltonian_->spec().form == HamiltonianForm::eikonal) return true;
  const int n = node_count();
  for (int u = 0; u < n; ++u) {
    for (int k = 0; k < degree(); ++k) {
      if (neighbor(u, k) >= 0 && base_weight(u, k) < 0) return false;
    }
  }
  return true;
}

double MetricGraph::pointwise_min(int node) const {
  auto [i, j] = grid_.coords(node);
  return -samples_->v2(samples_->index(2 * i, 2 * j));
}

Ticks MetricGraph::min_weight() const {
  Ticks best = std::numeric_limits<Ticks>::max();
  const int n = node_count();
  for (int u = 0; u < n; ++u) {
    for (int k = 0; k < degree(); ++k) {
      if (neighbor(u, k) >= 0) best = std::min(best, weight(u, k));
    }
  }
  return best;
}

std::vector<double> DistanceField::values() const {
  std::vector<double> out(ticks.size());
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    out[i] = ticks[i] >= kUnreached ? std::numeric_limits<double>::infinity() : from_ticks(ticks[i]);
  }
  return out;
}

bool DistanceField::path_touches_boundary(int node) const {
  for (int u = node; u >= 0; u = parent[static_cast<std::size_t>(u)]) {
    if (grid.on_boundary(u)) return true;
  }
  return false;
}

void DistanceField::write_csv(std::ostream& os) const {
  os << "x (length),y (length),distance (action)\n";
  for (int node = 0; node < grid.size(); ++node) {
    const Vec p = grid.point(node);
    os << p[0] << ',' << p[1] << ',' << value(node) << '\n';
  }
}

void DistanceField::write_binary(const std::string& path, std::uint64_t seed) const {
  std::ofstream bin(path, std::ios::binary);
  if (!bin) throw Error("cannot open " + path);
  for (Ticks t : ticks) {
    const double v = from_ticks(t);
    bin.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  const Box b = grid.box();
  nlohmann::json header{{"dims", {grid.extent(0), grid.extent(1)}},
                        {"h", grid.h()},
                        {"box", {{"lo", {b.lo[0], b.lo[1]}}, {"hi", {b.hi[0], b.hi[1]}}}},
                        {"a", level},
                        {"omega", omega.coords},
                        {"seed", seed},
                        {"dtype", "float64"},
                        {"order", "row-major, x fastest"},
                        {"direction", direction == Direction::forward ? "forward" : "backward"}};
  std::ofstream js(path + ".json");
  js << header.dump(2) << '\n';
}

DistanceField shortest_distances(const MetricGraph& graph, int source, const SearchOptions& options) {
  const int sources[] = {source};
  const Ticks initial[] = {0};
  return shortest_distances(graph, sources, initial, options);
}

DistanceField shortest_distances(const MetricGraph& graph, std::span<const int> sources,
                                 std::span<const Ticks> initial, const SearchOptions& options) {
  if (sources.size() != initial.size()) throw Error("sources and initial values differ in length");
  const int n = graph.node_count();
  const bool forward = options.direction == Direction::forward;

  DistanceField field;
  field.grid = graph.grid();
  field.level = graph.level();
  field.omega = graph.omega();
  field.direction = options.direction;
  field.sources.assign(sources.begin(), sources.end());
  field.ticks.assign(static_cast<std::size_t>(n), kUnreached);
  field.parent.assign(static_cast<std::size_t>(n), -1);
  field.origin.assign(static_cast<std::size_t>(n), -1);

  // With nonnegative base weights the search runs on them, offset by the
  // lattice potential psi, and psi is removed at the end.
  const bool reduced = graph.base_nonnegative();
  const Ticks sign = forward ? 1 : -1;
  auto offset = [&](int u) { return reduced ? sign * graph.lattice_potential(u) : Ticks{0}; };

  auto& dist = field.ticks;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    if (sources[s] < 0 || sources[s] >= n) throw Error("source node out of range");
    const auto u = static_cast<std::size_t>(sources[s]);
    const Ticks start = initial[s] + offset(sources[s]);
    if (start < dist[u]) {
      dist[u] = start;
      field.origin[u] = static_cast<int>(s);
    }
  }

  auto relax_edges = [&](int u, auto&& on_improve) {
    for (int k = 0; k < graph.degree(); ++k) {
      const int v = forward ? graph.neighbor(u, k) : graph.predecessor(u, k);
      if (v < 0) continue;
      const int tail = forward ? u : v;
      const Ticks w = reduced ? graph.base_weight(tail, k) : graph.weight(tail, k);
      const Ticks nd = dist[static_cast<std::size_t>(u)] + w;
      const auto vu = static_cast<std::size_t>(v);
      if (nd < dist[vu]) {
        dist[vu] = nd;
        field.parent[vu] = u;
        field.origin[vu] = field.origin[static_cast<std::size_t>(u)];
        on_improve(v, nd);
      }
    }
  };

  if (reduced) {
    std::vector<char> settled(static_cast<std::size_t>(n), 0);
    std::vector<char> wanted;
    std::size_t remaining = 0;
    if (!options.targets.empty()) {
      wanted.assign(static_cast<std::size_t>(n), 0);
      for (int t : options.targets) {
        if (t >= 0 && t < n && !wanted[static_cast<std::size_t>(t)]) {
          wanted[static_cast<std::size_t>(t)] = 1;
          ++remaining;
        }
      }
    }
    MinHeap heap;
    for (int s : sources) heap.emplace(dist[static_cast<std::size_t>(s)], s);
    bool stopped_early = false;
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      const auto uu = static_cast<std::size_t>(u);
      if (settled[uu] || d != dist[uu]) continue;
      settled[uu] = 1;
      if (!wanted.empty() && wanted[uu] && --remaining == 0) {
        stopped_early = true;
        break;
      }
      relax_edges(u, [&](int v, Ticks nd) { heap.emplace(nd, v); });
    }
    if (stopped_early) {
      for (std::size_t i = 0; i < settled.size(); ++i) {
        if (!settled[i]) {
          dist[i] = kUnreached;
          field.parent[i] = -1;
          field.origin[i] = -1;
        }
      }
    }
    for (int u = 0; u < n; ++u) {
      auto& t = dist[static_cast<std::size_t>(u)];
      if (t < kUnreached) t -= offset(u);
    }
  } else {
    std::deque<int> queue;
    std::vector<char> queued(static_cast<std::size_t>(n), 0);
    std::vector<int> count(static_cast<std::size_t>(n), 0);
    for (int s : sources) {
      if (!queued[static_cast<std::size_t>(s)]) {
        queued[static_cast<std::size_t>(s)] = 1;
        queue.push_back(s);
      }
    }
    long long relaxations = 0;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      queued[static_cast<std::size_t>(u)] = 0;
      relax_edges(u, [&](int v, Ticks) {
        const auto vu = static_cast<std::size_t>(v);
        if (++count[vu] > n) throw NegativeCycle(graph.level());
        if (!queued[vu]) {
          queued[vu] = 1;
          queue.push_back(v);
        }
        if (++relaxations % n == 0 && parent_graph_has_cycle(field.parent)) {
          throw NegativeCycle(graph.level());
        }
      });
    }
  }

  field.reached_all = std::all_of(dist.begin(), dist.end(), [](Ticks t) { return t < kUnreached; });
  return field;
}

bool has_negative_cycle(const MetricGraph& graph) {
  if (graph.base_nonnegative()) return false;
  try {
    shortest_distances(graph, 0);
  } catch (const NegativeCycle&) {
    return true;
  }
  return false;
}

CriticalBracket free_critical_value(const Hamiltonian& hamiltonian, const OmegaPoint& omega, const Box& box,
                                    const GraphOptions& options, double tol) {
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  const CoercivityBounds bounds = hamiltonian.coercivity();
  double hi = bounds.beta(0.0) + 1.0;
  const MetricGraph base(hamiltonian, box, hi, omega, options);
  const double lower = base.max_pointwise_min();

  auto feasible = [&](double a) {
    if (a + level_slack(a) < lower) return false;
    return !has_negative_cycle(base.at_level(std::max(a, lower)));
  };

  CriticalBracket bracket;
  if (feasible(lower)) {
    bracket.lo = bracket.hi = lower;
    return bracket;
  }
  while (!feasible(hi)) hi = 2.0 * hi + 1.0;
  double lo = lower;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++bracket.iterations;
  }
  bracket.lo = lo;
  bracket.hi = hi;
  return bracket;
}

namespace {

// Dijkstra restricted to distances <= radius on reduced (nonnegative) weights,
// with buffers reused across calls.
class BoundedSearch {
 public:
  BoundedSearch(const MetricGraph& graph, const std::vector<Ticks>& potential)
      : graph_(graph), potential_(potential), dist_(static_cast<std::size_t>(graph.node_count()), kUnreached) {}

  // Returns touched nodes; distances readable through dist() until the next run.
  const std::vector<int>& run(int source, Ticks radius, bool forward) {
    for (int u : touched_) dist_[static_cast<std::size_t>(u)] = kUnreached;
    touched_.clear();
    MinHeap heap;
    dist_[static_cast<std::size_t>(source)] = 0;
    touched_.push_back(source);
    heap.emplace(0, source);
    while (!heap.empty()) {
      auto [d, u] = heap.top();
      heap.pop();
      if (d != dist_[static_cast<std::size_t>(u)]) continue;
      for (int k = 0; k < graph_.degree(); ++k) {
        const int v = forward ? graph_.neighbor(u, k) : graph_.predecessor(u, k);
        if (v < 0) continue;
        const int tail = forward ? u : v;
        const int head = forward ? v : u;
        const Ticks w = graph_.weight(tail, k) + potential_[static_cast<std::size_t>(tail)] -
                        potential_[static_cast<std::size_t>(head)];
        const Ticks nd = d + std::max<Ticks>(w, 0);
        if (nd > radius) continue;
        const auto vu = static_cast<std::size_t>(v);
        if (nd < dist_[vu]) {
          if (dist_[vu] == kUnreached) touched_.push_back(v);
          dist_[vu] = nd;
          heap.emplace(nd, v);
        }
      }
    }
    return touched_;
  }

  Ticks dist(int node) const { return dist_[static_cast<std::size_t>(node)]; }

 private:
  const MetricGraph& graph_;
  const std::vector<Ticks>& potential_;
  std::vector<Ticks> dist_;
  std::vector<int> touched_;
};

}  // namespace

SourceSets detect_sources(const MetricGraph& graph, double c_f_est, double c_est, const SourceOptions& options) {
  SourceSets sets;
  const int n = graph.node_count();
  for (int u = 0; u < n; ++u) {
    const double pm = graph.pointwise_min(u);
    if (pm >= c_f_est - options.equilibrium_tol) sets.equilibria.push_back(u);
    if (pm >= c_est - options.delta - level_slack(c_est)) sets.approx_equilibria.push_back(u);
  }
  const double h = graph.grid().h();
  sets.aubry_length = options.aubry_length.value_or(options.delta);
  sets.epsilon = options.epsilon.value_or(options.aubry_constant * sets.aubry_length * h);
  if (!options.compute_aubry) return sets;

  const Ticks eps = to_ticks(sets.epsilon);
  const double length = sets.aubry_length;

  // A feasible potential makes reduced weights nonnegative; cycle actions are unchanged.
  std::vector<Ticks> potential(static_cast<std::size_t>(n), 0);
  if (graph.base_nonnegative()) {
    for (int u = 0; u < n; ++u) potential[static_cast<std::size_t>(u)] = -graph.lattice_potential(u);
  } else {
    potential = shortest_distances(graph, 0).ticks;
  }

  // Cheapest action of a closed walk of length >= L that oscillates on one edge at z.
  std::vector<Ticks> oscillation(static_cast<std::size_t>(n), kUnreached);
  for (int z = 0; z < n; ++z) {
    for (int k = 0; k < graph.degree(); ++k) {
      const int v = graph.neighbor(z, k);
      if (v < 0) continue;
      const int back = graph.stencil().reverse(k);
      const Ticks two_cycle = graph.weight(z, k) + graph.weight(v, back);
      const double edge_len = h * std::hypot(graph.stencil().offsets[static_cast<std::size_t>(k)][0],
                                             graph.stencil().offsets[static_cast<std::size_t>(k)][1]);
      const auto reps = static_cast<Ticks>(std::ceil(length / (2.0 * edge_len) - 1e-12));
      const Ticks cost = std::max<Ticks>(reps, 1) * std::max<Ticks>(two_cycle, 0);
      oscillation[static_cast<std::size_t>(z)] = std::min(oscillation[static_cast<std::size_t>(z)], cost);
    }
  }

  BoundedSearch forward(graph, potential);
  BoundedSearch backward(graph, potential);
  const double half_len2 = 0.25 * length * length;
  for (int y = 0; y < n; ++y) {
    if (oscillation[static_cast<std::size_t>(y)] <= eps) {
      sets.aubry.push_back(y);
      continue;
    }
    const auto& reach = forward.run(y, eps, true);
    backward.run(y, eps, false);
    const Vec py = graph.grid().point(y);
    bool member = false;
    for (int z : reach) {
      const Ticks back = backward.dist(z);
      if (back >= kUnreached || z == y) continue;
      const Ticks cycle = forward.dist(z) + back;
      if (cycle > eps) continue;
      const Vec d = graph.grid().point(z) - py;
      if (dot(d, d) >= half_len2 || cycle + oscillation[static_cast<std::size_t>(z)] <= eps) {
        member = true;
        break;
      }
    }
    if (member) sets.aubry.push_back(y);
  }
  return sets;
}

}  // namespace hjm
