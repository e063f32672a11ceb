#include "mfgt/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mfgt/error.hpp"

namespace mfgt {

namespace {

// Basis of the transportation simplex: a spanning tree on m row nodes and
// n column nodes (column j is node m + j) with exactly m + n - 1 arcs.
class TransportSimplex {
 public:
  TransportSimplex(std::vector<double> supply, std::vector<double> demand,
                   std::vector<double> cost)
      : m_(static_cast<int>(supply.size())),
        n_(static_cast<int>(demand.size())),
        a_(std::move(supply)),
        b_(std::move(demand)),
        c_(std::move(cost)) {}

  TransportPlan run() {
    northwest_corner();
    const double cmax = *std::max_element(
        c_.begin(), c_.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
    eps_ = 1e-11 * std::max(1.0, std::abs(cmax));
    const long long total = static_cast<long long>(m_) * n_;
    block_ = std::max<long long>(
        16, static_cast<long long>(std::sqrt(static_cast<double>(total))));
    const long long max_pivots = 200LL * (m_ + n_) + 10000;

    long long degenerate_run = 0;
    for (long long pivot = 0;; ++pivot) {
      compute_tree();
      long long entering = bland_ ? find_entering_bland() : find_entering_block();
      if (entering < 0) break;
      const bool degenerate = pivot_on(entering);
      degenerate_run = degenerate ? degenerate_run + 1 : 0;
      // Switch to Bland's rule on long degenerate stalls to rule out cycling.
      if (degenerate_run > 2 * (m_ + n_) || pivot > max_pivots) bland_ = true;
      if (pivot > 50 * max_pivots) {
        throw Error(ErrorCode::kInvalidArgument,
                    "transport simplex exceeded its pivot budget");
      }
    }

    TransportPlan plan;
    for (const Arc& arc : arcs_) {
      if (arc.flow > 0.0) {
        plan.entries.push_back({arc.i, arc.j, arc.flow});
        plan.cost += arc.flow * cost(arc.i, arc.j);
      }
    }
    std::sort(plan.entries.begin(), plan.entries.end(),
              [](const PlanEntry& x, const PlanEntry& y) {
                return x.source != y.source ? x.source < y.source : x.target < y.target;
              });
    return plan;
  }

 private:
  struct Arc {
    int i;
    int j;
    double flow;
  };

  double cost(int i, int j) const {
    return c_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) +
              static_cast<std::size_t>(j)];
  }

  int other(const Arc& arc, int node) const {
    return node < m_ ? m_ + arc.j : arc.i;
  }

  void add_arc(int i, int j, double flow) {
    arcs_.push_back({i, j, flow});
    const int id = static_cast<int>(arcs_.size()) - 1;
    adj_[static_cast<std::size_t>(i)].push_back(id);
    adj_[static_cast<std::size_t>(m_ + j)].push_back(id);
  }

  void northwest_corner() {
    adj_.assign(static_cast<std::size_t>(m_ + n_), {});
    std::vector<double> a = a_;
    std::vector<double> b = b_;
    int i = 0;
    int j = 0;
    while (true) {
      const double x = std::min(a[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]);
      add_arc(i, j, std::max(0.0, x));
      a[static_cast<std::size_t>(i)] -= x;
      b[static_cast<std::size_t>(j)] -= x;
      if (i == m_ - 1 && j == n_ - 1) break;
      if (i == m_ - 1) {
        ++j;
      } else if (j == n_ - 1) {
        ++i;
      } else if (a[static_cast<std::size_t>(i)] <= b[static_cast<std::size_t>(j)]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  // Potentials u_i + v_j = c_ij on basic arcs, plus parent/depth for cycle
  // search; root is row 0 with u_0 = 0.
  void compute_tree() {
    const std::size_t nodes = static_cast<std::size_t>(m_ + n_);
    pot_.assign(nodes, 0.0);
    parent_arc_.assign(nodes, -1);
    depth_.assign(nodes, -1);
    order_.clear();
    order_.push_back(0);
    depth_[0] = 0;
    for (std::size_t head = 0; head < order_.size(); ++head) {
      const int u = order_[head];
      for (int id : adj_[static_cast<std::size_t>(u)]) {
        const Arc& arc = arcs_[static_cast<std::size_t>(id)];
        const int w = other(arc, u);
        if (depth_[static_cast<std::size_t>(w)] >= 0) continue;
        depth_[static_cast<std::size_t>(w)] = depth_[static_cast<std::size_t>(u)] + 1;
        parent_arc_[static_cast<std::size_t>(w)] = id;
        pot_[static_cast<std::size_t>(w)] = cost(arc.i, arc.j) - pot_[static_cast<std::size_t>(u)];
        order_.push_back(w);
      }
    }
  }

  double reduced(long long idx) const {
    const int i = static_cast<int>(idx / n_);
    const int j = static_cast<int>(idx % n_);
    return cost(i, j) - pot_[static_cast<std::size_t>(i)] -
           pot_[static_cast<std::size_t>(m_ + j)];
  }

  long long find_entering_block() {
    const long long total = static_cast<long long>(m_) * n_;
    long long best = -1;
    double best_rc = -eps_;
    long long scanned = 0;
    long long in_block = 0;
    while (scanned < total) {
      const double rc = reduced(next_);
      if (rc < best_rc) {
        best_rc = rc;
        best = next_;
      }
      next_ = next_ + 1 == total ? 0 : next_ + 1;
      ++scanned;
      if (++in_block == block_) {
        if (best >= 0) return best;
        in_block = 0;
      }
    }
    return best;
  }

  long long find_entering_bland() const {
    const long long total = static_cast<long long>(m_) * n_;
    for (long long idx = 0; idx < total; ++idx) {
      if (reduced(idx) < -eps_) return idx;
    }
    return -1;
  }

  // Returns true when the pivot was degenerate (zero step).
  bool pivot_on(long long entering) {
    const int ei = static_cast<int>(entering / n_);
    const int ej = static_cast<int>(entering % n_);
    // Tree path from column node of ej to row node ei.
    std::vector<int> from_col;
    std::vector<int> from_row;
    int x = m_ + ej;
    int y = ei;
    while (x != y) {
      if (depth_[static_cast<std::size_t>(x)] >= depth_[static_cast<std::size_t>(y)]) {
        const int id = parent_arc_[static_cast<std::size_t>(x)];
        from_col.push_back(id);
        x = other(arcs_[static_cast<std::size_t>(id)], x);
      } else {
        const int id = parent_arc_[static_cast<std::size_t>(y)];
        from_row.push_back(id);
        y = other(arcs_[static_cast<std::size_t>(id)], y);
      }
    }
    std::vector<int> path = std::move(from_col);
    path.insert(path.end(), from_row.rbegin(), from_row.rend());

    // Arcs at even positions along the path lose flow.
    double theta = std::numeric_limits<double>::infinity();
    int leave_pos = -1;
    for (std::size_t s = 0; s < path.size(); s += 2) {
      const Arc& arc = arcs_[static_cast<std::size_t>(path[s])];
      const double f = arc.flow;
      bool better = f < theta;
      if (bland_ && f == theta && leave_pos >= 0) {
        const Arc& cur = arcs_[static_cast<std::size_t>(path[static_cast<std::size_t>(leave_pos)])];
        better = static_cast<long long>(arc.i) * n_ + arc.j <
                 static_cast<long long>(cur.i) * n_ + cur.j;
      }
      if (better) {
        theta = f;
        leave_pos = static_cast<int>(s);
      }
    }
    theta = std::max(0.0, theta);
    for (std::size_t s = 0; s < path.size(); ++s) {
      Arc& arc = arcs_[static_cast<std::size_t>(path[s])];
      if (s % 2 == 0) {
        arc.flow = std::max(0.0, arc.flow - theta);
      } else {
        arc.flow += theta;
      }
    }
    const int leaving = path[static_cast<std::size_t>(leave_pos)];
    replace_arc(leaving, ei, ej, theta);
    return theta == 0.0;
  }

  void replace_arc(int id, int i, int j, double flow) {
    Arc& old = arcs_[static_cast<std::size_t>(id)];
    auto drop = [&](int node) {
      std::vector<int>& list = adj_[static_cast<std::size_t>(node)];
      list.erase(std::find(list.begin(), list.end(), id));
    };
    drop(old.i);
    drop(m_ + old.j);
    old = Arc{i, j, flow};
    adj_[static_cast<std::size_t>(i)].push_back(id);
    adj_[static_cast<std::size_t>(m_ + j)].push_back(id);
  }

  int m_;
  int n_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> c_;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adj_;
  std::vector<double> pot_;
  std::vector<int> parent_arc_;
  std::vector<int> depth_;
  std::vector<int> order_;
  double eps_ = 0.0;
  long long block_ = 16;
  long long next_ = 0;
  bool bland_ = false;
};

}  // namespace

TransportPlan solve_transport(std::span<const double> supply,
                              std::span<const double> demand,
                              const std::function<double(int, int)>& cost) {
  if (supply.empty() || demand.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "transport needs nonempty marginals");
  }
  for (double w : supply) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidMeasure, "negative or non-finite supply");
    }
  }
  for (double w : demand) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidMeasure, "negative or non-finite demand");
    }
  }
  const double sa = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double sb = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(sa - sb) > 1e-9 * std::max(1.0, sa)) {
    throw Error(ErrorCode::kInvalidMeasure, "transport marginals are unbalanced");
  }
  std::vector<double> a(supply.begin(), supply.end());
  std::vector<double> b(demand.begin(), demand.end());
  auto largest = std::max_element(b.begin(), b.end());
  *largest += sa - sb;

  const std::size_t m = a.size();
  const std::size_t n = b.size();
  std::vector<double> c(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      c[i * n + j] = cost(static_cast<int>(i), static_cast<int>(j));
    }
  }
  return TransportSimplex(std::move(a), std::move(b), std::move(c)).run();
}

}  // namespace mfgt
