#include "maxcon/graph.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>

#include "maxcon/rng.hpp"

namespace maxcon {

namespace {

constexpr double kEigenResidualTol = 1e-10;

bool connected(int n, const std::vector<std::vector<int>>& adj) {
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = 1;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == n;
}

}  // namespace

Graph Graph::from_edges(int node_count, std::vector<std::pair<int, int>> edges) {
  if (node_count < 1) {
    throw InvalidParameter("graph: node_count must be >= 1, got " +
                           std::to_string(node_count));
  }
  for (auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= node_count || j >= node_count) {
      throw InvalidEdge("graph: edge (" + std::to_string(i) + ", " +
                        std::to_string(j) + ") references a node outside [0, " +
                        std::to_string(node_count) + ")");
    }
    if (i == j) {
      throw SelfLoop("graph: self loop at node " + std::to_string(i));
    }
    if (i > j) std::swap(i, j);
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t k = 1; k < edges.size(); ++k) {
    if (edges[k] == edges[k - 1]) {
      throw DuplicateEdge("graph: duplicate edge (" +
                          std::to_string(edges[k].first) + ", " +
                          std::to_string(edges[k].second) + ")");
    }
  }

  Graph g;
  g.node_count_ = node_count;
  g.edges_ = std::move(edges);
  g.adjacency_.assign(node_count, {});
  for (const auto& [i, j] : g.edges_) {
    g.adjacency_[i].push_back(j);
    g.adjacency_[j].push_back(i);
  }
  for (auto& nbrs : g.adjacency_) std::sort(nbrs.begin(), nbrs.end());
  g.directed_link_count_ = 2 * g.edge_count();

  if (!connected(node_count, g.adjacency_)) {
    throw DisconnectedGraph("graph: not connected (" +
                            std::to_string(node_count) + " nodes, " +
                            std::to_string(g.edge_count()) + " edges)");
  }
  return g;
}

Eigen::MatrixXi Graph::adjacency_matrix() const {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(node_count_, node_count_);
  for (const auto& [i, j] : edges_) {
    a(i, j) = 1;
    a(j, i) = 1;
  }
  return a;
}

Eigen::MatrixXi Graph::degree_matrix() const {
  Eigen::MatrixXi d = Eigen::MatrixXi::Zero(node_count_, node_count_);
  for (int i = 0; i < node_count_; ++i) d(i, i) = degree(i);
  return d;
}

Eigen::MatrixXi Graph::laplacian() const {
  return degree_matrix() - adjacency_matrix();
}

Spectrum spectral_decompose(const Graph& graph) {
  const int n = graph.node_count();
  const Eigen::MatrixXd l = graph.laplacian().cast<double>();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(l);
  if (solver.info() != Eigen::Success) {
    throw EigensolverFailure("spectral_decompose: eigensolver did not converge");
  }

  Spectrum s;
  s.eigenvalues = solver.eigenvalues();
  s.u = solver.eigenvectors();

  const double residual =
      (s.u * s.eigenvalues.asDiagonal() * s.u.transpose() - l)
          .cwiseAbs()
          .maxCoeff();
  if (!std::isfinite(residual) || residual > 1e-8) {
    throw EigensolverFailure(
        "spectral_decompose: reconstruction residual " + std::to_string(residual));
  }
  if (std::abs(s.eigenvalues[0]) > kEigenResidualTol) {
    throw EigensolverFailure(
        "spectral_decompose: smallest eigenvalue " +
        std::to_string(s.eigenvalues[0]) + " not within tolerance of 0");
  }

  // A connected Laplacian has the simple eigenvalue 0 with eigenvector
  // ones/sqrt(N); pin both exactly so downstream algebra sees clean values.
  s.eigenvalues[0] = 0.0;
  s.u.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  return s;
}

double algebraic_connectivity(const Spectrum& spectrum) {
  if (spectrum.eigenvalues.size() < 2) {
    throw InvalidParameter("algebraic_connectivity: need at least 2 nodes");
  }
  return spectrum.eigenvalues[1];
}

Graph random_geometric_graph(int node_count, double radius, std::uint64_t seed,
                             int max_attempts) {
  if (node_count < 1) {
    throw InvalidParameter("random_geometric_graph: node_count must be >= 1");
  }
  if (!(radius > 0.0) || radius > std::sqrt(2.0)) {
    throw InvalidParameter(
        "random_geometric_graph: radius must lie in (0, sqrt(2)], got " +
        std::to_string(radius));
  }

  const double r2 = radius * radius;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    std::mt19937_64 eng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    std::vector<double> x(node_count), y(node_count);
    for (int i = 0; i < node_count; ++i) {
      x[i] = uniform01(eng);
      y[i] = uniform01(eng);
    }
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < node_count; ++i) {
      for (int j = i + 1; j < node_count; ++j) {
        const double dx = x[i] - x[j];
        const double dy = y[i] - y[j];
        if (dx * dx + dy * dy <= r2) edges.emplace_back(i, j);
      }
    }
    try {
      return Graph::from_edges(node_count, std::move(edges));
    } catch (const DisconnectedGraph&) {
      // redraw positions
    }
  }
  throw CouldNotConnect("random_geometric_graph: no connected instance in " +
                        std::to_string(max_attempts) + " attempts (n=" +
                        std::to_string(node_count) +
                        ", radius=" + std::to_string(radius) + ")");
}

Graph read_edge_list(std::istream& in) {
  int n = 0;
  if (!(in >> n)) {
    throw SpecParse("edge list: missing node count on first line");
  }
  std::vector<std::pair<int, int>> edges;
  int i, j;
  while (in >> i >> j) edges.emplace_back(i, j);
  if (!in.eof()) {
    throw SpecParse("edge list: malformed edge line");
  }
  return Graph::from_edges(n, std::move(edges));
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParse("edge list: cannot open " + path);
  return read_edge_list(in);
}

void write_edge_list(const Graph& graph, std::ostream& out) {
  out << graph.node_count() << "\n";
  for (const auto& [i, j] : graph.edges()) out << i << " " << j << "\n";
}

void save_edge_list(const Graph& graph, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw SpecParse("edge list: cannot open " + path + " for writing");
  write_edge_list(graph, out);
}

}  // namespace maxcon
