#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sgft/markov_model.hpp"
#include "sgft/matrix.hpp"

namespace sgft {

struct Edge {
  std::size_t i = 0;  // i < j, zero-based
  std::size_t j = 0;
  double weight = 0.0;  // nonzero, may be negative

  bool operator==(const Edge&) const = default;
};

// Undirected graph with signed edge weights and positive self-loops.
class SignedGraph {
 public:
  explicit SignedGraph(std::size_t n = 0) : n_(n), self_loops_(n, 0.0) {}

  // Throws kInvalidArgument on i == j, out-of-range nodes, zero weight or a
  // duplicate pair.
  void add_edge(std::size_t i, std::size_t j, double weight);

  // Adds to the node's self-loop weight (loops accumulate). Weight must be > 0.
  void add_self_loop(std::size_t node, double weight);

  std::size_t size() const { return n_; }
  // Sorted by (i, j).
  const std::vector<Edge>& edges() const { return edges_; }
  // Per-node loop weight, 0 where absent.
  std::span<const double> self_loops() const { return self_loops_; }

  // A, including loop weights on the diagonal.
  Matrix adjacency() const;

  bool operator==(const SignedGraph&) const = default;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<double> self_loops_;
};

// D_ii = sum_j A_ij, loops included.
Matrix degree_matrix(const SignedGraph& g);
// L = D - A. Loops cancel, so L_ii is the signed sum of incident edges.
Matrix graph_laplacian(const SignedGraph& g);
// Q = L + diag(A_ii).
Matrix loopy_laplacian(const SignedGraph& g);

// Line graph whose loopy Laplacian reproduces precision(model): edge
// (i-1, i) carries +1/sigma_i^2, except the break pair which carries
// -1/sigma_k^2 plus self-loops 2/sigma_k^2 on both ends.
SignedGraph optimal_line_graph(const MarkovModel1D& model);

// Broken 4-neighbour links inside an n x n block (raster pixel order).
class BlockContour {
 public:
  explicit BlockContour(std::size_t size = 0);

  std::size_t size() const { return size_; }

  // Marks the link between raster pixels a and b as broken. Throws
  // kInvalidLink when they are not 4-adjacent inside the block.
  void add_link(std::size_t a, std::size_t b);

  // (x, y) -- (x+1, y)
  bool horizontal(std::size_t x, std::size_t y) const {
    return horizontal_[y * (size_ - 1) + x] != 0;
  }
  // (x, y) -- (x, y+1)
  bool vertical(std::size_t x, std::size_t y) const {
    return vertical_[y * size_ + x] != 0;
  }
  void set_horizontal(std::size_t x, std::size_t y, bool broken = true);
  void set_vertical(std::size_t x, std::size_t y, bool broken = true);

  bool empty() const;
  std::size_t link_count() const;

  // Canonical string: size followed by the two link masks.
  std::string signature() const;

  bool operator==(const BlockContour&) const = default;

 private:
  std::size_t size_;
  std::vector<unsigned char> horizontal_;
  std::vector<unsigned char> vertical_;
};

// 4-connected block graph: weight 1 on intact links, -w on broken links with
// a 2w self-loop added at each endpoint.
SignedGraph block_graph(const BlockContour& contour, double w);

// Same lattice with +w_pos on broken links and no loops (WGFT graph).
SignedGraph positive_block_graph(const BlockContour& contour, double w_pos);

struct Inertia {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;

  Inertia operator+(const Inertia& o) const {
    return {positive + o.positive, negative + o.negative, zero + o.zero};
  }
  bool operator==(const Inertia&) const = default;
};

// Eigenvalue sign counts with zero band |lambda| <= 1e-9 * max|lambda|.
Inertia inertia(const Matrix& m);

// M / M[block, block] = M22 - M12^T M11^-1 M12 for the partition placing
// `block` (any index subset) first. Throws kSingularBlock when
// |det M11| <= 1e-12 * max|M11|^|block|.
Matrix schur_complement(const Matrix& m, std::span<const std::size_t> block);

// Four-node line graph, break between nodes 2 and 3 (1-based): side edges
// 1/sigma_side_sq, break edge -1/sigma_k_sq, loops 2/sigma_k_sq - epsilon on
// the break nodes (dropped when zero).
SignedGraph indefiniteness_demo_graph(double sigma_side_sq, double sigma_k_sq,
                                      double epsilon);
Inertia indefiniteness_demo(double sigma_side_sq, double sigma_k_sq, double epsilon);

// Line-oriented text form: first line `n`, then `E i j w` and `S i w` with
// 1-based node indices. Blank lines and `#` comments are ignored.
std::string to_text(const SignedGraph& g);
SignedGraph parse_graph(std::istream& in);
SignedGraph parse_graph(const std::string& text);

}  // namespace sgft
