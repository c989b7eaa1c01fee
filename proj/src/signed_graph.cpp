#include "sgft/signed_graph.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <sstream>

#include "sgft/error.hpp"
#include "sgft/spectral.hpp"

namespace sgft {

void SignedGraph::add_edge(std::size_t i, std::size_t j, double weight) {
  if (i == j) {
    throw Error(ErrorCode::kInvalidArgument, "use add_self_loop for loops");
  }
  if (i >= n_ || j >= n_) {
    throw Error(ErrorCode::kInvalidArgument, "edge endpoint out of range");
  }
  if (weight == 0.0 || !std::isfinite(weight)) {
    throw Error(ErrorCode::kInvalidArgument, "edge weight must be finite and nonzero");
  }
  if (i > j) std::swap(i, j);
  Edge e{i, j, weight};
  auto pos = std::lower_bound(edges_.begin(), edges_.end(), e, [](const Edge& a, const Edge& b) {
    return a.i != b.i ? a.i < b.i : a.j < b.j;
  });
  if (pos != edges_.end() && pos->i == i && pos->j == j) {
    std::ostringstream os;
    os << "duplicate edge (" << i << ", " << j << ")";
    throw Error(ErrorCode::kInvalidArgument, os.str());
  }
  edges_.insert(pos, e);
}

void SignedGraph::add_self_loop(std::size_t node, double weight) {
  if (node >= n_) {
    throw Error(ErrorCode::kInvalidArgument, "self-loop node out of range");
  }
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    throw Error(ErrorCode::kInvalidArgument, "self-loop weight must be positive");
  }
  self_loops_[node] += weight;
}

Matrix SignedGraph::adjacency() const {
  Matrix a(n_);
  for (const auto& e : edges_) a.set_sym(e.i, e.j, e.weight);
  for (std::size_t i = 0; i < n_; ++i) a(i, i) = self_loops_[i];
  return a;
}

Matrix degree_matrix(const SignedGraph& g) {
  Matrix d(g.size());
  for (const auto& e : g.edges()) {
    d(e.i, e.i) += e.weight;
    d(e.j, e.j) += e.weight;
  }
  for (std::size_t i = 0; i < g.size(); ++i) d(i, i) += g.self_loops()[i];
  return d;
}

Matrix graph_laplacian(const SignedGraph& g) {
  // D - A with the loop terms cancelled symbolically.
  Matrix l(g.size());
  for (const auto& e : g.edges()) {
    l(e.i, e.i) += e.weight;
    l(e.j, e.j) += e.weight;
    l.set_sym(e.i, e.j, -e.weight);
  }
  return l;
}

Matrix loopy_laplacian(const SignedGraph& g) {
  Matrix q = graph_laplacian(g);
  for (std::size_t i = 0; i < g.size(); ++i) q(i, i) += g.self_loops()[i];
  return q;
}

SignedGraph optimal_line_graph(const MarkovModel1D& model) {
  const std::size_t n = model.size();
  const auto k = static_cast<std::size_t>(model.break_index()) - 1;
  SignedGraph g(n);
  for (std::size_t i = 1; i < n; ++i) {
    const double w = model.inverse_variance(i);
    g.add_edge(i - 1, i, i == k ? -w : w);
  }
  const double loop = 2.0 * model.inverse_variance(k);
  g.add_self_loop(k - 1, loop);
  g.add_self_loop(k, loop);
  return g;
}

BlockContour::BlockContour(std::size_t size)
    : size_(size),
      horizontal_(size > 0 ? size * (size - 1) : 0, 0),
      vertical_(size > 0 ? size * (size - 1) : 0, 0) {}

void BlockContour::add_link(std::size_t a, std::size_t b) {
  const std::size_t count = size_ * size_;
  if (a >= count || b >= count) {
    throw Error(ErrorCode::kInvalidLink, "link endpoint outside block");
  }
  if (a > b) std::swap(a, b);
  const std::size_t ax = a % size_, ay = a / size_;
  const std::size_t bx = b % size_, by = b / size_;
  if (ay == by && bx == ax + 1) {
    set_horizontal(ax, ay);
  } else if (ax == bx && by == ay + 1) {
    set_vertical(ax, ay);
  } else {
    std::ostringstream os;
    os << "pixels " << a << " and " << b << " are not 4-adjacent";
    throw Error(ErrorCode::kInvalidLink, os.str());
  }
}

void BlockContour::set_horizontal(std::size_t x, std::size_t y, bool broken) {
  if (x + 1 >= size_ || y >= size_) {
    throw Error(ErrorCode::kInvalidLink, "horizontal link outside block");
  }
  horizontal_[y * (size_ - 1) + x] = broken ? 1 : 0;
}

void BlockContour::set_vertical(std::size_t x, std::size_t y, bool broken) {
  if (x >= size_ || y + 1 >= size_) {
    throw Error(ErrorCode::kInvalidLink, "vertical link outside block");
  }
  vertical_[y * size_ + x] = broken ? 1 : 0;
}

bool BlockContour::empty() const { return link_count() == 0; }

std::size_t BlockContour::link_count() const {
  return static_cast<std::size_t>(std::count(horizontal_.begin(), horizontal_.end(), 1) +
                                  std::count(vertical_.begin(), vertical_.end(), 1));
}

std::string BlockContour::signature() const {
  std::string s = std::to_string(size_);
  s.push_back(':');
  for (auto b : horizontal_) s.push_back(b ? '1' : '0');
  s.push_back(':');
  for (auto b : vertical_) s.push_back(b ? '1' : '0');
  return s;
}

namespace {

template <typename OnLink>
void for_each_link(const BlockContour& c, OnLink&& on_link) {
  const std::size_t n = c.size();
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const std::size_t p = y * n + x;
      if (x + 1 < n) on_link(p, p + 1, c.horizontal(x, y));
      if (y + 1 < n) on_link(p, p + n, c.vertical(x, y));
    }
  }
}

}  // namespace

SignedGraph block_graph(const BlockContour& contour, double w) {
  if (!(w > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "negative-edge magnitude w must be > 0");
  }
  SignedGraph g(contour.size() * contour.size());
  for_each_link(contour, [&](std::size_t a, std::size_t b, bool broken) {
    if (broken) {
      g.add_edge(a, b, -w);
      g.add_self_loop(a, 2.0 * w);
      g.add_self_loop(b, 2.0 * w);
    } else {
      g.add_edge(a, b, 1.0);
    }
  });
  return g;
}

SignedGraph positive_block_graph(const BlockContour& contour, double w_pos) {
  if (!(w_pos > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "positive contour weight must be > 0");
  }
  SignedGraph g(contour.size() * contour.size());
  for_each_link(contour, [&](std::size_t a, std::size_t b, bool broken) {
    g.add_edge(a, b, broken ? w_pos : 1.0);
  });
  return g;
}

Inertia inertia(const Matrix& m) {
  const Basis b = eigendecompose(m);
  double scale = 0.0;
  for (double l : b.eigenvalues) scale = std::max(scale, std::abs(l));
  const double tau = 1e-9 * scale;
  Inertia in;
  for (double l : b.eigenvalues) {
    if (l > tau) {
      ++in.positive;
    } else if (l < -tau) {
      ++in.negative;
    } else {
      ++in.zero;
    }
  }
  return in;
}

Matrix schur_complement(const Matrix& m, std::span<const std::size_t> block) {
  if (!m.square()) {
    throw Error(ErrorCode::kDimensionMismatch, "Schur complement of non-square matrix");
  }
  const std::size_t n = m.rows();
  std::vector<bool> in_block(n, false);
  for (std::size_t i : block) {
    if (i >= n || in_block[i]) {
      throw Error(ErrorCode::kInvalidArgument, "block indices must be distinct and in range");
    }
    in_block[i] = true;
  }
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < n; ++i)
    if (!in_block[i]) rest.push_back(i);

  const Matrix m11 = submatrix(m, block, block);
  const Matrix m12 = submatrix(m, block, rest);
  const Matrix m22 = submatrix(m, rest, rest);

  const double scale = m11.max_abs();
  const double det = determinant(m11);
  if (!(std::abs(det) > 1e-12 * std::pow(scale, static_cast<double>(block.size())))) {
    throw Error(ErrorCode::kSingularBlock, "Schur complement block is singular");
  }
  const Matrix s = m22 - m12.transpose() * (inverse(m11, 0.0) * m12);
  // Symmetric inputs give symmetric complements; remove rounding asymmetry.
  if (!is_symmetric(m)) return s;
  Matrix out = s;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = i + 1; j < out.cols(); ++j)
      out.set_sym(i, j, 0.5 * (s(i, j) + s(j, i)));
  return out;
}

SignedGraph indefiniteness_demo_graph(double sigma_side_sq, double sigma_k_sq,
                                      double epsilon) {
  if (!(sigma_side_sq > 0.0) || !(sigma_k_sq > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "variances must be positive");
  }
  const double side = 1.0 / sigma_side_sq;
  const double brk = 1.0 / sigma_k_sq;
  const double loop = 2.0 * brk - epsilon;
  if (epsilon < 0.0 || loop < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "epsilon must lie in [0, 2/sigma_k^2]");
  }
  SignedGraph g(4);
  g.add_edge(0, 1, side);
  g.add_edge(1, 2, -brk);
  g.add_edge(2, 3, side);
  if (loop > 0.0) {
    g.add_self_loop(1, loop);
    g.add_self_loop(2, loop);
  }
  return g;
}

Inertia indefiniteness_demo(double sigma_side_sq, double sigma_k_sq, double epsilon) {
  return inertia(loopy_laplacian(indefiniteness_demo_graph(sigma_side_sq, sigma_k_sq, epsilon)));
}

std::string to_text(const SignedGraph& g) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << g.size() << "\n";
  for (const auto& e : g.edges()) os << "E " << e.i + 1 << " " << e.j + 1 << " " << e.weight << "\n";
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.self_loops()[i] > 0.0) os << "S " << i + 1 << " " << g.self_loops()[i] << "\n";
  return os.str();
}

namespace {

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& why) {
  std::ostringstream os;
  os << "graph text line " << line_no << ": " << why;
  throw Error(ErrorCode::kInvalidArgument, os.str());
}

}  // namespace

SignedGraph parse_graph(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  SignedGraph g;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (!have_header) {
      std::size_t n = 0;
      std::istringstream hs(tag);
      if (!(hs >> n) || n == 0) parse_fail(line_no, "expected positive node count");
      g = SignedGraph(n);
      have_header = true;
      continue;
    }
    try {
      if (tag == "E") {
        std::size_t i = 0, j = 0;
        double w = 0.0;
        if (!(ls >> i >> j >> w) || i == 0 || j == 0) parse_fail(line_no, "malformed edge");
        g.add_edge(i - 1, j - 1, w);
      } else if (tag == "S") {
        std::size_t i = 0;
        double w = 0.0;
        if (!(ls >> i >> w) || i == 0) parse_fail(line_no, "malformed self-loop");
        g.add_self_loop(i - 1, w);
      } else {
        parse_fail(line_no, "unknown record '" + tag + "'");
      }
      if (std::string extra; ls >> extra) parse_fail(line_no, "trailing field '" + extra + "'");
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInvalidArgument &&
          std::string(e.what()).rfind("graph text line", 0) == 0)
        throw;
      parse_fail(line_no, e.what());
    }
  }
  if (!have_header) parse_fail(line_no, "missing node count");
  return g;
}

SignedGraph parse_graph(const std::string& text) {
  std::istringstream is(text);
  return parse_graph(is);
}

}  // namespace sgft
