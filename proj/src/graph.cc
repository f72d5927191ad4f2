// Copyright 2026 The PWCF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pwcf/graph.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>

#include "pwcf/common.h"
#include "pwcf/neighbors.h"

namespace pwcf {
namespace {

void mine_from(Domain anchor_domain, const DomainView& anchors, const DomainView& others,
               TripletSet& out) {
  const Eigen::Index n_other = others.descriptors.cols();
  for (Eigen::Index a = 0; a < anchors.descriptors.cols(); ++a) {
    const int label = anchors.labels[static_cast<std::size_t>(a)];
    const auto anchor = anchors.descriptors.col(a);
    int pos = -1;
    int neg = -1;
    double pos_dist = -1.0;
    double neg_dist = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n_other; ++j) {
      const double dist = (others.descriptors.col(j) - anchor).squaredNorm();
      // Strict comparisons keep the smaller index on ties.
      if (others.labels[static_cast<std::size_t>(j)] == label) {
        if (dist > pos_dist) {
          pos_dist = dist;
          pos = static_cast<int>(j);
        }
      } else if (dist < neg_dist) {
        neg_dist = dist;
        neg = static_cast<int>(j);
      }
    }
    if (pos < 0 || neg < 0) {
      ++out.skipped;
      continue;
    }
    const Domain other_domain = opposite(anchor_domain);
    out.entries.push_back(Triplet{SampleRef{anchor_domain, static_cast<int>(a)},
                                  SampleRef{other_domain, pos}, SampleRef{other_domain, neg}});
  }
}

double median_positive(std::vector<double> values) {
  std::erase_if(values, [](double v) { return !(v > 0.0); });
  if (values.empty()) return 1.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace

TripletSet mine_triplets(const DomainView& target, const DomainView& source) {
  if (target.descriptors.rows() != source.descriptors.rows()) {
    throw Error("mine_triplets: descriptor dimension mismatch");
  }
  if (static_cast<Eigen::Index>(target.labels.size()) != target.descriptors.cols() ||
      static_cast<Eigen::Index>(source.labels.size()) != source.descriptors.cols()) {
    throw Error("mine_triplets: label count mismatch");
  }
  TripletSet out;
  out.entries.reserve(target.labels.size() + source.labels.size());
  mine_from(Domain::kTarget, target, source, out);
  mine_from(Domain::kSource, source, target, out);
  return out;
}

LaplacianGraph LaplacianGraph::from_affinity(Eigen::SparseMatrix<double> affinity) {
  if (affinity.rows() != affinity.cols()) throw Error("affinity must be square");
  LaplacianGraph g;
  g.affinity = std::move(affinity);
  g.affinity.makeCompressed();
  const Eigen::Index n = g.affinity.rows();
  g.degree = Eigen::VectorXd::Zero(n);
  for (Eigen::Index col = 0; col < g.affinity.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(g.affinity, col); it; ++it) {
      g.degree(it.row()) += it.value();
    }
  }
  Eigen::SparseMatrix<double> diag(n, n);
  diag.reserve(Eigen::VectorXi::Constant(n, 1));
  for (Eigen::Index i = 0; i < n; ++i) {
    if (g.degree(i) != 0.0) diag.insert(i, i) = g.degree(i);
  }
  g.laplacian = diag - g.affinity;
  g.laplacian.prune(0.0);
  g.laplacian.makeCompressed();
  return g;
}

LaplacianGraph build_affinity(const Eigen::MatrixXd& target_features,
                              const Eigen::MatrixXd& source_features,
                              const Eigen::MatrixXd& target_descriptors,
                              const Eigen::MatrixXd& source_descriptors, int k) {
  if (k < 1) throw Error("build_affinity: k must be >= 1");
  const int nt = static_cast<int>(target_features.cols());
  const int ns = static_cast<int>(source_features.cols());
  if (target_descriptors.cols() != nt || source_descriptors.cols() != ns) {
    throw Error("build_affinity: descriptor count mismatch");
  }

  // (i, j, squared distance, cross-domain) with i < j in pooled order.
  struct Edge {
    int i;
    int j;
    double dist2;
    bool cross;
  };
  std::vector<Edge> edges;
  auto add = [&](int a, int b, double dist2, bool cross) {
    if (a == b) return;
    edges.push_back(Edge{std::min(a, b), std::max(a, b), dist2, cross});
  };

  auto within = [&](const Eigen::MatrixXd& x, int offset) {
    const int n = static_cast<int>(x.cols());
    if (n < 2) return;
    const int kk = std::min(k, n - 1);
    const Eigen::MatrixXi nn = nearest_neighbors(x, x, kk, true);
    for (int i = 0; i < n; ++i) {
      for (int t = 0; t < kk; ++t) {
        const int j = nn(t, i);
        add(offset + i, offset + j, (x.col(i) - x.col(j)).squaredNorm(), false);
      }
    }
  };
  within(target_features, 0);
  within(source_features, nt);

  auto across = [&](const Eigen::MatrixXd& from, int from_offset, const Eigen::MatrixXd& to,
                    int to_offset) {
    const int kk = std::min(k, static_cast<int>(to.cols()));
    const Eigen::MatrixXi nn = nearest_neighbors(from, to, kk, false);
    for (Eigen::Index i = 0; i < from.cols(); ++i) {
      for (int t = 0; t < kk; ++t) {
        const int j = nn(t, i);
        add(from_offset + static_cast<int>(i), to_offset + j,
            (from.col(i) - to.col(j)).squaredNorm(), true);
      }
    }
  };
  if (nt > 0 && ns > 0) {
    across(target_descriptors, 0, source_descriptors, nt);
    across(source_descriptors, nt, target_descriptors, 0);
  }

  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.i, a.j) < std::tie(b.i, b.j);
  });
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) { return a.i == b.i && a.j == b.j; }),
              edges.end());

  std::vector<double> within_d;
  std::vector<double> cross_d;
  for (const Edge& e : edges) (e.cross ? cross_d : within_d).push_back(e.dist2);
  const double s2_within = median_positive(std::move(within_d));
  const double s2_cross = median_positive(std::move(cross_d));

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(2 * edges.size());
  for (const Edge& e : edges) {
    const double w = std::exp(-e.dist2 / (e.cross ? s2_cross : s2_within));
    if (w == 0.0) continue;
    entries.emplace_back(e.i, e.j, w);
    entries.emplace_back(e.j, e.i, w);
  }
  Eigen::SparseMatrix<double> z(nt + ns, nt + ns);
  z.setFromTriplets(entries.begin(), entries.end());
  LaplacianGraph g = LaplacianGraph::from_affinity(std::move(z));
  g.sigma_within = std::sqrt(s2_within);
  g.sigma_cross = std::sqrt(s2_cross);
  return g;
}

double manifold_quadratic(const Eigen::MatrixXd& w, const Eigen::MatrixXd& pooled,
                          const Eigen::SparseMatrix<double>& laplacian) {
  if (w.rows() != pooled.rows() || pooled.cols() != laplacian.rows()) {
    throw Error("manifold_quadratic: shape mismatch");
  }
  const Eigen::MatrixXd f = w.transpose() * pooled;  // r x n
  const Eigen::MatrixXd fl = f * laplacian;
  return std::max(0.0, fl.cwiseProduct(f).sum());
}

}  // namespace pwcf
