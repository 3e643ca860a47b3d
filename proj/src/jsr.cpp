#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "istab/spectral.hpp"

namespace istab {

const char* to_string(JsrMethod m) {
  switch (m) {
    case JsrMethod::RiClosure: return "ri-closure";
    case JsrMethod::ProductBruteforce: return "product-bruteforce";
  }
  return "unknown";
}

MatrixSet::MatrixSet(std::vector<Matrix> members, std::vector<std::string> labels)
    : members_(std::move(members)), labels_(std::move(labels)) {
  if (members_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "matrix set must be nonempty");
  }
  const Index n = members_.front().rows();
  for (const auto& m : members_) {
    if (m.rows() != m.cols() || m.rows() != n || n == 0) {
      throw Error(ErrorCode::DimensionMismatch,
                  "matrix set members must be square with a common dimension");
    }
    if (!((m.array() >= 0.0).all()) || !m.allFinite()) {
      throw Error(ErrorCode::NegativeEntry, "matrix set members must be finite and nonnegative");
    }
  }
  if (labels_.empty()) {
    for (std::size_t i = 0; i < members_.size(); ++i) {
      labels_.push_back("S" + std::to_string(i + 1));
    }
  } else if (labels_.size() != members_.size()) {
    throw Error(ErrorCode::InvalidArgument, "one label per matrix set member");
  }
}

bool MatrixSet::contains(const Matrix& m) const {
  return std::any_of(members_.begin(), members_.end(),
                     [&](const Matrix& x) { return x.rows() == m.rows() && x == m; });
}

namespace {

struct RowChoices {
  // distinct[i] holds the distinct i-th rows; source[i][k] is the label of the
  // first member contributing distinct[i][k].
  std::vector<std::vector<Eigen::RowVectorXd>> distinct;
  std::vector<std::vector<std::string>> source;
};

RowChoices collect_rows(const MatrixSet& S) {
  const Index n = S.dimension();
  RowChoices rc;
  rc.distinct.resize(static_cast<std::size_t>(n));
  rc.source.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    auto& rows = rc.distinct[static_cast<std::size_t>(i)];
    for (std::size_t m = 0; m < S.size(); ++m) {
      const Eigen::RowVectorXd row = S[m].row(i);
      const bool seen = std::any_of(rows.begin(), rows.end(),
                                    [&](const Eigen::RowVectorXd& r) { return r == row; });
      if (!seen) {
        rows.push_back(row);
        rc.source[static_cast<std::size_t>(i)].push_back(S.labels()[m]);
      }
    }
  }
  return rc;
}

// Saturating product of the per-row choice counts.
std::size_t closure_count(const RowChoices& rc) {
  std::size_t total = 1;
  for (const auto& rows : rc.distinct) {
    if (total > std::numeric_limits<std::size_t>::max() / rows.size()) {
      return std::numeric_limits<std::size_t>::max();
    }
    total *= rows.size();
  }
  return total;
}

}  // namespace

std::size_t ri_closure_size(const MatrixSet& S) { return closure_count(collect_rows(S)); }

void for_each_ri_member(const MatrixSet& S,
                        const std::function<void(const Matrix&, const std::string&)>& visit,
                        std::size_t cap) {
  const RowChoices rc = collect_rows(S);
  const std::size_t count = closure_count(rc);
  if (count > cap) {
    throw Error(ErrorCode::ClosureTooLarge,
                "row-independence closure has more than " + std::to_string(cap) + " members");
  }
  const Index n = S.dimension();
  std::vector<std::size_t> odometer(static_cast<std::size_t>(n), 0);
  Matrix current(n, n);
  for (Index i = 0; i < n; ++i) current.row(i) = rc.distinct[static_cast<std::size_t>(i)][0];

  for (;;) {
    std::string label;
    for (Index i = 0; i < n; ++i) {
      if (i > 0) label += '|';
      label += rc.source[static_cast<std::size_t>(i)][odometer[static_cast<std::size_t>(i)]];
    }
    visit(current, label);

    Index i = 0;
    while (i < n) {
      const auto ui = static_cast<std::size_t>(i);
      if (++odometer[ui] < rc.distinct[ui].size()) {
        current.row(i) = rc.distinct[ui][odometer[ui]];
        break;
      }
      odometer[ui] = 0;
      current.row(i) = rc.distinct[ui][0];
      ++i;
    }
    if (i == n) break;
  }
}

MatrixSet ri_closure(const MatrixSet& S, std::size_t cap) {
  std::vector<Matrix> members;
  std::vector<std::string> labels;
  for_each_ri_member(
      S,
      [&](const Matrix& m, const std::string& label) {
        members.push_back(m);
        labels.push_back(label);
      },
      cap);
  return MatrixSet(std::move(members), std::move(labels));
}

JsrBounds jsr_upper_bound_ri(const MatrixSet& S, const PowerOptions& power, std::size_t cap) {
  JsrBounds bounds;
  bounds.method = JsrMethod::RiClosure;
  for (const auto& m : S.members()) {
    bounds.lower = std::max(bounds.lower, spectral_radius_power(m, power));
  }
  for_each_ri_member(
      S,
      [&](const Matrix& m, const std::string&) {
        bounds.upper = std::max(bounds.upper, spectral_radius_power(m, power));
        ++bounds.closure_size;
      },
      cap);
  return bounds;
}

namespace {

double dense_spectral_radius(const Matrix& P) {
  Eigen::EigenSolver<Matrix> solver(P, /*computeEigenvectors=*/false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double inf_norm(const Matrix& P) { return P.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

JsrBounds jsr_bruteforce(const MatrixSet& S, std::size_t depth, std::size_t cap) {
  if (depth < 1) throw Error(ErrorCode::InvalidArgument, "jsr_bruteforce: depth must be >= 1");
  // Total products over all lengths 1..depth.
  double total = 0.0;
  double layer = 1.0;
  for (std::size_t k = 1; k <= depth; ++k) {
    layer *= static_cast<double>(S.size());
    total += layer;
  }
  if (total > static_cast<double>(cap)) {
    throw Error(ErrorCode::EnumerationCapExceeded,
                "jsr_bruteforce: more than " + std::to_string(cap) + " products");
  }

  JsrBounds bounds;
  bounds.method = JsrMethod::ProductBruteforce;
  bounds.depth = depth;
  std::vector<double> max_norm(depth + 1, 0.0);

  // Depth-first over products P = A_{k} ... A_{1}, reusing prefixes.
  std::function<void(const Matrix&, std::size_t)> descend = [&](const Matrix& prefix,
                                                                std::size_t k) {
    for (const auto& A : S.members()) {
      const Matrix P = A * prefix;
      const double root = 1.0 / static_cast<double>(k);
      bounds.lower = std::max(bounds.lower, std::pow(dense_spectral_radius(P), root));
      max_norm[k] = std::max(max_norm[k], std::pow(inf_norm(P), root));
      if (k < depth) descend(P, k + 1);
    }
  };
  descend(Matrix::Identity(S.dimension(), S.dimension()), 1);

  bounds.upper = *std::min_element(max_norm.begin() + 1, max_norm.end());
  return bounds;
}

}  // namespace istab
