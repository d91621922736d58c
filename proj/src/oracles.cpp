// Brute-force reference computations. Nothing here calls into the ranker's
// iteration or the classifier's training code.

#include <cmath>

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/core.h>

#include "sensor_rank/error.hpp"
#include "sensor_rank/synthlab.hpp"

namespace sensor_rank {

std::vector<double> oracle_linear_solve(const TransitionMatrix& P,
                                        std::span<const double> teleport,
                                        double gamma) {
  const auto n = P.size();
  if (n > 64) throw Error("oracle_linear_solve: more than 64 nodes");
  if (teleport.size() != n) throw Error("oracle_linear_solve: size mismatch");

  // Augmented [A | b] with A = I - gamma P^T.
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    a[j][j] = 1.0;
    a[j][n] = (1.0 - gamma) * teleport[j];
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    for (auto k = P.row_offsets[i]; k < P.row_offsets[i + 1]; ++k) {
      a[P.row_friend[k]][i] -= gamma * P.row_prob[k];
    }
  }

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    if (std::abs(a[pivot][col]) < 1e-300) throw Error("oracle_linear_solve: singular system");
    std::swap(a[col], a[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double s = a[r][n];
    for (std::size_t c = r + 1; c < n; ++c) s -= a[r][c] * x[c];
    x[r] = s / a[r][r];
  }
  return x;
}

ClassProbs oracle_nb_posterior(const LabeledDataset& data, double alpha,
                               const FeatureVector& query) {
  using boost::multiprecision::cpp_rational;
  using boost::multiprecision::cpp_int;

  const auto to_count = [](double v) {
    if (v < 0.0 || v != std::floor(v)) {
      throw Error("oracle_nb_posterior: counts must be nonnegative integers");
    }
    return cpp_int(static_cast<long long>(v));
  };

  const auto V = data.n_features;
  std::array<cpp_int, kNumLabels> docs;
  std::array<cpp_int, kNumLabels> class_total;
  std::vector<std::array<cpp_int, kNumLabels>> term(V);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto c = index_of(data.labels[i]);
    docs[c] += 1;
    for (const auto& e : data.vectors[i].entries()) {
      const auto q = to_count(e.value);
      term.at(e.id)[c] += q;
      class_total[c] += q;
    }
  }
  for (const auto& d : docs) {
    if (d == 0) throw Error("oracle_nb_posterior: every class needs an instance");
  }

  const cpp_rational a(alpha);
  const cpp_rational n_docs(cpp_int(data.size()));
  std::array<cpp_rational, kNumLabels> joint;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    cpp_rational p = cpp_rational(docs[c]) / n_docs;
    const cpp_rational denom = cpp_rational(class_total[c]) + a * cpp_rational(cpp_int(V));
    for (const auto& e : query.entries()) {
      if (e.id >= V) continue;
      const cpp_rational theta = (cpp_rational(term[e.id][c]) + a) / denom;
      for (auto q = to_count(e.value); q > 0; --q) p *= theta;
    }
    joint[c] = p;
  }
  const cpp_rational z = joint[0] + joint[1] + joint[2];
  ClassProbs out;
  for (std::size_t c = 0; c < kNumLabels; ++c) {
    out[c] = static_cast<double>(joint[c] / z);
  }
  return out;
}

}  // namespace sensor_rank
