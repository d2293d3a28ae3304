#include "klproj/model_space.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_set>

namespace klproj {

namespace {

void finish_table(ModelTable& table, std::map<ModelId, long>& counts, long total) {
  table.total = total;
  std::map<int, long> size_totals;
  for (const auto& [id, count] : counts) size_totals[id.count()] += count;
  table.rows.reserve(counts.size());
  for (const auto& [id, count] : counts) {
    ModelRow row;
    row.id = id;
    row.count = count;
    row.freq = total > 0 ? static_cast<double>(count) / static_cast<double>(total) : 0.0;
    row.freq_within_size = static_cast<double>(count) / static_cast<double>(size_totals[id.count()]);
    table.rows.push_back(std::move(row));
  }
  std::sort(table.rows.begin(), table.rows.end(), [](const ModelRow& a, const ModelRow& b) {
    const int sa = a.id.count(), sb = b.id.count();
    if (sa != sb) return sa < sb;
    if (a.count != b.count) return a.count > b.count;
    return a.id.members() < b.id.members();
  });
}

}  // namespace

ModelTable model_frequencies(const ProjectionEnsemble& ensemble, Pooling pooling, double lambda) {
  ModelTable table;
  std::map<ModelId, long> counts;
  long total = 0;
  if (pooling == Pooling::at_lambda) {
    const Index g = ensemble.grid_index(lambda);
    for (const ModelId& id : ensemble.models_at(g)) {
      ++counts[id];
      ++total;
    }
    std::ostringstream prov;
    prov << "at_lambda=" << lambda;
    table.provenance = prov.str();
  } else {
    const Index s = ensemble.draws();
    const Index g = ensemble.grid_size();
    std::vector<std::vector<ModelId>> per_level;
    per_level.reserve(static_cast<std::size_t>(g));
    for (Index k = 0; k < g; ++k) per_level.push_back(ensemble.models_at(k));
    for (Index i = 0; i < s; ++i) {
      std::unordered_set<ModelId, ModelIdHash> seen;
      for (Index k = 0; k < g; ++k) {
        const ModelId& id = per_level[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        if (seen.insert(id).second) {
          ++counts[id];
          ++total;
        }
      }
    }
    table.provenance = "along_path";
  }
  finish_table(table, counts, total);
  return table;
}

Vector inclusion_probabilities(const ProjectionEnsemble& ensemble, double lambda) {
  const Index g = ensemble.grid_index(lambda);
  const Matrix& b = ensemble.beta[static_cast<std::size_t>(g)];
  Vector out = Vector::Zero(b.cols());
  for (Index j = 0; j < b.cols(); ++j) {
    if (ensemble.penalized[static_cast<std::size_t>(j)] == 0) continue;
    double hits = 0.0;
    for (Index i = 0; i < b.rows(); ++i)
      if (std::abs(b(i, j)) > kActiveThreshold) hits += 1.0;
    out[j] = hits / static_cast<double>(b.rows());
  }
  return out;
}

double expected_model_size(const ProjectionEnsemble& ensemble, double lambda) {
  return ensemble.sizes_at(ensemble.grid_index(lambda)).mean();
}

double PredictiveMixture::density(Index row, double value) const {
  const Index s = component_means.rows();
  double total = 0.0;
  for (Index i = 0; i < s; ++i) {
    const double m = component_means(i, row);
    switch (family) {
      case FamilyKind::gaussian: {
        const double phi = component_phis[i];
        total += std::exp(-0.5 * (value - m) * (value - m) / phi) / std::sqrt(2.0 * M_PI * phi);
        break;
      }
      case FamilyKind::binomial: {
        const double pr = std::min(1.0 - 1e-12, std::max(1e-12, m));
        total += value > 0.5 ? pr : 1.0 - pr;
        break;
      }
      case FamilyKind::poisson: {
        const double rate = std::max(m, 1e-12);
        total += std::exp(value * std::log(rate) - rate - std::lgamma(value + 1.0));
        break;
      }
    }
  }
  return total / static_cast<double>(s);
}

PredictiveMixture predictive_mixture(const ProjectionEnsemble& ensemble, double lambda,
                                     const Matrix& new_X) {
  const Index g = ensemble.grid_index(lambda);
  const Matrix& b = ensemble.beta[static_cast<std::size_t>(g)];
  if (new_X.cols() != b.cols())
    throw std::invalid_argument("new design rows do not match the coefficient count");
  const Index s = b.rows();
  const Index r = new_X.rows();

  PredictiveMixture mix;
  mix.family = ensemble.family;
  mix.component_phis = ensemble.family == FamilyKind::gaussian
                           ? ensemble.phi[static_cast<std::size_t>(g)]
                           : Vector::Ones(s);
  mix.component_means.resize(s, r);
  const Matrix eta = b * new_X.transpose();
  for (Index i = 0; i < s; ++i)
    mix.component_means.row(i) = mean_from_eta(ensemble.family, eta.row(i).transpose()).transpose();

  mix.mean = mix.component_means.colwise().mean().transpose();
  mix.variance.resize(r);
  for (Index c = 0; c < r; ++c) {
    const Vector m = mix.component_means.col(c);
    double conditional = 0.0;
    switch (ensemble.family) {
      case FamilyKind::gaussian:
        conditional = mix.component_phis.mean();
        break;
      case FamilyKind::binomial:
        conditional = (m.array() * (1.0 - m.array())).mean();
        break;
      case FamilyKind::poisson:
        conditional = m.mean();
        break;
    }
    const double spread = (m.array() - mix.mean[c]).square().mean();
    mix.variance[c] = conditional + spread;
  }
  return mix;
}

}  // namespace klproj
