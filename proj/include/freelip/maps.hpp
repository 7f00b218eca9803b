#pragma once

// Base-point-preserving maps between finite spaces, their linearizations on
// molecules, and the harnesses that compare free-space norms across them.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "freelip/config.hpp"
#include "freelip/errors.hpp"
#include "freelip/flow_norm.hpp"
#include "freelip/metric_space.hpp"
#include "freelip/molecule.hpp"
#include "freelip/random.hpp"
#include "freelip/sampling.hpp"

namespace freelip {

using SpacePtr = std::shared_ptr<const FiniteMetricSpace>;

/// h: N -> M with h(base) = base, stored pointwise.
class LipschitzMap {
 public:
  LipschitzMap(SpacePtr domain, SpacePtr codomain, std::vector<PointIndex> image)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), image_(std::move(image)) {
    if (!domain_ || !codomain_) throw ContractError("map needs both a domain and a codomain");
    if (image_.size() != domain_->size()) throw ContractError("map image has wrong length for its domain");
    for (PointIndex y : image_)
      if (y >= codomain_->size()) throw ContractError("map image point outside the codomain");
    if (image_[kBase] != kBase) throw ContractError("map must send the base point to the base point");
    for (PointIndex x = 0; x < image_.size(); ++x) {
      for (PointIndex y = x + 1; y < image_.size(); ++y) {
        const double r = codomain_->d(image_[x], image_[y]) / domain_->d(x, y);
        if (r > lip_) {
          lip_ = r;
          extremal_ = {x, y};
        }
      }
    }
  }

  static LipschitzMap identity(const SpacePtr& space) {
    std::vector<PointIndex> img(space->size());
    for (PointIndex i = 0; i < img.size(); ++i) img[i] = i;
    return LipschitzMap(space, space, std::move(img));
  }

  const FiniteMetricSpace& domain() const noexcept { return *domain_; }
  const FiniteMetricSpace& codomain() const noexcept { return *codomain_; }
  const SpacePtr& domain_ptr() const noexcept { return domain_; }
  const SpacePtr& codomain_ptr() const noexcept { return codomain_; }
  const std::vector<PointIndex>& image() const noexcept { return image_; }
  PointIndex operator()(PointIndex x) const { return image_.at(x); }

  /// max over x != y of d(h x, h y) / d(x, y); 0 iff h is constantly the base.
  double lipschitz_constant() const noexcept { return lip_; }
  /// A pair attaining the Lipschitz constant (meaningless when it is 0).
  std::pair<PointIndex, PointIndex> extremal_pair() const noexcept { return extremal_; }

 private:
  SpacePtr domain_;
  SpacePtr codomain_;
  std::vector<PointIndex> image_;
  double lip_ = 0.0;
  std::pair<PointIndex, PointIndex> extremal_{0, 0};
};

inline double lipschitz_constant(const LipschitzMap& h) { return h.lipschitz_constant(); }

/// (h o g)(x) = h(g(x)).
inline LipschitzMap compose(const LipschitzMap& h, const LipschitzMap& g) {
  if (g.codomain().id() != h.domain().id()) throw SpaceMismatch("maps are not composable");
  std::vector<PointIndex> img(g.domain().size());
  for (PointIndex x = 0; x < img.size(); ++x) img[x] = h(g(x));
  return LipschitzMap(g.domain_ptr(), h.codomain_ptr(), std::move(img));
}

/// Pushforward sum_x a_x delta(h(x)).
inline Molecule linearize(const LipschitzMap& h, const Molecule& mu) {
  require_same_space(h.domain(), mu);
  std::vector<std::pair<PointIndex, double>> entries;
  for (const auto& [x, a] : mu.coeffs()) entries.emplace_back(h(x), a);
  return Molecule(h.codomain(), entries);
}

/// A subset N of an ambient space containing the base, with the induced
/// distances. Induced point i corresponds to ambient point indices()[i].
class SubspaceView {
 public:
  SubspaceView(SpacePtr ambient, std::vector<PointIndex> subset) : ambient_(std::move(ambient)) {
    if (!ambient_) throw ContractError("subspace needs an ambient space");
    std::sort(subset.begin(), subset.end());
    subset.erase(std::unique(subset.begin(), subset.end()), subset.end());
    if (subset.empty() || subset.front() != kBase) throw ContractError("subset must contain the base point");
    if (subset.back() >= ambient_->size()) throw ContractError("subset point outside the ambient space");
    indices_ = std::move(subset);
    std::vector<std::string> labels;
    std::vector<std::vector<double>> m(indices_.size(), std::vector<double>(indices_.size()));
    for (std::size_t i = 0; i < indices_.size(); ++i) {
      labels.push_back(ambient_->label(indices_[i]));
      for (std::size_t j = 0; j < indices_.size(); ++j) m[i][j] = ambient_->d(indices_[i], indices_[j]);
    }
    induced_ = std::make_shared<const FiniteMetricSpace>(std::move(labels), std::move(m));
  }

  const FiniteMetricSpace& ambient() const noexcept { return *ambient_; }
  const FiniteMetricSpace& induced() const noexcept { return *induced_; }
  const std::vector<PointIndex>& indices() const noexcept { return indices_; }

  /// Inclusion N -> M.
  LipschitzMap inclusion() const { return LipschitzMap(induced_, ambient_, indices_); }

 private:
  SpacePtr ambient_;
  SpacePtr induced_;
  std::vector<PointIndex> indices_;
};

struct OperatorNormReport {
  std::vector<double> ratios;  // ||L mu|| / ||mu|| per sample
  double max_ratio = 0.0;
  double lip = 0.0;
  double extremal_ratio = 0.0;  // ratio on the elementary molecule of the Lip-extremal pair
  bool ok = false;
};

/// Samples ||L[h;p] mu|| / ||mu||: all elementary molecules of the domain,
/// then `samples` seeded random ones. The sampled maximum is a lower bound
/// for the operator norm; ok checks it never exceeds Lip(h).
inline OperatorNormReport operator_norm_check(const LipschitzMap& h, double p, std::size_t samples, std::uint64_t seed,
                                              const SolverOptions& opt = {}) {
  require_p(p);
  const auto& dom = h.domain();
  const auto& cod = h.codomain();
  std::vector<Molecule> mols;
  for (PointIndex x = 0; x < dom.size(); ++x)
    for (PointIndex y = x + 1; y < dom.size(); ++y) mols.push_back(elementary(dom, x, y));
  for (std::size_t s = 0; s < samples && dom.size() > 1; ++s) {
    Rng rng = derive_rng(seed, s);
    mols.push_back(random_molecule(dom, rng, s % 2 == 0 ? CoefficientKind::Discrete : CoefficientKind::Continuous));
  }

  OperatorNormReport rep;
  rep.lip = h.lipschitz_constant();
  for (const auto& mu : mols) {
    const double den = pnorm(dom, mu, p, NormMethod::Auto, opt).value;
    const double num = pnorm(cod, linearize(h, mu), p, NormMethod::Auto, opt).value;
    const double r = num / den;
    rep.ratios.push_back(r);
    rep.max_ratio = std::max(rep.max_ratio, r);
  }
  if (dom.size() > 1 && rep.lip > 0.0) {
    const auto [x, y] = h.extremal_pair();
    const Molecule e = elementary(dom, x, y);
    rep.extremal_ratio = pnorm(cod, linearize(h, e), p, NormMethod::Auto, opt).value /
                         pnorm(dom, e, p, NormMethod::Auto, opt).value;
  }
  rep.ok = rep.max_ratio <= rep.lip + opt.tol.duality_gap;
  return rep;
}

/// Upper bound on ||L^{-1}|| for the inclusion of a subset of a metric space.
inline double embedding_bound(double p) {
  require_p(p);
  return 1500.0 * std::pow(18.0, 1.0 / p);
}

struct DistortionSample {
  std::size_t id = 0;
  std::string kind;  // "elementary", "discrete" or "continuous"
  Molecule molecule;  // over the induced space
  double sub_norm = 0.0;
  double ambient_norm = 0.0;
  double ratio = 0.0;
  bool within_bound = false;
};

struct DistortionReport {
  std::vector<DistortionSample> samples;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::size_t argmax = 0;
  double bound = 0.0;
  // The ambient satisfies the triangle inequality, i.e. the bound's hypothesis.
  bool ambient_metric = false;
  bool ok = false;
};

/// Compares ||mu||_{F_p(N)} with ||L mu||_{F_p(M)} for molecules supported
/// on N: every elementary molecule of N, then `samples` seeded random ones
/// (discrete coefficients first, then continuous). Both norms are exact.
inline DistortionReport subspace_distortion(const SubspaceView& view, double p, std::size_t samples,
                                            std::uint64_t seed, const SolverOptions& opt = {}) {
  require_p(p);
  const auto& sub = view.induced();
  const auto incl = view.inclusion();

  std::vector<std::pair<std::string, Molecule>> mols;
  for (PointIndex x = 0; x < sub.size(); ++x)
    for (PointIndex y = x + 1; y < sub.size(); ++y) mols.emplace_back("elementary", elementary(sub, x, y));
  const std::size_t discrete = (samples + 1) / 2;
  for (std::size_t s = 0; s < samples && sub.size() > 1; ++s) {
    Rng rng = derive_rng(seed, s);
    const auto kind = s < discrete ? CoefficientKind::Discrete : CoefficientKind::Continuous;
    mols.emplace_back(s < discrete ? "discrete" : "continuous", random_molecule(sub, rng, kind));
  }

  DistortionReport rep;
  rep.bound = embedding_bound(p);
  rep.ambient_metric = is_metric(view.ambient(), opt.tol);
  rep.ok = true;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (auto& [kind, mu] : mols) {
    DistortionSample s{rep.samples.size(), kind, mu};
    s.sub_norm = forest_exact(sub, mu, p, opt).value;
    s.ambient_norm = forest_exact(view.ambient(), linearize(incl, mu), p, opt).value;
    s.ratio = s.sub_norm / s.ambient_norm;
    s.within_bound = s.ratio >= 1.0 - opt.tol.cost_relative && s.ratio <= rep.bound;
    rep.ok = rep.ok && s.within_bound;
    if (s.ratio > rep.max_ratio) {
      rep.max_ratio = s.ratio;
      rep.argmax = s.id;
    }
    rep.min_ratio = std::min(rep.min_ratio, s.ratio);
    rep.samples.push_back(std::move(s));
  }
  if (rep.samples.empty()) rep.min_ratio = 0.0;
  return rep;
}

}  // namespace freelip
