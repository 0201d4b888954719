#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "integrals/error.hpp"
#include "integrals/perm_group.hpp"

namespace integrals {

namespace detail {

// (g, h) acting on n + m points: g on the first n, h on the rest.
inline Permutation pair_perm(const Permutation& g, const Permutation& h) {
  const std::size_t n = g.degree(), m = h.degree();
  std::vector<Point> img(n + m);
  for (std::size_t x = 0; x < n; ++x) img[x] = g[static_cast<Point>(x)];
  for (std::size_t x = 0; x < m; ++x) img[n + x] = static_cast<Point>(n + h[static_cast<Point>(x)]);
  return Permutation(std::move(img));
}

inline Permutation left_part(const Permutation& p, std::size_t n) {
  std::vector<Point> img(n);
  for (std::size_t x = 0; x < n; ++x) img[x] = p[static_cast<Point>(x)];
  return Permutation(std::move(img));
}

inline Permutation right_part(const Permutation& p, std::size_t n) {
  const std::size_t m = p.degree() - n;
  std::vector<Point> img(m);
  for (std::size_t x = 0; x < m; ++x) img[x] = p[static_cast<Point>(n + x)] - static_cast<Point>(n);
  return Permutation(std::move(img));
}

}  // namespace detail

/// A homomorphism between permutation groups, given by the images of the
/// domain generators. Well-definedness is verified at construction through
/// the graph subgroup {(g, φ(g))}: φ is well defined exactly when that
/// subgroup has the same order as the domain.
class Homomorphism {
 public:
  Homomorphism(PermGroup domain, PermGroup codomain, std::vector<Permutation> images)
      : domain_(std::move(domain)), codomain_(std::move(codomain)), images_(std::move(images)),
        lazy_(std::make_shared<Lazy>()) {
    if (images_.size() != domain_.generators().size())
      throw PreconditionError("homomorphism: image count differs from generator count");
    for (const auto& im : images_) {
      if (im.degree() != codomain_.degree()) throw DegreeMismatch(im.degree(), codomain_.degree());
      if (!codomain_.contains(im)) throw PreconditionError("homomorphism: image is not in the codomain");
    }
    const auto base = domain_.chain().base();
    graph_ = std::make_shared<const StabChain>(domain_.degree() + codomain_.degree(), graph_generators(), base);
    if (graph_->order() != domain_.order())
      throw PreconditionError("homomorphism: generator images do not define a homomorphism");
  }

  const PermGroup& domain() const { return domain_; }
  const PermGroup& codomain() const { return codomain_; }
  const std::vector<Permutation>& images() const { return images_; }

  /// φ(g); g must lie in the domain.
  Permutation apply(const Permutation& g) const {
    if (g.degree() != domain_.degree()) throw DegreeMismatch(g.degree(), domain_.degree());
    const std::size_t n = domain_.degree();
    auto r = graph_->sift(detail::pair_perm(g, codomain_.identity()));
    if (!detail::left_part(r.residue, n).is_identity()) throw PreconditionError("homomorphism: element not in domain");
    return detail::right_part(r.residue, n).inverse();
  }

  PermGroup image() const {
    std::call_once(lazy_->image_once, [&] { lazy_->image = PermGroup(codomain_.degree(), images_); });
    return lazy_->image;
  }

  bool is_surjective() const { return image().order() == codomain_.order(); }

  PermGroup kernel() const {
    ensure_kernel();
    return lazy_->kernel;
  }

  bool is_injective() const { return kernel().is_trivial(); }

  /// Some g with φ(g) = h; h must lie in the image.
  Permutation preimage(const Permutation& h) const {
    ensure_kernel();
    const std::size_t n = domain_.degree();
    const auto& chain = *lazy_->coimage_chain;
    auto r = chain.sift(detail::pair_perm(domain_.identity(), h));
    // Levels up to the image base fix the codomain part once passed.
    if (!detail::right_part(r.residue, n).is_identity() || r.level < lazy_->image_levels)
      throw PreconditionError("homomorphism: element not in image");
    return detail::left_part(r.residue, n).inverse();
  }

 private:
  struct Lazy {
    std::once_flag image_once, kernel_once;
    PermGroup image;
    PermGroup kernel;
    std::shared_ptr<const StabChain> coimage_chain;
    std::size_t image_levels = 0;
  };

  std::vector<Permutation> graph_generators() const {
    std::vector<Permutation> gs;
    for (std::size_t i = 0; i < images_.size(); ++i) gs.push_back(detail::pair_perm(domain_.generators()[i], images_[i]));
    return gs;
  }

  void ensure_kernel() const {
    std::call_once(lazy_->kernel_once, [&] {
      const std::size_t n = domain_.degree();
      const PermGroup img = image();
      std::vector<Point> prefix;
      for (Point b : img.chain().base()) prefix.push_back(static_cast<Point>(n + b));
      auto chain = std::make_shared<const StabChain>(n + codomain_.degree(), graph_generators(), prefix);
      std::vector<Permutation> kg;
      for (const auto& s : chain->stabilizer_generators(prefix.size())) kg.push_back(detail::left_part(s, n));
      lazy_->kernel = PermGroup(n, kg);
      lazy_->coimage_chain = chain;
      lazy_->image_levels = prefix.size();
    });
  }

  PermGroup domain_, codomain_;
  std::vector<Permutation> images_;
  std::shared_ptr<const StabChain> graph_;
  std::shared_ptr<Lazy> lazy_;
};

/// ψ∘φ.
inline Homomorphism compose(const Homomorphism& psi, const Homomorphism& phi) {
  if (phi.codomain().degree() != psi.domain().degree()) throw DegreeMismatch(phi.codomain().degree(), psi.domain().degree());
  std::vector<Permutation> imgs;
  for (const auto& x : phi.images()) imgs.push_back(psi.apply(x));
  return Homomorphism(phi.domain(), psi.codomain(), std::move(imgs));
}

inline Homomorphism identity_hom(const PermGroup& g) { return Homomorphism(g, g, g.generators()); }

/// Inclusion of a subgroup.
inline Homomorphism inclusion(const PermGroup& sub, const PermGroup& g) { return Homomorphism(sub, g, sub.generators()); }

}  // namespace integrals
