#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace reslab::model {

/// A localized well or bump. Positive depth lowers the potential.
struct Well {
    enum class Shape { Square, Gaussian };
    Shape shape = Shape::Square;
    double depth = 0.0;
    double radius = 1.0;
    std::vector<double> center;  ///< empty means the origin

    /// Profile value in [0, 1] at x: indicator of the ball for Square (1/2 on the rim),
    /// exp(-|x-c|^2 / r^2) for Gaussian.
    double profile(std::span<const double> x) const;
};

/// V = V1 + V2 with V1 ∈ L^p (localized part) and V2 bounded, V → sigma0 at infinity.
class PotentialSpec {
public:
    using Evaluator = std::function<double(std::span<const double>)>;

    /// V2 ≡ sigma0, V1 = -Σ depth · profile.
    static PotentialSpec from_wells(double sigma0, std::vector<Well> wells);

    /// Generic decomposition; `v2_bound` is the declared sup of |V2|.
    static PotentialSpec from_parts(double sigma0, Evaluator v1, double p, Evaluator v2, double v2_bound);

    double operator()(std::span<const double> x) const { return v1_(x) + v2_(x); }
    double v1(std::span<const double> x) const { return v1_(x); }
    double v2(std::span<const double> x) const { return v2_(x); }

    double sigma0() const noexcept { return sigma0_; }
    double p() const noexcept { return p_; }
    double v2_bound() const noexcept { return v2_bound_; }
    const std::vector<Well>& wells() const noexcept { return wells_; }

private:
    double sigma0_ = 0.0;
    Evaluator v1_;
    double p_ = 2.0;
    Evaluator v2_;
    double v2_bound_ = 0.0;
    std::vector<Well> wells_;
};

struct PotentialCheck {
    bool v2_bounded = true;
    bool decays_to_sigma0 = true;
    double worst_v2 = 0.0;     ///< largest sampled |V2|
    double worst_decay = 0.0;  ///< largest |V - sigma0| on the far sphere
};

/// Samples |V2| on the box [-far_radius, far_radius]^dim and |V - sigma0|
/// along `rays` deterministic directions at distance far_radius.
PotentialCheck check_potential(const PotentialSpec& spec, int dim, double far_radius, double decay_tolerance,
                               int rays = 64);

}  // namespace reslab::model
