#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shearmix/flow.hpp"
#include "shearmix/observable.hpp"

namespace shearmix {

/// u0 pulled back through m steps, sampled on the N x N grid
/// (q_i, p_j) = (2 pi i / N, 2 pi j / N); values[i * N + j].
struct ScalarField {
    std::size_t grid_n = 0;
    std::vector<double> values;
    std::string initial;
    std::size_t step = 0;
    std::optional<std::uint64_t> seed;

    double at(std::size_t i, std::size_t j) const { return values[i * grid_n + j]; }
};

/// u(x) = u0(Phi^-m x), with the inverse steps applied newest first.
ScalarField advect(const Observable& u0, const Schedule& schedule, std::size_t m, std::size_t grid_n,
                   const Model& model);

/// Dyadic radii pi, pi/2, ... down to 8 grid cells.
std::vector<double> default_radii(std::size_t grid_n);

/// Means over quotient-metric disks centred at every grid point, for a fixed
/// set of radii, computed by FFT convolution with the rasterized disks.
class BallMeans {
public:
    BallMeans(std::size_t grid_n, std::vector<double> radii);
    ~BallMeans();
    BallMeans(const BallMeans&) = delete;
    BallMeans& operator=(const BallMeans&) = delete;

    /// max over centres of |ball mean|, one entry per radius.
    std::vector<double> max_abs_means(const ScalarField& field) const;
    /// All ball means for radius index k.
    std::vector<double> means(const ScalarField& field, std::size_t k) const;
    const std::vector<double>& radii() const { return radii_; }
    std::size_t cells(std::size_t k) const { return cells_[k]; }

private:
    struct Plans;
    std::size_t n_;
    std::vector<double> radii_;
    std::vector<std::size_t> cells_;
    std::vector<std::vector<std::complex<double>>> mask_hat_;
    std::unique_ptr<Plans> plans_;

    void transform(const ScalarField& field) const;
    void convolve(std::size_t k, std::vector<double>& out) const;
};

/// Largest radius whose ball means exceed the threshold somewhere; 0 if none.
/// Radii must be descending and at least two grid cells.
double mixing_scale(const ScalarField& field, std::span<const double> radii, double threshold = 1.0);

/// Integral of |f'| over the circle, by adaptive Gauss-Kronrod between critical points.
double profile_gradient_l1(const ShearProfile& f);

/// Sum over the first rho unit slots of tau_slot * 2 pi * int |f'|; odd
/// slots shear horizontally (f1'), even slots vertically (f2').
double grad_norm_l1(const Schedule& schedule, std::size_t rho, const Model& model);

struct MixStepRow {
    std::size_t m = 0;
    double mix_scale = 0.0;
    double grad_norm_l1_cum = 0.0;
    double eta_hat_running = 0.0;
};

struct MixReport {
    std::vector<MixStepRow> rows;
    double slope = 0.0;  // of log mix_scale against m
    double intercept = 0.0;
    double r2 = 0.0;
    double eta_hat = 0.0;  // lower estimate; +inf when no mixing was observed
    double xi_hat = 0.0;
    std::size_t m_star = 0;  // last step with a nonzero scale
    bool mixing_observed = false;
    double sup_initial = 0.0;
    double sup_final = 0.0;
};

MixReport mix_run(const Model& model, const Observable& u0, const Schedule& schedule, std::size_t m_max,
                  std::size_t grid_n, std::span<const double> radii, double threshold = 1.0);

}  // namespace shearmix
