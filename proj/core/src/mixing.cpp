#include "shearmix/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fftw3.h>

#include "shearmix/errors.hpp"
#include "shearmix/stats.hpp"

namespace shearmix {

ScalarField advect(const Observable& u0, const Schedule& schedule, std::size_t m, std::size_t grid_n,
                   const Model& model) {
    if (grid_n < 4) throw PreconditionError("advect: grid_n >= 4 required");
    if (m > schedule.steps()) throw PreconditionError("advect: schedule shorter than m steps");
    ScalarField f;
    f.grid_n = grid_n;
    f.values.resize(grid_n * grid_n);
    f.initial = u0.describe();
    f.step = m;
    f.seed = schedule.seed;
    const double h = kTwoPi / static_cast<double>(grid_n);
    const auto n = static_cast<std::int64_t>(grid_n);
#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < n; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < grid_n; ++j) {
            TorusPoint y{static_cast<double>(i) * h, static_cast<double>(j) * h};
            for (std::size_t k = m; k-- > 0;) y = inverse_step(y, schedule.horizontal(k), schedule.vertical(k), model);
            f.values[i * grid_n + j] = u0(y.q, y.p);
        }
    }
    return f;
}

std::vector<double> default_radii(std::size_t grid_n) {
    const double floor_r = 8.0 * kTwoPi / static_cast<double>(grid_n);
    std::vector<double> r;
    for (double x = kPi; x >= floor_r; x *= 0.5) r.push_back(x);
    return r;
}

struct BallMeans::Plans {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_complex* work = nullptr;
    fftw_plan forward = nullptr;
    fftw_plan backward = nullptr;

    ~Plans() {
        if (forward) fftw_destroy_plan(forward);
        if (backward) fftw_destroy_plan(backward);
        fftw_free(real);
        fftw_free(spec);
        fftw_free(work);
    }
};

BallMeans::BallMeans(std::size_t grid_n, std::vector<double> radii)
    : n_(grid_n), radii_(std::move(radii)), plans_(std::make_unique<Plans>()) {
    const double h = kTwoPi / static_cast<double>(n_);
    for (std::size_t k = 0; k < radii_.size(); ++k) {
        if (!(radii_[k] >= 2.0 * h)) throw PreconditionError("mixing: radii must be at least two grid cells");
        if (k > 0 && !(radii_[k] < radii_[k - 1])) throw PreconditionError("mixing: radii must be strictly descending");
    }
    const std::size_t nc = n_ / 2 + 1;
    const int ni = static_cast<int>(n_);
    plans_->real = fftw_alloc_real(n_ * n_);
    plans_->spec = fftw_alloc_complex(n_ * nc);
    plans_->work = fftw_alloc_complex(n_ * nc);
    // FFTW_ESTIMATE keeps the algorithm choice, and hence the bits, reproducible.
    plans_->forward = fftw_plan_dft_r2c_2d(ni, ni, plans_->real, plans_->spec, FFTW_ESTIMATE);
    plans_->backward = fftw_plan_dft_c2r_2d(ni, ni, plans_->work, plans_->real, FFTW_ESTIMATE);

    for (double r : radii_) {
        std::size_t count = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double dq = angle_diff(static_cast<double>(i) * h, 0.0);
            for (std::size_t j = 0; j < n_; ++j) {
                const double dp = angle_diff(static_cast<double>(j) * h, 0.0);
                const bool in = std::hypot(dq, dp) <= r;
                plans_->real[i * n_ + j] = in ? 1.0 : 0.0;
                count += in;
            }
        }
        fftw_execute(plans_->forward);
        std::vector<std::complex<double>> hat(n_ * nc);
        for (std::size_t k = 0; k < n_ * nc; ++k) hat[k] = {plans_->spec[k][0], plans_->spec[k][1]};
        mask_hat_.push_back(std::move(hat));
        cells_.push_back(count);
    }
}

BallMeans::~BallMeans() = default;

void BallMeans::transform(const ScalarField& field) const {
    if (field.grid_n != n_) throw PreconditionError("mixing: field grid does not match");
    std::copy(field.values.begin(), field.values.end(), plans_->real);
    fftw_execute(plans_->forward);
}

void BallMeans::convolve(std::size_t k, std::vector<double>& out) const {
    const std::size_t total = n_ * (n_ / 2 + 1);
    const auto& hat = mask_hat_[k];
    for (std::size_t i = 0; i < total; ++i) {
        const std::complex<double> z = std::complex<double>(plans_->spec[i][0], plans_->spec[i][1]) * hat[i];
        plans_->work[i][0] = z.real();
        plans_->work[i][1] = z.imag();
    }
    fftw_execute(plans_->backward);
    const double scale = 1.0 / (static_cast<double>(n_) * static_cast<double>(n_) * static_cast<double>(cells_[k]));
    out.assign(plans_->real, plans_->real + n_ * n_);
    for (double& v : out) v *= scale;
}

std::vector<double> BallMeans::max_abs_means(const ScalarField& field) const {
    transform(field);
    std::vector<double> out(radii_.size());
    std::vector<double> buf;
    for (std::size_t k = 0; k < radii_.size(); ++k) {
        convolve(k, buf);
        double mx = 0.0;
        for (double v : buf) mx = std::max(mx, std::abs(v));
        out[k] = mx;
    }
    return out;
}

std::vector<double> BallMeans::means(const ScalarField& field, std::size_t k) const {
    transform(field);
    std::vector<double> buf;
    convolve(k, buf);
    return buf;
}

double mixing_scale(const ScalarField& field, std::span<const double> radii, double threshold) {
    const BallMeans balls(field.grid_n, std::vector<double>(radii.begin(), radii.end()));
    const auto mx = balls.max_abs_means(field);
    for (std::size_t k = 0; k < radii.size(); ++k)
        if (mx[k] > threshold) return radii[k];
    return 0.0;
}

double profile_gradient_l1(const ShearProfile& f) {
    if (f.is_identity()) return kTwoPi;
    std::vector<double> cuts = zero_set(f, 1).roots;
    if (cuts.empty()) cuts.push_back(0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        const double a = cuts[k];
        const double b = k + 1 < cuts.size() ? cuts[k + 1] : cuts[0] + kTwoPi;
        auto integrand = [&](double z) { return std::abs(f(z, 1)); };
        total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 15, 1e-12);
    }
    return total;
}

double grad_norm_l1(const Schedule& schedule, std::size_t rho, const Model& model) {
    if (rho > schedule.durations.size()) throw PreconditionError("grad_norm_l1: schedule has fewer than rho slots");
    const double g1 = kTwoPi * profile_gradient_l1(model.f1);
    const double g2 = kTwoPi * profile_gradient_l1(model.f2);
    CompensatedSum acc;
    for (std::size_t k = 0; k < rho; ++k) acc.add(schedule.durations[k] * (k % 2 == 0 ? g1 : g2));
    return acc.value();
}

MixReport mix_run(const Model& model, const Observable& u0, const Schedule& schedule, std::size_t m_max,
                  std::size_t grid_n, std::span<const double> radii, double threshold) {
    if (m_max > schedule.steps()) throw PreconditionError("mix_run: schedule shorter than m_max steps");
    if (std::abs(u0.quadrature_mean()) > 1e-6) throw PreconditionError("mix_run: u0 is not mean-zero");
    if (!(u0.sup_norm() > threshold)) throw PreconditionError("mix_run: sup|u0| must exceed the threshold");
    const BallMeans balls(grid_n, std::vector<double>(radii.begin(), radii.end()));
    const double small_ball = std::exp(-1.0);
    MixReport rep;
    double eta = 0.0;
    std::vector<double> xs, ys;
    for (std::size_t m = 0; m <= m_max; ++m) {
        const ScalarField field = advect(u0, schedule, m, grid_n, model);
        double sup = 0.0;
        for (double v : field.values) sup = std::max(sup, std::abs(v));
        if (m == 0) rep.sup_initial = sup;
        rep.sup_final = sup;
        const auto mx = balls.max_abs_means(field);
        MixStepRow row;
        row.m = m;
        for (std::size_t k = 0; k < radii.size(); ++k) {
            if (mx[k] <= threshold) continue;
            if (row.mix_scale == 0.0) row.mix_scale = radii[k];
            if (radii[k] < small_ball) eta = std::max(eta, static_cast<double>(m) / std::abs(std::log(radii[k])));
        }
        row.grad_norm_l1_cum = grad_norm_l1(schedule, 2 * m, model);
        row.eta_hat_running = eta;
        if (row.mix_scale > 0.0) {
            rep.m_star = m;
            xs.push_back(static_cast<double>(m));
            ys.push_back(std::log(row.mix_scale));
        }
        rep.rows.push_back(row);
    }
    const LinearFit fit = fit_line(xs, ys);
    rep.slope = fit.slope;
    rep.intercept = fit.intercept;
    rep.r2 = fit.r2;
    rep.mixing_observed = !rep.rows.empty() && rep.rows.back().mix_scale < rep.rows.front().mix_scale;
    rep.eta_hat = rep.mixing_observed ? eta : std::numeric_limits<double>::infinity();
    const double norm = grad_norm_l1(schedule, 2 * rep.m_star, model);
    rep.xi_hat = norm > 0.0 ? static_cast<double>(rep.m_star) / norm : 0.0;
    return rep;
}

}  // namespace shearmix
