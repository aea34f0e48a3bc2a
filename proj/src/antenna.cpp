// SPDX-License-Identifier: Apache-2.0

#include "beamsim/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace beamsim
{

namespace
{

constexpr double kPi = std::numbers::pi;
constexpr double kFloorDb = -200.0;

// c_p = sum_m w_m w_{m+p}, scaled by (sum w)^-2 so the series evaluates |AF|^2.
std::vector<double> autocorrelation(const std::vector<double> &w, double sum_w)
{
    const std::size_t n = w.size();
    std::vector<double> c(n, 0.0);
    const double norm = 1.0 / (sum_w * sum_w);
    for (std::size_t p = 0; p < n; ++p)
    {
        double acc = 0.0;
        for (std::size_t m = 0; m + p < n; ++m)
            acc += w[m] * w[m + p];
        c[p] = (p == 0 ? 1.0 : 2.0) * acc * norm;
    }
    return c;
}

// Clenshaw evaluation of sum_p c_p cos(p beta).
inline double cosine_series(const std::vector<double> &c, double beta)
{
    const double x = std::cos(beta);
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size() - 1; k >= 1; --k)
    {
        const double b0 = c[k] + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    return std::max(0.0, c[0] + x * b1 - b2);
}

std::complex<double> phasor_sum(const std::vector<double> &w, double sum_w, double beta)
{
    // sum_m w_m exp(-j m beta) / sum w
    const std::complex<double> step = std::polar(1.0, -beta);
    std::complex<double> ph{1.0, 0.0};
    std::complex<double> acc{0.0, 0.0};
    for (double wm : w)
    {
        acc += wm * ph;
        ph *= step;
    }
    return acc / sum_w;
}

inline double image_factor_v(double v)
{
    return std::sin(0.5 * kPi * v);
}

} // namespace

void ArrayDesign::validate(double d_x_max, double d_z_max) const
{
    if (n_x < 1 || n_z < 1)
        throw std::invalid_argument("ArrayDesign: element counts must be >= 1");
    if (!(d_x > 0.0 && d_x <= d_x_max + 1e-12))
        throw std::invalid_argument("ArrayDesign: d_x out of range (0, " + std::to_string(d_x_max) + "]");
    if (!(d_z > 0.0 && d_z <= d_z_max + 1e-12))
        throw std::invalid_argument("ArrayDesign: d_z out of range (0, " + std::to_string(d_z_max) + "]");
    if (!(alpha_x > 0.0 && alpha_x <= 1.0) || !(alpha_z > 0.0 && alpha_z <= 1.0))
        throw std::invalid_argument("ArrayDesign: taper ratios must lie in (0, 1]");
}

std::vector<double> gaussian_taper(int n, double alpha)
{
    if (n < 1)
        throw std::invalid_argument("gaussian_taper: n must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("gaussian_taper: alpha must lie in (0, 1]");

    // exp(-((x - L/2) / sigma)^2) with sigma^2 = (L/2)^2 / -log(alpha) reduces to
    // alpha^(t^2), t in [-1, 1] the position relative to the half-length. The
    // spacing cancels, so the taper depends only on n and alpha.
    std::vector<double> w(static_cast<std::size_t>(n), 1.0);
    if (n == 1 || alpha == 1.0)
        return w;
    const double log_alpha = std::log(alpha);
    for (int m = 0; m < n; ++m)
    {
        const double t = 2.0 * m / (n - 1) - 1.0;
        w[static_cast<std::size_t>(m)] = std::exp(log_alpha * t * t);
    }
    const double peak = *std::max_element(w.begin(), w.end());
    for (double &x : w)
        x /= peak;
    return w;
}

TaperWeights taper_weights(const ArrayDesign &design)
{
    return {gaussian_taper(design.n_x, design.alpha_x), gaussian_taper(design.n_z, design.alpha_z)};
}

BeamPattern::BeamPattern(const ArrayDesign &design, const SteeringAngles &steer)
    : design_(design), steer_(steer)
{
    wx_ = gaussian_taper(design.n_x, design.alpha_x);
    wz_ = gaussian_taper(design.n_z, design.alpha_z);
    sum_wx_ = 0.0;
    for (double w : wx_)
        sum_wx_ += w;
    sum_wz_ = 0.0;
    for (double w : wz_)
        sum_wz_ += w;
    u_e_ = std::sin(steer.theta_e) * std::sin(steer.phi_e);
    w_e_ = std::cos(steer.theta_e);
    cx_ = autocorrelation(wx_, sum_wx_);
    cz_ = autocorrelation(wz_, sum_wz_);
}

std::complex<double> BeamPattern::af_x(double u) const
{
    return phasor_sum(wx_, sum_wx_, 2.0 * kPi * design_.d_x * (u - u_e_));
}

std::complex<double> BeamPattern::af_z(double w) const
{
    return phasor_sum(wz_, sum_wz_, 2.0 * kPi * design_.d_z * (w - w_e_));
}

double BeamPattern::af_x_power(double u) const
{
    if (cx_.size() == 1)
        return 1.0;
    return cosine_series(cx_, 2.0 * kPi * design_.d_x * (u - u_e_));
}

double BeamPattern::af_z_power(double w) const
{
    if (cz_.size() == 1)
        return 1.0;
    return cosine_series(cz_, 2.0 * kPi * design_.d_z * (w - w_e_));
}

double BeamPattern::normalized(const Direction &dir) const
{
    const double cos_phi = std::cos(dir.phi);
    if (cos_phi < 0.0)
        return 0.0;
    const double st = std::sin(dir.theta);
    const double u = st * std::sin(dir.phi);
    const double w = std::cos(dir.theta);
    const double ax = std::norm(af_x(u));
    const double az = std::norm(af_z(w));
    const double img = image_factor_v(st * cos_phi);
    return ax * az * img * img * std::max(0.0, st * st * st);
}

double BeamPattern::normalized_uw(double u, double w) const
{
    const double r2 = u * u + w * w;
    if (r2 >= 1.0)
        return 0.0;
    const double v = std::sqrt(1.0 - r2);
    const double img = image_factor_v(v);
    const double s2 = 1.0 - w * w;
    return af_x_power(u) * af_z_power(w) * img * img * s2 * std::sqrt(s2);
}

std::complex<double> array_factor_x(const ArrayDesign &design, const SteeringAngles &steer, const Direction &dir)
{
    return BeamPattern(design, steer).af_x(std::sin(dir.theta) * std::sin(dir.phi));
}

std::complex<double> array_factor_z(const ArrayDesign &design, const SteeringAngles &steer, const Direction &dir)
{
    return BeamPattern(design, steer).af_z(std::cos(dir.theta));
}

double image_factor(const Direction &dir)
{
    const double v = std::sin(dir.theta) * std::cos(dir.phi);
    if (v <= 0.0)
        return 0.0;
    return image_factor_v(v);
}

double dipole_gain(const Direction &dir)
{
    const double s = std::sin(dir.theta);
    return s * s * s;
}

double normalized_pattern(const ArrayDesign &design, const SteeringAngles &steer, const Direction &dir)
{
    return BeamPattern(design, steer).normalized(dir);
}

double pattern_solid_angle_integral(const ArrayDesign &design, const SteeringAngles &steer, int resolution)
{
    if (resolution < 64)
        throw std::invalid_argument("pattern_solid_angle_integral: resolution must be >= 64");
    const BeamPattern pattern(design, steer);
    const int n = resolution;
    const double h = kPi / n;

    std::vector<double> sin_phi(static_cast<std::size_t>(n)), cos_phi(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
    {
        const double phi = -0.5 * kPi + (j + 0.5) * h;
        sin_phi[static_cast<std::size_t>(j)] = std::sin(phi);
        cos_phi[static_cast<std::size_t>(j)] = std::cos(phi);
    }

    double total = 0.0;
    for (int i = 0; i < n; ++i)
    {
        const double theta = (i + 0.5) * h;
        const double st = std::sin(theta);
        const double row_factor = pattern.af_z_power(std::cos(theta)) * st * st * st * st;
        if (row_factor == 0.0)
            continue;
        double row = 0.0;
        for (int j = 0; j < n; ++j)
        {
            const auto jj = static_cast<std::size_t>(j);
            const double img = image_factor_v(st * cos_phi[jj]);
            row += pattern.af_x_power(st * sin_phi[jj]) * img * img;
        }
        total += row_factor * row;
    }
    return total * h * h;
}

double peak_gain_g0(const ArrayDesign &design, const SteeringAngles &steer, int resolution)
{
    const double coarse = 4.0 * kPi / pattern_solid_angle_integral(design, steer, resolution);
    const double fine = 4.0 * kPi / pattern_solid_angle_integral(design, steer, 2 * resolution);
    if (std::abs(fine - coarse) > 0.005 * fine)
        throw ConvergenceError("peak_gain_g0: quadrature did not converge (" + std::to_string(coarse) + " vs " +
                               std::to_string(fine) + ")");
    return fine;
}

std::optional<double> sidelobe_level_db(const ArrayDesign &design, const SteeringAngles &steer, int grid_resolution)
{
    if (grid_resolution < 16)
        throw std::invalid_argument("sidelobe_level_db: grid resolution must be >= 16");
    const BeamPattern pattern(design, steer);
    const double step = 2.0 / grid_resolution;
    const double ue = pattern.u_e();
    const double we = pattern.w_e();

    // Grid anchored so that index (ku0, kw0) is exactly the steering direction.
    const int ku_lo = static_cast<int>(std::ceil((-1.0 - ue) / step));
    const int ku_hi = static_cast<int>(std::floor((1.0 - ue) / step));
    const int kw_lo = static_cast<int>(std::ceil((-1.0 - we) / step));
    const int kw_hi = static_cast<int>(std::floor((1.0 - we) / step));
    const int nu = ku_hi - ku_lo + 1;
    const int nw = kw_hi - kw_lo + 1;
    const int iu0 = -ku_lo;
    const int iw0 = -kw_lo;

    std::vector<double> ax(static_cast<std::size_t>(nu)), az(static_cast<std::size_t>(nw));
    std::vector<double> us(static_cast<std::size_t>(nu)), ws(static_cast<std::size_t>(nw));
    for (int i = 0; i < nu; ++i)
    {
        us[static_cast<std::size_t>(i)] = ue + (ku_lo + i) * step;
        ax[static_cast<std::size_t>(i)] = pattern.af_x_power(us[static_cast<std::size_t>(i)]);
    }
    for (int j = 0; j < nw; ++j)
    {
        ws[static_cast<std::size_t>(j)] = we + (kw_lo + j) * step;
        az[static_cast<std::size_t>(j)] = pattern.af_z_power(ws[static_cast<std::size_t>(j)]);
    }

    // f[j * nu + i]
    std::vector<double> f(static_cast<std::size_t>(nu) * static_cast<std::size_t>(nw), 0.0);
    for (int j = 0; j < nw; ++j)
    {
        const double w = ws[static_cast<std::size_t>(j)];
        const double s2 = 1.0 - w * w;
        if (s2 <= 0.0)
            continue;
        const double row = az[static_cast<std::size_t>(j)] * s2 * std::sqrt(s2);
        for (int i = 0; i < nu; ++i)
        {
            const double u = us[static_cast<std::size_t>(i)];
            const double r2 = u * u + w * w;
            if (r2 >= 1.0)
                continue;
            const double img = image_factor_v(std::sqrt(1.0 - r2));
            f[static_cast<std::size_t>(j) * nu + i] = ax[static_cast<std::size_t>(i)] * row * img * img;
        }
    }
    auto at = [&](int i, int j) { return f[static_cast<std::size_t>(j) * nu + i]; };

    // Walk a principal cut from the steering sample: climb to the lobe top if
    // needed, then descend to the first local minimum.
    auto walk = [](auto value, int start, int lo, int hi, int dir) {
        int k = start;
        while (k + dir >= lo && k + dir <= hi && value(k + dir) > value(k))
            k += dir;
        while (k + dir >= lo && k + dir <= hi && value(k + dir) <= value(k))
            k += dir;
        return k;
    };
    auto along_u = [&](int i) { return at(i, iw0); };
    auto along_w = [&](int j) { return at(iu0, j); };
    const int box_u_lo = walk(along_u, iu0, 0, nu - 1, -1);
    const int box_u_hi = walk(along_u, iu0, 0, nu - 1, +1);
    const int box_w_lo = walk(along_w, iw0, 0, nw - 1, -1);
    const int box_w_hi = walk(along_w, iw0, 0, nw - 1, +1);

    // Log-parabolic refinement of a sampled peak along both axes.
    auto refined = [&](int i, int j) {
        const double y0 = at(i, j);
        double log_peak = std::log(y0);
        auto axis = [&](double ym, double yp) {
            if (ym <= 0.0 || yp <= 0.0)
                return 0.0;
            const double lm = std::log(ym), l0 = std::log(y0), lp = std::log(yp);
            const double denom = lm - 2.0 * l0 + lp;
            if (denom >= 0.0)
                return 0.0;
            const double delta = 0.5 * (lm - lp) / denom;
            return -0.25 * (lm - lp) * delta;
        };
        if (i > 0 && i < nu - 1)
            log_peak += axis(at(i - 1, j), at(i + 1, j));
        if (j > 0 && j < nw - 1)
            log_peak += axis(at(i, j - 1), at(i, j + 1));
        return std::exp(log_peak);
    };

    // Main-lobe resolution check along both cuts.
    {
        int best_i = iu0, best_j = iw0;
        for (int i = box_u_lo; i <= box_u_hi; ++i)
            if (along_u(i) > along_u(best_i))
                best_i = i;
        for (int j = box_w_lo; j <= box_w_hi; ++j)
            if (along_w(j) > along_w(best_j))
                best_j = j;
        int count_u = 0, count_w = 0;
        for (int i = box_u_lo; i <= box_u_hi; ++i)
            count_u += along_u(i) >= 0.5 * along_u(best_i) ? 1 : 0;
        for (int j = box_w_lo; j <= box_w_hi; ++j)
            count_w += along_w(j) >= 0.5 * along_w(best_j) ? 1 : 0;
        if (count_u < 4 || count_w < 4)
            throw std::invalid_argument("sidelobe_level_db: grid too coarse to resolve the main lobe");
    }

    double main_peak = 0.0;
    int main_i = iu0, main_j = iw0;
    for (int j = box_w_lo; j <= box_w_hi; ++j)
        for (int i = box_u_lo; i <= box_u_hi; ++i)
            if (at(i, j) > main_peak)
            {
                main_peak = at(i, j);
                main_i = i;
                main_j = j;
            }
    if (main_peak <= 0.0)
        return std::nullopt;
    main_peak = std::max(main_peak, refined(main_i, main_j));

    double side_peak = 0.0;
    for (int j = 0; j < nw; ++j)
    {
        const bool w_inside = j >= box_w_lo && j <= box_w_hi;
        for (int i = 0; i < nu; ++i)
        {
            if (w_inside && i >= box_u_lo && i <= box_u_hi)
                continue;
            const double v = at(i, j);
            if (v <= 0.0 || v <= side_peak)
                continue;
            bool is_max = true;
            for (int dj = -1; dj <= 1 && is_max; ++dj)
                for (int di = -1; di <= 1; ++di)
                {
                    if (di == 0 && dj == 0)
                        continue;
                    const int ii = i + di, jj = j + dj;
                    if (ii < 0 || ii >= nu || jj < 0 || jj >= nw)
                        continue;
                    if (at(ii, jj) > v)
                    {
                        is_max = false;
                        break;
                    }
                }
            if (is_max)
                side_peak = std::max(side_peak, refined(i, j));
        }
    }
    if (side_peak <= 0.0)
        return std::nullopt;
    return 10.0 * std::log10(main_peak / side_peak);
}

BeamGain::BeamGain(const ArrayDesign &design, const SteeringAngles &steer, int resolution)
    : pattern_(design, steer), g0_(peak_gain_g0(design, steer, resolution))
{
}

BeamGain::BeamGain(const ArrayDesign &design, const SteeringAngles &steer, double g0)
    : pattern_(design, steer), g0_(g0)
{
}

double BeamGain::g0_db() const
{
    return to_db(g0_);
}

std::vector<PatternSample> sample_pattern_grid(const BeamGain &beam, int n_theta, int n_phi)
{
    std::vector<PatternSample> out;
    out.reserve(static_cast<std::size_t>(n_theta) * static_cast<std::size_t>(n_phi));
    for (int i = 0; i < n_theta; ++i)
    {
        const double theta = n_theta > 1 ? kPi * i / (n_theta - 1) : 0.5 * kPi;
        for (int j = 0; j < n_phi; ++j)
        {
            const double phi = n_phi > 1 ? -0.5 * kPi + kPi * j / (n_phi - 1) : 0.0;
            const Direction dir{theta, phi};
            const double f = beam.pattern().normalized(dir);
            out.push_back({dir, f, std::max(kFloorDb, to_db(beam.g0() * f))});
        }
    }
    return out;
}

std::vector<std::pair<double, double>> principal_cut_db(const BeamGain &beam, bool elevation, int samples)
{
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(samples));
    const auto &steer = beam.pattern().steer();
    for (int k = 0; k < samples; ++k)
    {
        const double t = samples > 1 ? static_cast<double>(k) / (samples - 1) : 0.5;
        const double angle = elevation ? kPi * t : -0.5 * kPi + kPi * t;
        const Direction dir = elevation ? Direction{angle, steer.phi_e} : Direction{steer.theta_e, angle};
        const double f = beam.pattern().normalized(dir);
        out.emplace_back(angle, std::max(kFloorDb, to_db(beam.g0() * f)));
    }
    return out;
}

double to_db(double linear)
{
    return linear > 0.0 ? 10.0 * std::log10(linear) : -std::numeric_limits<double>::infinity();
}

double from_db(double db)
{
    return std::pow(10.0, db / 10.0);
}

} // namespace beamsim
