#include "awm/measurement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace awm {

GridCell measure(Complex beta, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("grid half-width must be > 0");
    const double w = 2.0 * delta;
    return {static_cast<std::int64_t>(std::floor((beta.real() + delta) / w)),
            static_cast<std::int64_t>(std::floor((beta.imag() + delta) / w))};
}

double measured_work(Complex beta0_nominal, Complex cell_center, const PhysicalParams& p) {
    const double br = beta0_nominal.real(), bi = beta0_nominal.imag();
    const double cr = cell_center.real(), ci = cell_center.imag();
    return p.Omega * ((br - cr) * (br + cr) + (bi - ci) * (bi + ci));
}

namespace {

struct Point {
    double x, y;
};

using Polygon = std::vector<Point>;

// Sutherland-Hodgman against one axis-aligned half-plane.
template <class Inside, class Cross>
Polygon clip(const Polygon& in, Inside inside, Cross cross) {
    Polygon out;
    if (in.empty()) return out;
    Point prev = in.back();
    bool prev_in = inside(prev);
    for (const Point& cur : in) {
        const bool cur_in = inside(cur);
        if (cur_in) {
            if (!prev_in) out.push_back(cross(prev, cur));
            out.push_back(cur);
        } else if (prev_in) {
            out.push_back(cross(prev, cur));
        }
        prev = cur;
        prev_in = cur_in;
    }
    return out;
}

double area(const Polygon& poly) {
    double a = 0.0;
    for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * std::abs(a);
}

Polygon clip_to_box(Polygon poly, double x0, double x1, double y0, double y1) {
    auto at_x = [](double x) {
        return [x](const Point& a, const Point& b) {
            const double t = (x - a.x) / (b.x - a.x);
            return Point{x, a.y + t * (b.y - a.y)};
        };
    };
    auto at_y = [](double y) {
        return [y](const Point& a, const Point& b) {
            const double t = (y - a.y) / (b.y - a.y);
            return Point{a.x + t * (b.x - a.x), y};
        };
    };
    poly = clip(poly, [x0](const Point& p) { return p.x >= x0; }, at_x(x0));
    poly = clip(poly, [x1](const Point& p) { return p.x <= x1; }, at_x(x1));
    poly = clip(poly, [y0](const Point& p) { return p.y >= y0; }, at_y(y0));
    poly = clip(poly, [y1](const Point& p) { return p.y <= y1; }, at_y(y1));
    return poly;
}

double overlap_1d(double a0, double a1, double b0, double b1) {
    return std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
}

std::int64_t cell_index(double x, double delta) {
    return static_cast<std::int64_t>(std::floor((x + delta) / (2.0 * delta)));
}

}  // namespace

std::vector<CellProbability> conditional_cell_distribution(Complex center, double jitter, double angle,
                                                           double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("grid half-width must be > 0");
    if (!(jitter >= 0.0)) throw std::invalid_argument("jitter half-width must be >= 0");
    const GridCell home = measure(center, delta);
    if (jitter == 0.0) return {{home, 1.0}};

    // work relative to the home cell centre so that large amplitudes keep precision
    const Complex local = center - home.center(delta);
    const double w = 2.0 * delta;
    const double h = jitter;
    const double s = std::sin(angle), c = std::cos(angle);
    std::vector<CellProbability> out;

    if (std::abs(s * c) < 1e-12) {
        // a quarter-turn maps the square onto itself
        const double cx = local.real(), cy = local.imag();
        const auto kx0 = cell_index(cx - h, delta), kx1 = cell_index(cx + h, delta);
        const auto ky0 = cell_index(cy - h, delta), ky1 = cell_index(cy + h, delta);
        const double norm = 4.0 * h * h;
        for (auto kx = kx0; kx <= kx1; ++kx) {
            const double ox = overlap_1d(cx - h, cx + h, w * kx - delta, w * kx + delta);
            if (ox <= 0.0) continue;
            for (auto ky = ky0; ky <= ky1; ++ky) {
                const double oy = overlap_1d(cy - h, cy + h, w * ky - delta, w * ky + delta);
                if (oy <= 0.0) continue;
                out.push_back({{home.kx + kx, home.ky + ky}, ox * oy / norm});
            }
        }
        return out;
    }

    Polygon square;
    for (auto [dx, dy] : std::array<std::pair<double, double>, 4>{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}}) {
        square.push_back({local.real() + h * (c * dx - s * dy), local.imag() + h * (s * dx + c * dy)});
    }
    double xmin = square[0].x, xmax = xmin, ymin = square[0].y, ymax = ymin;
    for (const auto& v : square) {
        xmin = std::min(xmin, v.x);
        xmax = std::max(xmax, v.x);
        ymin = std::min(ymin, v.y);
        ymax = std::max(ymax, v.y);
    }
    const double norm = 4.0 * h * h;
    for (auto kx = cell_index(xmin, delta); kx <= cell_index(xmax, delta); ++kx) {
        for (auto ky = cell_index(ymin, delta); ky <= cell_index(ymax, delta); ++ky) {
            const auto piece = clip_to_box(square, w * kx - delta, w * kx + delta, w * ky - delta,
                                           w * ky + delta);
            if (piece.size() < 3) continue;
            const double a = area(piece);
            if (a > 0.0) out.push_back({{home.kx + kx, home.ky + ky}, a / norm});
        }
    }
    return out;
}

double entropy(const std::vector<CellProbability>& dist) {
    double h = 0.0;
    for (const auto& cp : dist)
        if (cp.probability > 0.0) h -= cp.probability * std::log(cp.probability);
    return h;
}

MeasurementAccumulator::MeasurementAccumulator(const PhysicalParams& p, double jitter, double delta,
                                               double angle)
    : p_(p), jitter_(jitter), delta_(delta), angle_(angle) {
    if (!(delta > 0.0)) throw std::invalid_argument("grid half-width must be > 0");
    if (!(jitter >= 0.0)) throw std::invalid_argument("jitter half-width must be >= 0");
}

void MeasurementAccumulator::add(const TrajectoryRecord& rec) {
    const GridCell cell = measure(rec.beta_final_actual, delta_);
    const double wm = measured_work(p_.beta0, cell.center(delta_), p_);
    if (p_.theta > 0.0) {
        const double x = -wm / p_.theta;
        measured_je_kernel_.add(x > 709.78 ? std::numeric_limits<double>::infinity() : std::exp(x));
    } else {
        measured_je_kernel_.add(wm < 0 ? std::numeric_limits<double>::infinity() : (wm > 0 ? 0.0 : 1.0));
    }
    shannon_.add(-rec.log_p_forward);

    const auto cond = conditional_cell_distribution(rec.beta_final_ideal, jitter_, angle_, delta_);
    cond_entropy_.add(entropy(cond));
    for (const auto& cp : cond) mixture_[cp.cell].add(cp.probability);
    centers_.push_back(rec.beta_final_ideal);
}

void MeasurementAccumulator::merge(const MeasurementAccumulator& o) {
    if (count() == 0 && centers_.empty()) {
        p_ = o.p_;
        jitter_ = o.jitter_;
        delta_ = o.delta_;
        angle_ = o.angle_;
    }
    measured_je_kernel_.merge(o.measured_je_kernel_);
    shannon_.merge(o.shannon_);
    cond_entropy_.merge(o.cond_entropy_);
    for (const auto& [cell, sum] : o.mixture_) mixture_[cell].merge(sum);
    centers_.insert(centers_.end(), o.centers_.begin(), o.centers_.end());
}

InformationReport mutual_information(const MeasurementAccumulator& acc) {
    const auto n = acc.conditional_entropy().count();
    if (n == 0) throw EmptyAggregateError("mutual_information needs at least one trajectory");
    const double nd = static_cast<double>(n);

    std::map<GridCell, double> m;
    double h_meas = 0.0;
    for (const auto& [cell, sum] : acc.mixture()) {
        const double q = sum.value() / nd;
        m[cell] = q;
        if (q > 0.0) h_meas -= q * std::log(q);
    }

    InformationReport r;
    r.H_meas = h_meas;
    r.H_cond = acc.conditional_entropy().mean();
    r.shannon_entropy = {acc.shannon().mean(), acc.shannon().std_error()};

    // second pass: per-sample KL(cond || mixture), whose mean is H_meas - H_cond
    RunningStat kl;
    for (const Complex& c : acc.class_centers()) {
        double d = 0.0;
        for (const auto& cp : conditional_cell_distribution(c, acc.jitter(), acc.angle(), acc.delta()))
            if (cp.probability > 0.0) d += cp.probability * std::log(cp.probability / m.at(cp.cell));
        kl.add(d);
    }
    r.mutual_information_raw = h_meas - r.H_cond;
    const double clamped = std::clamp(r.mutual_information_raw, 0.0, std::max(0.0, r.shannon_entropy.value));
    r.clamp_amount = clamped - r.mutual_information_raw;
    r.mutual_information = {clamped, kl.std_error()};
    return r;
}

Estimate measured_je_deviation(const MeasurementAccumulator& acc, double dF_ref, double theta) {
    const auto& k = acc.measured_je_kernel();
    if (k.count() < 2) throw EmptyAggregateError("measured_je_deviation needs at least two trajectories");
    if (k.non_finite() > 0) throw std::overflow_error("measured JE kernel overflowed");
    const double scale = theta > 0.0 ? std::exp(dF_ref / theta) : 1.0;
    return {k.mean() * scale - 1.0, k.std_error() * scale};
}

}  // namespace awm
