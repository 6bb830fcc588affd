#include "awm/master_equation.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "awm/csv.hpp"

namespace awm {

namespace {

struct Rhs {
    const PhysicalParams& p;

    // d/dt (p_e, W)
    std::pair<double, double> operator()(double t, double pe) const {
        const Complex b = p.beta0 * Complex{std::cos(p.Omega * t), -std::sin(p.Omega * t)};
        const double w = effective_frequency(b, p);
        const double nbar = mean_occupation(w, p.theta);
        const double dpe = p.gamma * nbar * (1.0 - pe) - p.gamma * (nbar + 1.0) * pe;
        const double domega = 2.0 * p.g_m * p.Omega * b.imag();
        return {dpe, pe * domega};
    }
};

double z_score(double diff, double se) {
    if (se > 0.0) return diff / se;
    if (diff == 0.0) return 0.0;
    return std::copysign(std::numeric_limits<double>::infinity(), diff);
}

}  // namespace

PopulationTrace integrate_master_equation(const PhysicalParams& p, const ProtocolParams& proto,
                                          std::size_t substeps) {
    p.validate();
    if (proto.n_steps == 0 || substeps == 0) throw std::invalid_argument("step counts must be positive");
    if (!(proto.t_final > 0.0)) throw std::invalid_argument("t_final must be positive");
    const Rhs f{p};
    const std::size_t total = proto.n_steps * substeps;
    const double h = proto.t_final / static_cast<double>(total);

    PopulationTrace tr;
    tr.times.reserve(proto.n_steps + 1);
    double pe = thermal_distribution(p.beta0, p).p_e;
    double W = 0.0;
    tr.times.push_back(0.0);
    tr.p_e.push_back(pe);
    tr.mean_work.push_back(0.0);
    for (std::size_t i = 0; i < total; ++i) {
        const double t = h * static_cast<double>(i);
        const auto k1 = f(t, pe);
        const auto k2 = f(t + h / 2, pe + h / 2 * k1.first);
        const auto k3 = f(t + h / 2, pe + h / 2 * k2.first);
        const auto k4 = f(t + h, pe + h * k3.first);
        pe += h / 6 * (k1.first + 2 * k2.first + 2 * k3.first + k4.first);
        W += h / 6 * (k1.second + 2 * k2.second + 2 * k3.second + k4.second);
        if ((i + 1) % substeps == 0) {
            tr.times.push_back(h * static_cast<double>(i + 1));
            tr.p_e.push_back(pe);
            tr.mean_work.push_back(W);
        }
    }
    return tr;
}

OracleComparison compare(const PopulationTrace& trace, const EnsembleAggregate& agg) {
    if (trace.p_e.empty()) throw std::invalid_argument("empty population trace");
    OracleComparison c;
    c.p_e_oracle = trace.p_e.back();
    c.work_oracle = trace.mean_work.back();
    c.p_e_mc = mean_of(agg.population_e);
    c.work_mc = mean_of(agg.W);
    c.z_p_e = z_score(c.p_e_mc.value - c.p_e_oracle, c.p_e_mc.std_error);
    c.z_work = z_score(c.work_mc.value - c.work_oracle, c.work_mc.std_error);
    return c;
}

void write_trace_csv(std::ostream& os, const PopulationTrace& trace) {
    os << "t,p_e,mean_work_cumulative\n";
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        os << format_double(trace.times[i]) << ',' << format_double(trace.p_e[i]) << ','
           << format_double(trace.mean_work[i]) << '\n';
}

}  // namespace awm
