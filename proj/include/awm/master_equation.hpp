// master_equation.hpp: deterministic reduced qubit dynamics on the free orbit,
// used as an oracle for Markovian ensemble averages.

#pragma once

#include <iosfwd>
#include <vector>

#include "awm/estimators.hpp"
#include "awm/trajectory.hpp"

namespace awm {

struct PopulationTrace {
    std::vector<double> times;
    std::vector<double> p_e;
    std::vector<double> mean_work;  // cumulative integral of p_e d(omega)/dt
};

/// Classic RK4 on (p_e, W) with `substeps` stages per protocol step, starting
/// from the thermal population at omega(beta0).
PopulationTrace integrate_master_equation(const PhysicalParams& p, const ProtocolParams& proto,
                                          std::size_t substeps = 1);

struct OracleComparison {
    double p_e_oracle = 0.0;
    Estimate p_e_mc;
    double z_p_e = 0.0;
    double work_oracle = 0.0;
    Estimate work_mc;
    double z_work = 0.0;
};

/// z-scores of the ensemble final population and mean work against the trace.
OracleComparison compare(const PopulationTrace& trace, const EnsembleAggregate& agg);

/// Columns: t, p_e, mean_work_cumulative.
void write_trace_csv(std::ostream& os, const PopulationTrace& trace);

}  // namespace awm
