// measurement.hpp: finite-precision readout of the final mechanical amplitude.
//
// The readout grid has cells of width 2*delta centred on 2*delta*(kx + i ky),
// so the origin is a cell centre. Cells are half-open: [c - delta, c + delta).

#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "awm/estimators.hpp"
#include "awm/physics.hpp"

namespace awm {

struct GridCell {
    std::int64_t kx = 0;
    std::int64_t ky = 0;

    Complex center(double delta) const noexcept {
        return {2.0 * delta * static_cast<double>(kx), 2.0 * delta * static_cast<double>(ky)};
    }
    friend auto operator<=>(const GridCell&, const GridCell&) = default;
};

/// Throws std::invalid_argument unless delta > 0.
GridCell measure(Complex beta, double delta);

/// Omega (|beta0|^2 - |center|^2), evaluated as a product of differences.
double measured_work(Complex beta0_nominal, Complex cell_center, const PhysicalParams& p);

struct CellProbability {
    GridCell cell;
    double probability = 0.0;
};

/// Exact distribution of the measured cell when the amplitude is uniform on a
/// square of half-width `jitter` centred at `center` and rotated by `angle`
/// (counter-clockwise). Cells are returned in ascending order.
std::vector<CellProbability> conditional_cell_distribution(Complex center, double jitter, double angle,
                                                           double delta);

/// Entropy in nats of a discrete distribution.
double entropy(const std::vector<CellProbability>& dist);

/// Accumulates the readout statistics of one parameter point. Trajectories
/// are added in index order per shard and shards merged in index order.
class MeasurementAccumulator {
public:
    MeasurementAccumulator() = default;
    /// `angle` is the rotation of the jitter square at t_final, -Omega t_final.
    MeasurementAccumulator(const PhysicalParams& p, double jitter, double delta, double angle);

    void add(const TrajectoryRecord& rec);
    void merge(const MeasurementAccumulator& o);
    std::uint64_t count() const noexcept { return measured_je_kernel_.count(); }

    const RunningStat& measured_je_kernel() const noexcept { return measured_je_kernel_; }
    const RunningStat& shannon() const noexcept { return shannon_; }
    const RunningStat& conditional_entropy() const noexcept { return cond_entropy_; }
    const std::map<GridCell, CompensatedSum>& mixture() const noexcept { return mixture_; }
    const std::vector<Complex>& class_centers() const noexcept { return centers_; }
    double jitter() const noexcept { return jitter_; }
    double delta() const noexcept { return delta_; }
    double angle() const noexcept { return angle_; }

private:
    PhysicalParams p_{};
    double jitter_ = 0.0;
    double delta_ = 1.0;
    double angle_ = 0.0;
    RunningStat measured_je_kernel_;  // exp(-W^M/theta)
    RunningStat shannon_;             // -ln P[Sigma]
    RunningStat cond_entropy_;
    std::map<GridCell, CompensatedSum> mixture_;
    std::vector<Complex> centers_;  // beta_final_ideal per trajectory, for the second pass
};

struct InformationReport {
    Estimate mutual_information;  // clamped to [0, S_Sh]
    double mutual_information_raw = 0.0;
    double clamp_amount = 0.0;    // clamped minus raw
    Estimate shannon_entropy;     // S_Sh = <-ln P[Sigma]>
    double H_meas = 0.0;          // plug-in entropy of the mixture
    double H_cond = 0.0;          // mean conditional entropy
};

/// I = H(mixture) - <H(cond)>; the standard error comes from the per-sample
/// KL divergences to the final mixture.
InformationReport mutual_information(const MeasurementAccumulator& acc);

/// <exp(-W^M/theta)> exp(dF_ref/theta) - 1.
Estimate measured_je_deviation(const MeasurementAccumulator& acc, double dF_ref, double theta);

}  // namespace awm
