#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfsched {

struct InstanceType {
    std::string name;
    double mips = 0.0;             // vCPU count doubles as MIPS
    double cost_per_period = 0.0;  // USD per billing period
    double power_idle_w = 0.0;
    double power_max_w = 0.0;
};

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Instance types ordered by speed and price, plus the network and billing
/// parameters shared by every VM.
class InstanceCatalog {
public:
    static constexpr double kDefaultBandwidthMbps = 20.0;
    static constexpr double kDefaultBillingPeriodS = 3600.0;
    static constexpr double kDefaultProvisioningDelayS = 100.0;

    /// Throws CatalogError unless mips and cost are both strictly increasing.
    explicit InstanceCatalog(std::vector<InstanceType> types,
                             double bandwidth_mbps = kDefaultBandwidthMbps,
                             double billing_period_s = kDefaultBillingPeriodS,
                             double provisioning_delay_s = kDefaultProvisioningDelayS);

    /// The ten EC2-derived types (m3.medium ... m5.24xlarge).
    static InstanceCatalog ec2_default();

    std::size_t size() const { return types_.size(); }
    const InstanceType& operator[](std::size_t k) const { return types_[k]; }
    std::span<const InstanceType> types() const { return types_; }
    const InstanceType& cheapest() const { return types_.front(); }
    const InstanceType& fastest() const { return types_.back(); }
    std::size_t index_of(const std::string& name) const;

    double bandwidth_mbps() const { return bandwidth_mbps_; }
    double billing_period_s() const { return billing_period_s_; }
    double provisioning_delay_s() const { return provisioning_delay_s_; }

private:
    std::vector<InstanceType> types_;
    double bandwidth_mbps_;
    double billing_period_s_;
    double provisioning_delay_s_;
};

/// Reads `name,vcpu,cost_per_hour,power_min_w,power_max_w` rows.
InstanceCatalog read_catalog_csv(std::istream& in,
                                 double bandwidth_mbps = InstanceCatalog::kDefaultBandwidthMbps,
                                 double billing_period_s = InstanceCatalog::kDefaultBillingPeriodS,
                                 double provisioning_delay_s = InstanceCatalog::kDefaultProvisioningDelayS);
InstanceCatalog load_catalog_csv(const std::string& path);
void write_catalog_csv(std::ostream& out, const InstanceCatalog& catalog);

struct UtilizationSegment {
    double start_s;
    double end_s;
    double utilization;
};

struct VmInstance {
    std::size_t id = 0;
    InstanceType type;
    double lease_start_s = 0.0;
    double lease_end_s = 0.0;
    std::vector<UtilizationSegment> busy_intervals;  // sorted, non-overlapping
};

// Execution time and transfer time, in seconds.
double et(double weight_mi, const InstanceType& type);
double tt(double data_mb, bool same_vm, double bandwidth_mbps);

/// Cost of `runtime_s` worth of billing periods; zero runtime costs nothing.
double ec(double runtime_s, const InstanceType& type, double billing_period_s);
std::size_t billed_periods(double runtime_s, double billing_period_s);

/// Several tasks sharing one VM, with the transfer idle slots they waited on.
double cumulative_ec(std::span<const double> task_runtimes_s, double tits_s,
                     const InstanceType& type, double billing_period_s);

/// Linear power model. Throws std::domain_error for utilization outside [0,1].
double power_w(const InstanceType& type, double utilization);

/// Energy over the whole lease: busy intervals at their utilization, the rest
/// at idle power.
double energy_kwh(const VmInstance& vm);

double billing(const VmInstance& vm, double billing_period_s);

inline constexpr double kJoulesPerKwh = 3.6e6;

}  // namespace wfsched
