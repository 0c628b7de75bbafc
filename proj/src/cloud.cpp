#include "wfsched/cloud.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace wfsched {

InstanceCatalog::InstanceCatalog(std::vector<InstanceType> types, double bandwidth_mbps,
                                 double billing_period_s, double provisioning_delay_s)
    : types_(std::move(types)),
      bandwidth_mbps_(bandwidth_mbps),
      billing_period_s_(billing_period_s),
      provisioning_delay_s_(provisioning_delay_s) {
    if (types_.empty()) throw CatalogError("catalog has no instance types");
    if (!(bandwidth_mbps_ > 0.0)) throw CatalogError("bandwidth must be positive");
    if (!(billing_period_s_ > 0.0)) throw CatalogError("billing period must be positive");
    if (!(provisioning_delay_s_ >= 0.0)) throw CatalogError("provisioning delay must be >= 0");

    for (std::size_t k = 0; k < types_.size(); ++k) {
        const auto& t = types_[k];
        if (!(t.mips > 0.0) || !(t.cost_per_period > 0.0)) {
            throw CatalogError("instance type '" + t.name + "' needs positive mips and cost");
        }
        if (!(t.power_idle_w > 0.0) || !(t.power_max_w > t.power_idle_w)) {
            throw CatalogError("instance type '" + t.name + "' needs 0 < idle power < max power");
        }
        if (k > 0) {
            const auto& prev = types_[k - 1];
            if (!(t.mips > prev.mips) || !(t.cost_per_period > prev.cost_per_period)) {
                throw CatalogError("instance types must be strictly increasing in mips and cost: '" +
                                   prev.name + "' then '" + t.name + "'");
            }
        }
    }
}

InstanceCatalog InstanceCatalog::ec2_default() {
    return InstanceCatalog({
        {"m3.medium", 1, 0.067, 140, 228},
        {"m4.large", 2, 0.10, 146, 238},
        {"m4.xlarge", 4, 0.20, 153, 249},
        {"m4.2xlarge", 8, 0.40, 159, 260},
        {"m4.4xlarge", 16, 0.80, 167, 272},
        {"m5.8xlarge", 32, 1.536, 174, 282},
        {"m4.10xlarge", 40, 2.00, 182, 294},
        {"m5.12xlarge", 48, 2.304, 188, 305},
        {"m4.16xlarge", 64, 3.20, 196, 316},
        {"m5.24xlarge", 96, 4.608, 204, 330},
    });
}

std::size_t InstanceCatalog::index_of(const std::string& name) const {
    for (std::size_t k = 0; k < types_.size(); ++k) {
        if (types_[k].name == name) return k;
    }
    throw CatalogError("unknown instance type '" + name + "'");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        auto b = field.find_first_not_of(" \t\r");
        auto e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
    }
    return fields;
}

double to_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw CatalogError("line " + std::to_string(line_no) + ": '" + s + "' is not a number");
}

}  // namespace

InstanceCatalog read_catalog_csv(std::istream& in, double bandwidth_mbps, double billing_period_s,
                                 double provisioning_delay_s) {
    static const std::vector<std::string> kHeader{"name", "vcpu", "cost_per_hour", "power_min_w",
                                                  "power_max_w"};
    std::string line;
    std::size_t line_no = 0;
    std::vector<InstanceType> types;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto fields = split_csv_line(line);
        if (!header_seen) {
            if (fields != kHeader) {
                throw CatalogError("catalog header must be name,vcpu,cost_per_hour,power_min_w,power_max_w");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != kHeader.size()) {
            throw CatalogError("line " + std::to_string(line_no) + ": expected 5 fields");
        }
        types.push_back({fields[0], to_double(fields[1], line_no), to_double(fields[2], line_no),
                         to_double(fields[3], line_no), to_double(fields[4], line_no)});
    }
    if (!header_seen) throw CatalogError("catalog is empty");
    return InstanceCatalog(std::move(types), bandwidth_mbps, billing_period_s, provisioning_delay_s);
}

InstanceCatalog load_catalog_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CatalogError("cannot open catalog '" + path + "'");
    return read_catalog_csv(in);
}

void write_catalog_csv(std::ostream& out, const InstanceCatalog& catalog) {
    out << "name,vcpu,cost_per_hour,power_min_w,power_max_w\n";
    for (const auto& t : catalog.types()) {
        out << t.name << ',' << t.mips << ',' << t.cost_per_period << ',' << t.power_idle_w << ','
            << t.power_max_w << '\n';
    }
}

double et(double weight_mi, const InstanceType& type) { return weight_mi / type.mips; }

double tt(double data_mb, bool same_vm, double bandwidth_mbps) {
    if (same_vm) return 0.0;
    return data_mb / bandwidth_mbps;
}

std::size_t billed_periods(double runtime_s, double billing_period_s) {
    if (!(runtime_s > 0.0)) return 0;
    return static_cast<std::size_t>(std::ceil(runtime_s / billing_period_s));
}

double ec(double runtime_s, const InstanceType& type, double billing_period_s) {
    return static_cast<double>(billed_periods(runtime_s, billing_period_s)) * type.cost_per_period;
}

double cumulative_ec(std::span<const double> task_runtimes_s, double tits_s,
                     const InstanceType& type, double billing_period_s) {
    double total = tits_s;
    for (double r : task_runtimes_s) total += r;
    return ec(total, type, billing_period_s);
}

double power_w(const InstanceType& type, double utilization) {
    if (!(utilization >= 0.0 && utilization <= 1.0)) {
        throw std::domain_error("utilization must lie in [0,1]");
    }
    return type.power_idle_w + (type.power_max_w - type.power_idle_w) * utilization;
}

double energy_kwh(const VmInstance& vm) {
    const double lease = vm.lease_end_s - vm.lease_start_s;
    if (!(lease > 0.0)) return 0.0;
    double joules = 0.0;
    double busy = 0.0;
    for (const auto& seg : vm.busy_intervals) {
        const double d = seg.end_s - seg.start_s;
        joules += power_w(vm.type, seg.utilization) * d;
        busy += d;
    }
    joules += vm.type.power_idle_w * std::max(0.0, lease - busy);
    return joules / kJoulesPerKwh;
}

double billing(const VmInstance& vm, double billing_period_s) {
    return ec(vm.lease_end_s - vm.lease_start_s, vm.type, billing_period_s);
}

}  // namespace wfsched
