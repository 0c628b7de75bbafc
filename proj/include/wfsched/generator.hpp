#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "wfsched/workflow.hpp"

namespace wfsched {

enum class Family { Montage, CyberShake, Epigenomics, Sipht, Ligo };

std::string_view to_string(Family f);
/// Accepts "montage-like" etc.; throws std::invalid_argument.
Family parse_family(std::string_view name);
const std::vector<Family>& all_families();

/// Smallest task count that still has the family's shape.
std::size_t min_task_count(Family f);

struct GeneratorSpec {
    Family family = Family::Montage;
    std::size_t task_count = 50;
    std::uint64_t seed = 1;
    // log-uniform ranges
    double weight_min_mi = 1000.0;
    double weight_max_mi = 20000.0;
    double data_min_mb = 1.0;
    double data_max_mb = 50.0;
};

/// Throws std::invalid_argument for sizes below the family minimum or empty ranges.
WorkflowDag generate(const GeneratorSpec& spec);

}  // namespace wfsched
