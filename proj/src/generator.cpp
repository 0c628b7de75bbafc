#include "wfsched/generator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>

namespace wfsched {

std::string_view to_string(Family f) {
    switch (f) {
        case Family::Montage: return "montage-like";
        case Family::CyberShake: return "cybershake-like";
        case Family::Epigenomics: return "epigenomics-like";
        case Family::Sipht: return "sipht-like";
        case Family::Ligo: return "ligo-like";
    }
    return "unknown";
}

const std::vector<Family>& all_families() {
    static const std::vector<Family> kAll{Family::Montage, Family::CyberShake, Family::Epigenomics,
                                          Family::Sipht, Family::Ligo};
    return kAll;
}

Family parse_family(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (Family f : all_families()) {
        const auto full = to_string(f);
        if (lower == full || lower == full.substr(0, full.size() - 5)) return f;
    }
    throw std::invalid_argument("unknown workflow family '" + std::string(name) + "'");
}

std::size_t min_task_count(Family f) {
    switch (f) {
        case Family::Montage: return 20;
        case Family::CyberShake: return 8;
        case Family::Epigenomics: return 7;
        case Family::Sipht: return 13;
        case Family::Ligo: return 6;
    }
    return 0;
}

namespace {

// Everything below must produce the same DAG on every platform, so no
// std::*_distribution (their algorithms are implementation-defined).
class Sampler {
public:
    Sampler(std::uint64_t seed, Family f, const GeneratorSpec& spec)
        : rng_(mix(seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(f) + 1)))), spec_(spec) {}

    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    double log_uniform(double lo, double hi) {
        if (lo == hi) return lo;
        return std::exp(std::log(lo) + unit() * (std::log(hi) - std::log(lo)));
    }
    double weight() { return round3(log_uniform(spec_.weight_min_mi, spec_.weight_max_mi)); }
    double data() { return round3(log_uniform(spec_.data_min_mb, spec_.data_max_mb)); }

private:
    static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Three decimals keep JSON files short and round-trips exact.
    static double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

    std::mt19937_64 rng_;
    const GeneratorSpec& spec_;
};

class Builder {
public:
    explicit Builder(Sampler& s) : sampler_(s) {}

    std::string add(const char* kind) {
        char id[64];
        std::snprintf(id, sizeof id, "t%05zu_%s", tasks_.size(), kind);
        tasks_.push_back({id, sampler_.weight()});
        return id;
    }
    void link(const std::string& from, const std::string& to) {
        edges_.push_back({from, to, sampler_.data()});
    }
    std::size_t size() const { return tasks_.size(); }
    WorkflowDag build() { return WorkflowDag(std::move(tasks_), std::move(edges_)); }

private:
    Sampler& sampler_;
    std::vector<Task> tasks_;
    std::vector<Edge> edges_;
};

// Splits `total` into `parts` near-equal positive shares, larger ones first.
std::vector<std::size_t> split_even(std::size_t total, std::size_t parts) {
    std::vector<std::size_t> out(parts, total / parts);
    for (std::size_t i = 0; i < total % parts; ++i) ++out[i];
    return out;
}

std::size_t round_div(double x) { return static_cast<std::size_t>(std::llround(x)); }

// Projections fan into overlap diffs, a global fit, per-image background
// corrections, then a serial tail.
void montage(Builder& b, std::size_t n) {
    std::size_t k = std::max<std::size_t>(2, round_div((static_cast<double>(n) - 6) / 3.5));
    // every projection needs a diff, and there are only k(k-1)/2 pairs
    while (n - 6 - 2 * k > k * (k - 1) / 2) ++k;
    const std::size_t d = n - 6 - 2 * k;
    std::vector<std::string> proj;
    for (std::size_t i = 0; i < k; ++i) proj.push_back(b.add("mProject"));
    std::vector<std::string> diffs;
    for (std::size_t gap = 1; diffs.size() < d; ++gap) {
        for (std::size_t i = 0; i + gap < k && diffs.size() < d; ++i) {
            auto id = b.add("mDiffFit");
            b.link(proj[i], id);
            b.link(proj[i + gap], id);
            diffs.push_back(id);
        }
    }
    auto concat = b.add("mConcatFit");
    for (const auto& id : diffs) b.link(id, concat);
    auto model = b.add("mBgModel");
    b.link(concat, model);
    auto table = b.add("mImgtbl");
    std::vector<std::string> bgs;
    for (std::size_t i = 0; i < k; ++i) {
        auto id = b.add("mBackground");
        b.link(model, id);
        b.link(proj[i], id);
        bgs.push_back(id);
    }
    for (const auto& id : bgs) b.link(id, table);
    auto add = b.add("mAdd");
    b.link(table, add);
    auto shrink = b.add("mShrink");
    b.link(add, shrink);
    auto jpeg = b.add("mJPEG");
    b.link(shrink, jpeg);
}

// A few strain-tensor extracts fan out to many seismograms, each with a peak
// calculation; two zips collect everything.
void cybershake(Builder& b, std::size_t n) {
    std::size_t m = std::max<std::size_t>(2, n / 25);
    if ((n - 2 - m) % 2 != 0) ++m;
    const std::size_t s = (n - 2 - m) / 2;
    std::vector<std::string> extract;
    for (std::size_t i = 0; i < m; ++i) extract.push_back(b.add("ExtractSGT"));
    std::vector<std::string> seis, peaks;
    for (std::size_t i = 0; i < s; ++i) {
        auto id = b.add("SeismogramSynthesis");
        b.link(extract[i % m], id);
        seis.push_back(id);
    }
    for (std::size_t i = 0; i < s; ++i) {
        auto id = b.add("PeakValCalc");
        b.link(seis[i], id);
        peaks.push_back(id);
    }
    auto zip_seis = b.add("ZipSeis");
    for (const auto& id : seis) b.link(id, zip_seis);
    auto zip_psa = b.add("ZipPSA");
    for (const auto& id : peaks) b.link(id, zip_psa);
}

// Lanes: split -> parallel processing chains -> merge; lanes then aggregate.
void epigenomics(Builder& b, std::size_t n) {
    const std::size_t lanes = std::max<std::size_t>(1, n / 100);
    const std::size_t chain_tasks = n - 3 - 2 * lanes;
    const std::size_t per_lane_chains =
        std::max<std::size_t>(2, round_div(static_cast<double>(chain_tasks) / (4.0 * static_cast<double>(lanes))));
    const auto lane_tasks = split_even(chain_tasks, lanes);
    std::vector<std::string> merges;
    for (std::size_t l = 0; l < lanes; ++l) {
        const std::size_t chains = std::min(per_lane_chains, lane_tasks[l]);
        auto split = b.add("fastqSplit");
        std::vector<std::string> tails;
        for (std::size_t len : split_even(lane_tasks[l], chains)) {
            static const char* kStages[] = {"filterContams", "sol2sanger", "fast2bfq", "map"};
            std::string prev = split;
            for (std::size_t i = 0; i < len; ++i) {
                auto id = b.add(kStages[std::min<std::size_t>(i, 3)]);
                b.link(prev, id);
                prev = id;
            }
            tails.push_back(prev);
        }
        auto merge = b.add("mapMerge");
        for (const auto& id : tails) b.link(id, merge);
        merges.push_back(merge);
    }
    auto global = b.add("mapMergeAll");
    for (const auto& id : merges) b.link(id, global);
    auto index = b.add("maqIndex");
    b.link(global, index);
    auto pileup = b.add("pileup");
    b.link(index, pileup);
}

// Independent patser clusters, a candidate search fan, and a late join.
void sipht(Builder& b, std::size_t n) {
    const std::size_t rest = n - 11;
    const std::size_t clusters = std::max<std::size_t>(1, round_div(static_cast<double>(rest) / 25.0));
    const auto patsers = split_even(rest - clusters, clusters);
    std::vector<std::string> concats;
    for (std::size_t c = 0; c < clusters; ++c) {
        std::vector<std::string> ps;
        for (std::size_t i = 0; i < patsers[c]; ++i) ps.push_back(b.add("Patser"));
        auto concat = b.add("Patser_concate");
        for (const auto& id : ps) b.link(id, concat);
        concats.push_back(concat);
    }
    std::vector<std::string> finders;
    for (const char* kind : {"Transterm", "Findterm", "RNAMotif", "Blast"}) finders.push_back(b.add(kind));
    auto srna = b.add("SRNA");
    for (const auto& id : finders) b.link(id, srna);
    auto annotate = b.add("SRNA_annotate");
    for (const char* kind : {"FFN_parse", "Blast_synteny", "Blast_candidate", "Blast_QRNA", "Blast_paralogues"}) {
        auto id = b.add(kind);
        b.link(srna, id);
        b.link(id, annotate);
    }
    for (const auto& id : concats) b.link(id, annotate);
}

// Repeated diamonds: template banks -> inspirals -> thinca -> trigbank/inspiral
// pairs -> thinca.
void ligo(Builder& b, std::size_t n) {
    const std::size_t blocks = std::max<std::size_t>(1, n / 40);
    std::size_t lane_tasks = n - 2 * blocks;
    const bool singleton = lane_tasks % 2 == 1;
    if (singleton) --lane_tasks;
    const auto lanes = split_even(lane_tasks / 2, 2 * blocks);
    for (std::size_t blk = 0; blk < blocks; ++blk) {
        auto thinca = b.add("Thinca");
        for (std::size_t i = 0; i < lanes[2 * blk]; ++i) {
            auto bank = b.add("TmpltBank");
            auto insp = b.add("Inspiral");
            b.link(bank, insp);
            b.link(insp, thinca);
        }
        if (singleton && blk == 0) {
            auto insp = b.add("Inspiral");
            b.link(insp, thinca);
        }
        auto thinca2 = b.add("Thinca2");
        for (std::size_t i = 0; i < lanes[2 * blk + 1]; ++i) {
            auto bank = b.add("TrigBank");
            auto insp = b.add("Inspiral2");
            b.link(thinca, bank);
            b.link(bank, insp);
            b.link(insp, thinca2);
        }
    }
}

}  // namespace

WorkflowDag generate(const GeneratorSpec& spec) {
    if (spec.task_count < min_task_count(spec.family)) {
        throw std::invalid_argument(std::string(to_string(spec.family)) + " needs at least " +
                                    std::to_string(min_task_count(spec.family)) + " tasks");
    }
    if (!(spec.weight_min_mi > 0.0 && spec.weight_min_mi <= spec.weight_max_mi) ||
        !(spec.data_min_mb > 0.0 && spec.data_min_mb <= spec.data_max_mb)) {
        throw std::invalid_argument("generator ranges must be positive and ordered");
    }
    Sampler sampler(spec.seed, spec.family, spec);
    Builder b(sampler);
    switch (spec.family) {
        case Family::Montage: montage(b, spec.task_count); break;
        case Family::CyberShake: cybershake(b, spec.task_count); break;
        case Family::Epigenomics: epigenomics(b, spec.task_count); break;
        case Family::Sipht: sipht(b, spec.task_count); break;
        case Family::Ligo: ligo(b, spec.task_count); break;
    }
    if (b.size() != spec.task_count) {
        throw std::logic_error("generator produced " + std::to_string(b.size()) + " tasks instead of " +
                               std::to_string(spec.task_count));
    }
    return b.build();
}

}  // namespace wfsched
