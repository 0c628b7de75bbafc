#include "wfsched/workflow_io.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace wfsched {

namespace pt = boost::property_tree;

namespace {

double parse_number(const std::string& text, const std::string& where, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ParseError(where, std::string(what) + " '" + text + "' is not a number");
}

std::string strip_namespace(const std::string& tag) {
    auto colon = tag.find(':');
    return colon == std::string::npos ? tag : tag.substr(colon + 1);
}

}  // namespace

WorkflowDag parse_dax(std::string_view xml, const DaxOptions& options) {
    pt::ptree tree;
    std::istringstream in{std::string(xml)};
    try {
        pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw ParseError("line " + std::to_string(e.line()), e.message());
    }

    const pt::ptree* adag = nullptr;
    for (const auto& [tag, node] : tree) {
        if (strip_namespace(tag) == "adag") adag = &node;
    }
    if (!adag) throw ParseError("document", "missing <adag> root element");

    struct FileUse {
        std::vector<std::string> producers;
        std::vector<std::string> consumers;
        double size_mb = 0.0;
    };
    std::vector<Task> tasks;
    std::set<std::string> ids;
    std::map<std::string, FileUse> files;
    std::set<std::pair<std::string, std::string>> explicit_deps;
    std::vector<std::pair<std::string, std::string>> dep_order;

    std::size_t job_no = 0;
    std::size_t child_no = 0;
    for (const auto& [raw_tag, node] : *adag) {
        const std::string tag = strip_namespace(raw_tag);
        if (tag == "job") {
            ++job_no;
            const std::string where = "job #" + std::to_string(job_no);
            const auto id = node.get_optional<std::string>("<xmlattr>.id");
            if (!id || id->empty()) throw ParseError(where, "job without id");
            const auto runtime = node.get_optional<std::string>("<xmlattr>.runtime");
            if (!runtime) throw ParseError(where + " (" + *id + ")", "job without runtime");
            if (!ids.insert(*id).second) throw ParseError(where, "duplicate job id '" + *id + "'");
            const double seconds = parse_number(*runtime, where, "runtime");
            tasks.push_back({*id, seconds * options.reference_mips});

            for (const auto& [use_tag, use] : node) {
                if (strip_namespace(use_tag) != "uses") continue;
                const auto file = use.get_optional<std::string>("<xmlattr>.file")
                                      ? use.get<std::string>("<xmlattr>.file")
                                      : use.get<std::string>("<xmlattr>.name", "");
                if (file.empty()) throw ParseError(where, "<uses> without file name");
                const auto link = use.get<std::string>("<xmlattr>.link", "");
                auto& f = files[file];
                if (auto size = use.get_optional<std::string>("<xmlattr>.size")) {
                    f.size_mb = parse_number(*size, where, "file size") / 1e6;
                }
                if (link == "output") f.producers.push_back(*id);
                else if (link == "input") f.consumers.push_back(*id);
            }
        } else if (tag == "child") {
            ++child_no;
            const auto ref = node.get_optional<std::string>("<xmlattr>.ref");
            const std::string where = "child #" + std::to_string(child_no);
            if (!ref) throw ParseError(where, "<child> without ref");
            for (const auto& [ptag, parent] : node) {
                if (strip_namespace(ptag) != "parent") continue;
                const auto pref = parent.get_optional<std::string>("<xmlattr>.ref");
                if (!pref) throw ParseError(where + " (" + *ref + ")", "<parent> without ref");
                if (explicit_deps.emplace(*pref, *ref).second) dep_order.emplace_back(*pref, *ref);
            }
        }
    }

    for (const auto& [from, to] : dep_order) {
        if (!ids.count(to)) throw ParseError("child " + to, "refers to an unknown job");
        if (!ids.count(from)) throw ParseError("parent " + from + " of " + to, "refers to an unknown job");
    }

    // Data per (producer, consumer) pair from shared files.
    std::map<std::pair<std::string, std::string>, double> data;
    for (const auto& [name, f] : files) {
        for (const auto& p : f.producers) {
            for (const auto& c : f.consumers) {
                if (p != c) data[{p, c}] += f.size_mb;
            }
        }
    }
    std::vector<Edge> edges;
    for (const auto& dep : dep_order) {
        auto it = data.find(dep);
        edges.push_back({dep.first, dep.second, it == data.end() ? 0.0 : it->second});
    }
    for (const auto& [dep, mb] : data) {
        if (!explicit_deps.count(dep)) edges.push_back({dep.first, dep.second, mb});
    }

    WorkflowDag dag(std::move(tasks), std::move(edges));
    require_valid(dag);
    return dag;
}

nlohmann::json workflow_to_json(const WorkflowDag& dag) {
    nlohmann::json doc;
    auto tasks = nlohmann::json::array();
    for (const auto& t : dag.tasks()) tasks.push_back({{"id", t.id}, {"weight_mi", t.weight_mi}});
    auto edges = nlohmann::json::array();
    for (const auto& e : dag.edges()) {
        edges.push_back({{"from", e.from}, {"to", e.to}, {"data_mb", e.data_mb}});
    }
    doc["tasks"] = std::move(tasks);
    doc["edges"] = std::move(edges);
    return doc;
}

WorkflowDag workflow_from_json(const nlohmann::json& doc) {
    try {
        std::vector<Task> tasks;
        for (const auto& t : doc.at("tasks")) {
            tasks.push_back({t.at("id").get<std::string>(), t.at("weight_mi").get<double>()});
        }
        std::vector<Edge> edges;
        if (doc.contains("edges")) {
            for (const auto& e : doc.at("edges")) {
                edges.push_back({e.at("from").get<std::string>(), e.at("to").get<std::string>(),
                                 e.value("data_mb", 0.0)});
            }
        }
        return WorkflowDag(std::move(tasks), std::move(edges));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("workflow json", e.what());
    }
}

void write_workflow_json(std::ostream& out, const WorkflowDag& dag) {
    out << workflow_to_json(dag).dump(2) << '\n';
}

WorkflowDag read_workflow_json(std::istream& in) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("byte " + std::to_string(e.byte), e.what());
    }
    return workflow_from_json(doc);
}

WorkflowDag load_workflow(const std::string& path, const DaxOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path, "cannot open file");
    auto ends_with = [&](std::string_view suffix) {
        return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with(".dax") || ends_with(".xml")) {
        std::ostringstream buf;
        buf << in.rdbuf();
        return parse_dax(buf.str(), options);
    }
    return read_workflow_json(in);
}

}  // namespace wfsched
